"""Brute-force oracles the harness compares the real implementation against.

None of these share code paths with the module they check: subtyping is
recomputed as a closure over declared edges, redexes are found by walking
evaluation contexts instead of following the congruence strategy, and table
lookups are repeated on a table that never caches.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterator

from fjlambda.class_table import ClassTable
from fjlambda.errors import ClassTableError, IncomparableTypesError
from fjlambda.evaluator import (
    E_CAST_BOOL,
    E_CAST_LAMBDA,
    E_CAST_LAMBDA_TARGET,
    E_CAST_NEW,
    E_IF_FALSE,
    E_IF_TRUE,
    E_INVK_LAMBDA_D,
    E_INVK_LAMBDA_T,
    E_INVK_LAMBDA_U,
    E_INVK_NEW,
    E_PROJ_NEW,
)
from fjlambda.subtyping import lub, subtype
from fjlambda.syntax import (
    OBJECT,
    BoolLit,
    BoolType,
    Cast,
    Cond,
    DecoratedLambda,
    FieldAccess,
    Invoke,
    New,
    PreType,
    PureLambda,
    RefType,
    Term,
    is_proper_value,
    is_value,
)

logger = logging.getLogger(__name__)

Path = tuple[int, ...]


class SubtypeOracle:
    """Subtyping closure over every intersection of at most ``max_atoms`` names.

    Starts from reflexivity, declared parents and ``Object`` as top, then
    saturates under subset elimination, intersection introduction and
    transitivity. Intersections are compared as sets of atoms.
    """

    def __init__(self, ct: ClassTable, max_atoms: int = 3) -> None:
        self.ct = ct
        self.max_atoms = max_atoms
        names = (OBJECT, *ct.declared_names())
        self.universe: list[frozenset[str]] = [
            frozenset(combo)
            for size in range(1, max_atoms + 1)
            for combo in itertools.combinations(names, size)
        ]
        self.index = {atoms: i for i, atoms in enumerate(self.universe)}
        self._above = self._saturate(names)

    def _bit(self, *atoms: str) -> int:
        return 1 << self.index[frozenset(atoms)]

    def _saturate(self, names: tuple[str, ...]) -> list[int]:
        singles = {name: self._bit(name) for name in names}
        above = [0] * len(self.universe)
        for i, atoms in enumerate(self.universe):
            above[i] |= 1 << i
            above[i] |= singles[OBJECT]
            for size in range(1, len(atoms)):
                for part in itertools.combinations(sorted(atoms), size):
                    above[i] |= self._bit(*part)
            if len(atoms) == 1:
                (name,) = atoms
                for parent in self.ct.parents(name) if name != OBJECT else ():
                    above[i] |= singles[parent]
        # A set is below an intersection exactly when it is below each atom.
        masks = [sum(singles[a] for a in atoms) for atoms in self.universe]
        changed = True
        while changed:
            changed = False
            for i in range(len(self.universe)):
                current = above[i]
                grown = current
                bits = current
                while bits:
                    low = bits & -bits
                    grown |= above[low.bit_length() - 1]
                    bits ^= low
                for k, mask in enumerate(masks):
                    if grown & mask == mask:
                        grown |= 1 << k
                if grown != current:
                    above[i] = grown
                    changed = True
        return above

    def leq(self, left: frozenset[str], right: frozenset[str]) -> bool:
        """``left <: right`` in the closure; larger sets go through their small subsets."""
        def below_atom(atom: str) -> bool:
            target = self.index[frozenset((atom,))]
            if left in self.index:
                return bool(self._above[self.index[left]] >> target & 1)
            return any(
                self._above[self.index[frozenset(part)]] >> target & 1
                for size in range(1, self.max_atoms + 1)
                for part in itertools.combinations(sorted(left), size)
            )

        return all(below_atom(atom) for atom in right)

    def subtype(self, tau: PreType, sigma: PreType) -> bool:
        if isinstance(tau, BoolType) or isinstance(sigma, BoolType):
            return isinstance(tau, BoolType) and isinstance(sigma, BoolType)
        return self.leq(frozenset(tau.atoms), frozenset(sigma.atoms))

    def pretypes(self) -> Iterator[RefType]:
        """Every member of the universe spelled with at most one class, leftmost."""
        for atoms in self.universe:
            classes = [a for a in atoms if self.ct.is_class(a)]
            if len(classes) > 1:
                continue
            rest = sorted(a for a in atoms if a not in classes)
            yield RefType((*classes, *rest))

    def disagreements(self) -> list[str]:
        """Pairs on which ``subtyping.subtype`` and the closure differ."""
        found: list[str] = []
        pretypes = list(self.pretypes())
        for tau, sigma in itertools.product(pretypes, repeat=2):
            expected = self.subtype(tau, sigma)
            if subtype(self.ct, tau, sigma) != expected:
                found.append(f"{tau} <: {sigma} should be {expected}")
        return found

    def check_lub(self, first: PreType, second: PreType) -> str | None:
        """None when ``lub(first, second)`` is a least common upper bound, else the reason."""
        try:
            result = lub(self.ct, first, second)
        except IncomparableTypesError:
            if isinstance(first, BoolType) != isinstance(second, BoolType):
                return None
            return f"lub({first}, {second}) is undefined"
        if not (self.subtype(first, result) and self.subtype(second, result)):
            return f"lub({first}, {second}) = {result} is not an upper bound"
        for rho in self.pretypes():
            bounds = self.subtype(first, rho) and self.subtype(second, rho)
            if bounds and not self.subtype(result, rho):
                return f"lub({first}, {second}) = {result} is not below the upper bound {rho}"
        return None


def lookup_disagreements(ct: ClassTable) -> list[str]:
    """Queries on which the memoised table and a non-caching copy differ."""
    plain = ct.without_memo()
    found: list[str] = []
    types = [RefType((name,)) for name in (OBJECT, *ct.declared_names())]
    methods = sorted({h.name for tau in types for h in (ct.mh(tau) or ())})

    def attempt(table: ClassTable, query: str, *args: object) -> object:
        try:
            return getattr(table, query)(*args)
        except ClassTableError as exc:
            return type(exc).__name__

    for tau in types:
        for query in ("mh", "a_mh", "d_mh", "is_functional"):
            if attempt(ct, query, tau) != attempt(plain, query, tau):
                found.append(f"{query}({tau})")
        for method in methods:
            for query in ("mtype", "mbody"):
                if attempt(ct, query, method, tau) != attempt(plain, query, method, tau):
                    found.append(f"{query}({method}, {tau})")
    for decl in ct.classes():
        if ct.fields(decl.name) != plain.fields(decl.name):
            found.append(f"fields({decl.name})")
    return found


def _contexts(t: Term, path: Path = ()) -> Iterator[tuple[Path, Term]]:
    yield path, t
    match t:
        case FieldAccess(target=target):
            yield from _contexts(target, (*path, 0))
        case Invoke(target=target, args=args):
            yield from _contexts(target, (*path, 0))
            if is_proper_value(target):
                for index, arg in enumerate(args):
                    yield from _contexts(arg, (*path, index + 1))
                    if not is_value(arg):
                        break
        case New(args=args):
            for index, arg in enumerate(args):
                yield from _contexts(arg, (*path, index))
                if not is_value(arg):
                    break
        case Cast(term=inner):
            yield from _contexts(inner, (*path, 0))
        case Cond(guard=guard):
            yield from _contexts(guard, (*path, 0))


def _redex_rule(ct: ClassTable, t: Term) -> str | None:
    try:
        match t:
            case FieldAccess(target=New() as target, field_name=f) if is_proper_value(target):
                fields = ct.fields(target.class_name)
                return E_PROJ_NEW if any(d.name == f for d in fields) else None
            case Invoke(target=target, method=m, args=args) if is_proper_value(target) and all(
                is_value(a) for a in args
            ):
                return _invoke_rule(ct, target, m)
            case Cast(term=PureLambda()):
                return E_CAST_LAMBDA
            case Cast(type=tau, term=New(class_name=name) as inner) if is_proper_value(inner):
                return E_CAST_NEW if subtype(ct, RefType((name,)), tau) else None
            case Cast(type=tau, term=DecoratedLambda(target=phi)):
                return E_CAST_LAMBDA_TARGET if subtype(ct, phi, tau) else None
            case Cast(type=BoolType(), term=BoolLit()):
                return E_CAST_BOOL
            case Cond(guard=BoolLit(value=value)):
                return E_IF_TRUE if value else E_IF_FALSE
    except ClassTableError:
        return None
    return None


def _invoke_rule(ct: ClassTable, target: Term, method: str) -> str | None:
    match target:
        case New(class_name=name):
            receiver = RefType((name,))
            if ct.mtype(method, receiver) is not None and ct.mbody(method, receiver) is not None:
                return E_INVK_NEW
        case DecoratedLambda(target=phi) as lam:
            if ct.a_mtype(method, phi) is not None:
                return E_INVK_LAMBDA_T if lam.is_typed else E_INVK_LAMBDA_U
            if ct.d_mtype(method, phi) is not None and ct.mbody(method, phi) is not None:
                return E_INVK_LAMBDA_D
    return None


def enumerate_redexes(ct: ClassTable, t: Term) -> list[tuple[Path, str]]:
    """Every evaluation-context position of ``t`` holding a redex, with its rule."""
    found: list[tuple[Path, str]] = []
    for path, sub in _contexts(t):
        rule = _redex_rule(ct, sub)
        if rule is not None:
            found.append((path, rule))
    return found


def nominal_pairs(ct: ClassTable) -> Iterator[tuple[str, str]]:
    """Every declared pair ``(sub, sup)`` with ``sub`` a nominal subtype of ``sup``."""
    names = (OBJECT, *ct.declared_names())
    for sub in names:
        for sup in names:
            if ct.is_nominal_subtype(sub, sup):
                yield sub, sup


def class_pairs(ct: ClassTable) -> Iterator[tuple[str, str]]:
    classes = {OBJECT, *(d.name for d in ct.classes())}
    for sub, sup in nominal_pairs(ct):
        if sub in classes and sup in classes:
            yield sub, sup


__all__ = [
    "SubtypeOracle",
    "class_pairs",
    "enumerate_redexes",
    "lookup_disagreements",
    "nominal_pairs",
]
