"""Random generation of well-formed class tables and well-typed terms.

Tables are generated then checked: declarations are drawn in order, each one
validated against the table built so far, abstract methods a class inherits
without a body get one, and the result must pass ``ok_table``. Terms are
generated type-directed, inverting the typing rules, so every draw is typed
by construction and verified by the checker before it is handed out.

Method names carry a global index in order of first declaration and a body
only invokes methods with a lower index, so tables add no recursion of their
own. A main term can still diverge by applying a λ to itself; the properties
report such runs as inconclusive.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import TypeVar

import numpy as np

from fjlambda.class_table import ClassTable
from fjlambda.errors import (
    AmbiguousDefaultError,
    ClassTableError,
    GenerationBudgetError,
)
from fjlambda.harness.config import GenConfig
from fjlambda.syntax import (
    BOOLEAN,
    EMPTY_ENV,
    OBJECT,
    OBJECT_TYPE,
    THIS,
    BoolLit,
    BoolType,
    Cast,
    ClassDecl,
    Cond,
    Decl,
    FieldAccess,
    FieldDecl,
    InterfaceDecl,
    Invoke,
    MethodDecl,
    MethodHeader,
    New,
    Param,
    PreType,
    PureLambda,
    RefType,
    Term,
    TypeEnv,
    Var,
    default_ctor,
)
from fjlambda.subtyping import class_component, subtype
from fjlambda.typecheck import T_UDCAST, TypeChecker
from fjlambda.wellformed import ok_table

logger = logging.getLogger(__name__)

_T = TypeVar("_T")

INF = math.inf

PLACEHOLDER: Term = New(OBJECT, ())


class NoTermError(Exception):
    """No term of the requested type is reachable from the current state."""


def method_order(ct: ClassTable) -> dict[str, int]:
    """Global index of every method name, in order of first declaration."""
    order: dict[str, int] = {}
    for decl in ct:
        if isinstance(decl, ClassDecl):
            names = [m.name for m in decl.methods]
        else:
            names = [h.name for h in decl.headers] + [m.name for m in decl.defaults]
        for name in names:
            order.setdefault(name, len(order))
    return order


class Inhabitation:
    """Smallest generation depth at which each type has a closed term.

    ``synth`` ranks terms whose synthesised type is a subtype; ``check`` also
    admits λs, which only appear where a target type is pushed in. Computed
    as a fixpoint over the nominal types of the table.
    """

    def __init__(self, ct: ClassTable, *, casts: bool = True, lambdas: bool = True) -> None:
        self.ct = ct
        self.casts = casts
        self.lambdas = lambdas
        names = (OBJECT, *ct.declared_names())
        self.synth: dict[str, float] = {name: INF for name in names}
        self.check: dict[str, float] = {name: INF for name in names}
        self.synth[OBJECT] = self.check[OBJECT] = 0
        changed = True
        while changed:
            changed = False
            for name in names[1:]:
                nominal = RefType((name,))
                synth = self._synth_rank(nominal)
                check = min(synth, self.lambda_rank(nominal))
                if synth < self.synth[name] or check < self.check[name]:
                    self.synth[name] = min(synth, self.synth[name])
                    self.check[name] = min(check, self.check[name])
                    changed = True

    def _class_rank(self, name: str) -> float:
        if name == OBJECT:
            return 0
        fields = self.ct.fields(name)
        return 1 + max((self.rank(f.type, check=True) for f in fields), default=0)

    def _synth_rank(self, tau: RefType) -> float:
        best = min(
            (
                self._class_rank(d.name)
                for d in self.ct.classes()
                if subtype(self.ct, RefType((d.name,)), tau)
            ),
            default=INF,
        )
        if self.casts:
            best = min(best, 1 + self.lambda_rank(tau))
        return best

    def lambda_rank(self, tau: PreType) -> float:
        if not self.lambdas or isinstance(tau, BoolType):
            return INF
        header = self.ct.is_functional(tau)
        if header is None:
            return INF
        return 1 + self.rank(header.result, check=True)

    def rank(self, tau: PreType, *, check: bool) -> float:
        if isinstance(tau, BoolType):
            return 0
        if tau.is_nominal:
            table = self.check if check else self.synth
            return table.get(tau.name, INF)
        synth = self._synth_rank(tau)
        return min(synth, self.lambda_rank(tau)) if check else synth

    def inhabited(self, tau: PreType, *, check: bool = True) -> bool:
        return self.rank(tau, check=check) < INF


class Generator:
    """Seeded source of random tables and terms.

    All randomness comes from one ``numpy.random.Generator`` seeded from the
    configuration, so equal seeds give equal output.
    """

    def __init__(self, cfg: GenConfig, rng: np.random.Generator | None = None) -> None:
        self.cfg = cfg
        self.rng = rng if rng is not None else np.random.default_rng(cfg.seed)

    # -- randomness -----------------------------------------------------------

    def chance(self, p: float) -> bool:
        return bool(self.rng.random() < p)

    def pick(self, items: Sequence[_T]) -> _T:
        return items[int(self.rng.integers(len(items)))]

    def upto(self, n: int) -> int:
        return int(self.rng.integers(0, n + 1))

    def subset(self, items: Sequence[_T], at_most: int) -> tuple[_T, ...]:
        k = self.upto(min(at_most, len(items)))
        if k == 0:
            return ()
        chosen = sorted(int(i) for i in self.rng.choice(len(items), size=k, replace=False))
        return tuple(items[i] for i in chosen)

    def weighted(self, options: Sequence[str]) -> str:
        weights = np.array([max(self.cfg.weights.get(o, 1.0), 0.0) for o in options], dtype=float)
        if weights.sum() <= 0:
            return self.pick(options)
        return options[int(self.rng.choice(len(options), p=weights / weights.sum()))]

    # -- tables ---------------------------------------------------------------

    def table(self) -> ClassTable:
        """A class table passing ``ok_table``.

        Raises:
            GenerationBudgetError: ``max_attempts`` tables were discarded.
        """
        for attempt in range(self.cfg.max_attempts):
            try:
                ct = _TableBuilder(self).build()
            except (ClassTableError, NoTermError) as exc:
                logger.debug("table attempt %d discarded: %s", attempt, exc)
                continue
            problems = ok_table(ct)
            if not problems:
                logger.debug("generated %r after %d attempt(s)", ct, attempt + 1)
                return ct
            logger.debug("table attempt %d not well formed: %s", attempt, problems[0])
        raise GenerationBudgetError(
            f"no well-formed table after {self.cfg.max_attempts} attempts",
            context=f"seed {self.cfg.seed}",
        )

    # -- terms ----------------------------------------------------------------

    def terms(self, ct: ClassTable) -> TermGenerator:
        return TermGenerator(self, ct)

    def typed_term(self, ct: ClassTable) -> tuple[Term, PreType]:
        """A closed term together with its synthesised type.

        Raises:
            GenerationBudgetError: No acceptable term within ``max_attempts``.
        """
        terms = self.terms(ct)
        for _ in range(self.cfg.max_attempts):
            target = terms.random_target()
            try:
                t = terms.synth(EMPTY_ENV, target, self.cfg.max_term_depth)
            except NoTermError:
                continue
            found = terms.accept(EMPTY_ENV, t)
            if found is not None:
                return t, found
        raise GenerationBudgetError(
            f"no typed term after {self.cfg.max_attempts} attempts", context=f"seed {self.cfg.seed}"
        )

    def open_term(self, ct: ClassTable) -> OpenTerm:
        """A term checked against a type under a small random environment."""
        terms = self.terms(ct)
        for _ in range(self.cfg.max_attempts):
            env = terms.random_env()
            if not env:
                continue
            target = terms.random_target(check=True)
            try:
                t = terms.check(env, target, self.cfg.max_term_depth - 1)
            except NoTermError:
                continue
            judgement = terms.checker.t_ck(env, t, target)
            if judgement.ok and (self.cfg.udcast or T_UDCAST not in judgement.rule_trace):
                return OpenTerm(env, t, target)
        raise GenerationBudgetError(
            f"no open term after {self.cfg.max_attempts} attempts", context=f"seed {self.cfg.seed}"
        )


@dataclass(frozen=True, slots=True)
class OpenTerm:
    """A term ``t`` with ``env ⊢* t : target``."""

    env: TypeEnv
    term: Term
    target: PreType


class _TableBuilder:
    def __init__(self, gen: Generator) -> None:
        self.gen = gen
        self.cfg = gen.cfg
        self.decls: list[Decl] = []
        self.depth: dict[str, int] = {OBJECT: 0}
        self.methods = itertools.count()
        self.fields = itertools.count()
        self.ranks = Inhabitation(ClassTable([]), casts=self.cfg.casts, lambdas=self.cfg.lambdas)

    def _table(self, extra: Decl | None = None) -> ClassTable:
        decls = [*self.decls, extra] if extra is not None else self.decls
        return ClassTable(decls)

    def _commit(self, decl: Decl) -> None:
        self.decls.append(decl)
        self.ranks = Inhabitation(self._table(), casts=self.cfg.casts, lambdas=self.cfg.lambdas)

    def _member_type(self) -> PreType:
        candidates: list[PreType] = [BOOLEAN, OBJECT_TYPE]
        for decl in self.decls:
            nominal = RefType((decl.name,))
            if self.ranks.inhabited(nominal):
                candidates.append(nominal)
        return self.gen.pick(candidates)

    def _header(self) -> MethodHeader:
        arity = self.gen.upto(self.cfg.max_params)
        return MethodHeader(
            result=self._member_type(),
            name=f"m{next(self.methods)}",
            param_types=tuple(self._member_type() for _ in range(arity)),
            param_names=tuple(f"x{i}" for i in range(arity)),
        )

    def _names(self, kind: type) -> list[str]:
        return [d.name for d in self.decls if isinstance(d, kind)]

    def interface(self, index: int) -> None:
        name = f"I{index}"
        own_abstract = 1 if self.gen.chance(0.6) else self.gen.upto(self.cfg.max_methods)
        headers = tuple(self._header() for _ in range(own_abstract))
        defaults: list[MethodDecl] = []
        extends = self.gen.subset(self._names(InterfaceDecl), 2)
        if self.cfg.defaults and self.gen.chance(0.5):
            defaults.append(MethodDecl(self._header(), PLACEHOLDER))
        fresh = tuple(defaults)
        inherited = self._table().d_mh(RefType(extends)) if extends else None
        if self.cfg.defaults and inherited and self.gen.chance(0.2):
            defaults.append(MethodDecl(self.gen.pick(list(inherited)), PLACEHOLDER))
        decl = InterfaceDecl(name, extends, headers, tuple(defaults))
        if not self._table(decl).is_type(RefType((name,))):
            decl = InterfaceDecl(name, (), headers, fresh)
        self._commit(self._disambiguate(decl))

    def _disambiguate(self, decl: InterfaceDecl) -> InterfaceDecl:
        """Override every inherited default that several parents provide."""
        ct = self._table(decl)
        tau = RefType((decl.name,))
        defaults = list(decl.defaults)
        own = {m.name for m in defaults}
        for header in ct.d_mh(tau) or ():
            if header.name in own:
                continue
            try:
                ct.mbody(header.name, tau)
            except AmbiguousDefaultError:
                defaults.append(MethodDecl(header, PLACEHOLDER))
        return InterfaceDecl(decl.name, decl.extends, decl.headers, tuple(defaults))

    def klass(self, index: int) -> None:
        name = f"C{index}"
        supers = [c for c in self._names(ClassDecl) if self.depth[c] < self.cfg.max_hierarchy_depth]
        superclass = self.gen.pick([OBJECT, *supers])
        interfaces = self.gen.subset(self._names(InterfaceDecl), 2)
        own_fields = tuple(
            FieldDecl(self._member_type(), f"f{next(self.fields)}")
            for _ in range(self.gen.upto(self.cfg.max_fields))
        )
        inherited = self._table().fields(superclass)
        methods = [
            MethodDecl(self._header(), PLACEHOLDER)
            for _ in range(self.gen.upto(self.cfg.max_methods))
        ]
        super_headers = self._table().mh(RefType((superclass,)))
        if super_headers:
            for header in super_headers:
                if self.gen.chance(0.25):
                    methods.append(MethodDecl(header, PLACEHOLDER))

        def build(implements: tuple[str, ...], members: list[MethodDecl]) -> ClassDecl:
            return ClassDecl(
                name,
                superclass,
                implements,
                own_fields,
                default_ctor(name, inherited, own_fields),
                tuple(members),
            )

        decl = build(interfaces, methods)
        if self._table(decl).mh(RefType((name,))) is None:
            decl = build((), methods)
        ct = self._table(decl)
        headers = ct.require_mh(RefType((name,)))
        own = {m.name for m in methods}
        for header in headers:
            if header.name in own:
                continue
            try:
                found = ct.mbody(header.name, RefType((name,)))
            except AmbiguousDefaultError:
                found = None
            if found is None:
                methods.append(MethodDecl(header, PLACEHOLDER))
        self.depth[name] = self.depth[superclass] + 1
        self._commit(build(decl.interfaces, methods))

    def build(self) -> ClassTable:
        n_interfaces = self.gen.upto(self.cfg.max_interfaces)
        n_classes = 1 + self.gen.upto(self.cfg.max_classes - 1)
        kinds = ["I"] * n_interfaces + ["C"] * n_classes
        counters = {"I": itertools.count(), "C": itertools.count()}
        for position in self.gen.rng.permutation(len(kinds)):
            kind = kinds[int(position)]
            if kind == "I":
                self.interface(next(counters["I"]))
            else:
                self.klass(next(counters["C"]))
        return self._with_bodies(self._table())

    def _with_bodies(self, skeleton: ClassTable) -> ClassTable:
        terms = TermGenerator(self.gen, skeleton)
        depth = max(1, self.cfg.max_term_depth // 2)

        def body(owner: str, method: MethodDecl) -> MethodDecl:
            header = method.header
            env = TypeEnv(zip(header.param_names, header.param_types, strict=True)).bind(
                THIS, RefType((owner,))
            )
            terms.limit = terms.order[header.name]
            for attempt in range(3):
                try:
                    t = terms.check(env, header.result, depth if attempt < 2 else 0)
                except NoTermError:
                    continue
                if terms.accept(env, t, header.result) is not None:
                    return MethodDecl(header, t, method.pos)
            raise NoTermError(f"no body for {owner}.{header.name}")

        decls: list[Decl] = []
        for decl in skeleton:
            if isinstance(decl, ClassDecl):
                methods = tuple(body(decl.name, m) for m in decl.methods)
                decls.append(
                    ClassDecl(
                        decl.name, decl.superclass, decl.interfaces, decl.fields, decl.ctor, methods
                    )
                )
            else:
                defaults = tuple(body(decl.name, m) for m in decl.defaults)
                decls.append(InterfaceDecl(decl.name, decl.extends, decl.headers, defaults))
        return ClassTable(decls)


class TermGenerator:
    """Type-directed term generation over one class table.

    ``check`` produces terms that check against a type (λs allowed);
    ``synth`` produces terms whose synthesised type is a subtype of the
    requested one. Both fall back to the smallest inhabitant at depth zero.
    """

    def __init__(self, gen: Generator, ct: ClassTable) -> None:
        self.gen = gen
        self.cfg = gen.cfg
        self.ct = ct
        self.checker = TypeChecker(ct)
        self.ranks = Inhabitation(ct, casts=self.cfg.casts, lambdas=self.cfg.lambdas)
        self.order = method_order(ct)
        self.limit: float = INF
        self._vars = itertools.count()
        self._nominals: list[RefType] = [RefType((n,)) for n in (OBJECT, *ct.declared_names())]
        self._classes: list[str] = [OBJECT, *(d.name for d in ct.classes())]

    # -- helpers --------------------------------------------------------------

    def fresh(self) -> str:
        return f"y{next(self._vars)}"

    def accept(self, env: TypeEnv, t: Term, target: PreType | None = None) -> PreType | None:
        """The synthesised type of ``t`` if it is acceptable output, else None."""
        judgement = (
            self.checker.t_inf(env, t) if target is None else self.checker.t_ck(env, t, target)
        )
        if not judgement.ok:
            logger.debug("generated term rejected: %s", judgement.error)
            return None
        if not self.cfg.udcast and T_UDCAST in judgement.rule_trace:
            return None
        return judgement.type

    def random_target(self, *, check: bool = False) -> PreType:
        candidates: list[PreType] = [BOOLEAN]
        candidates += [n for n in self._nominals if self.ranks.inhabited(n, check=check)]
        if self.cfg.intersections:
            candidates += [t for t in self._intersections() if self.ranks.inhabited(t, check=check)]
        return self.gen.pick(candidates)

    def random_env(self) -> TypeEnv:
        types: list[PreType] = [BOOLEAN]
        types += [n for n in self._nominals if self.ranks.inhabited(n)]
        count = 1 + self.gen.upto(1)
        return TypeEnv((self.fresh(), self.gen.pick(types)) for _ in range(count))

    def _intersections(self) -> list[RefType]:
        found: list[RefType] = []
        interfaces = [d.name for d in self.ct.interfaces()]
        for head in (*self._classes[1:], *interfaces):
            for other in interfaces:
                if other == head:
                    continue
                try:
                    tau = RefType((head, other))
                except ValueError:
                    continue
                if self.ct.is_type(tau) and self._unambiguous(tau):
                    found.append(tau)
        return found

    def _unambiguous(self, tau: RefType) -> bool:
        try:
            for header in self.ct.d_mh(tau) or ():
                self.ct.mbody(header.name, tau)
        except AmbiguousDefaultError:
            return False
        return True

    def _vars_of(self, env: TypeEnv, tau: PreType) -> list[str]:
        return [x for x, sigma in env.items() if subtype(self.ct, sigma, tau)]

    def _classes_below(self, tau: PreType) -> list[str]:
        if isinstance(tau, BoolType):
            return []
        return [
            c
            for c in self._classes
            if subtype(self.ct, RefType((c,)), tau)
            and self.ranks.inhabited(RefType((c,)), check=False)
        ]

    def _invokable(self, tau: PreType) -> list[tuple[RefType, MethodHeader]]:
        found: list[tuple[RefType, MethodHeader]] = []
        for receiver in self._nominals:
            if not self.ranks.inhabited(receiver, check=False):
                continue
            headers = self.ct.mh(receiver)
            for header in headers or ():
                if self.order.get(header.name, INF) >= self.limit:
                    continue
                if not subtype(self.ct, header.result, tau):
                    continue
                if all(self.ranks.inhabited(p) for p in header.param_types):
                    found.append((receiver, header))
        return found

    def _fields_of(self, tau: PreType) -> list[tuple[str, FieldDecl]]:
        found: list[tuple[str, FieldDecl]] = []
        for owner in self._classes[1:]:
            if not self.ranks.inhabited(RefType((owner,)), check=False):
                continue
            for f in self.ct.fields(owner):
                if subtype(self.ct, f.type, tau):
                    found.append((owner, f))
        return found

    def _cast_targets(self, tau: PreType) -> list[PreType]:
        if isinstance(tau, BoolType):
            return [BOOLEAN]
        targets: list[PreType] = []
        if self.ranks.inhabited(tau):
            targets.append(tau)
        targets += [
            n
            for n in self._nominals
            if n != tau and subtype(self.ct, n, tau) and self.ranks.inhabited(n)
        ]
        if self.cfg.intersections:
            targets += [
                t
                for t in self._intersections()
                if subtype(self.ct, t, tau) and self.ranks.inhabited(t)
            ]
        return targets

    # -- productions ----------------------------------------------------------

    def _productions(self, env: TypeEnv, tau: PreType, *, check: bool) -> list[str]:
        options: list[str] = []
        if self._vars_of(env, tau):
            options.append("var")
        if isinstance(tau, BoolType):
            options.append("bool")
        if self._classes_below(tau):
            options.append("new")
        if check and self.ranks.lambda_rank(tau) < INF:
            options.append("lambda")
        if self._invokable(tau):
            options.append("invoke")
        if self._fields_of(tau):
            options.append("field")
        if self.cfg.casts and self._cast_targets(tau):
            options.append("cast")
        if self.cfg.conditionals:
            options.append("cond")
        return options

    def check(self, env: TypeEnv, tau: PreType, depth: int) -> Term:
        """A term ``t`` with ``env ⊢* t : tau``."""
        return self._generate(env, tau, depth, check=True)

    def synth(self, env: TypeEnv, tau: PreType, depth: int) -> Term:
        """A term whose synthesised type under ``env`` is a subtype of ``tau``."""
        return self._generate(env, tau, depth, check=False)

    def _generate(self, env: TypeEnv, tau: PreType, depth: int, *, check: bool) -> Term:
        if depth <= 0:
            return self.base(env, tau, check=check)
        options = self._productions(env, tau, check=check)
        while options:
            choice = self.gen.weighted(options)
            try:
                return self._build(choice, env, tau, depth, check=check)
            except NoTermError:
                options.remove(choice)
        return self.base(env, tau, check=check)

    def _build(self, choice: str, env: TypeEnv, tau: PreType, depth: int, *, check: bool) -> Term:
        below = depth - 1
        match choice:
            case "var":
                return Var(self.gen.pick(self._vars_of(env, tau)))
            case "bool":
                return BoolLit(self.gen.chance(0.5))
            case "new":
                owner = self.gen.pick(self._classes_below(tau))
                args = tuple(self.check(env, f.type, below) for f in self.ct.fields(owner))
                return New(owner, args)
            case "lambda":
                return self._lambda(env, tau, below)
            case "invoke":
                receiver_type, header = self.gen.pick(self._invokable(tau))
                receiver = self.synth(env, receiver_type, below)
                args = tuple(self.check(env, p, below) for p in header.param_types)
                return Invoke(receiver, header.name, args)
            case "field":
                owner, f = self.gen.pick(self._fields_of(tau))
                return FieldAccess(self.synth(env, RefType((owner,)), below), f.name)
            case "cast":
                return self._cast(env, tau, below)
            case "cond":
                guard = self.check(env, BOOLEAN, below)
                branch = self.check if check else self.synth
                return Cond(guard, branch(env, tau, below), branch(env, tau, below))
        raise NoTermError(choice)

    def _lambda(self, env: TypeEnv, tau: PreType, depth: int, *, base: bool = False) -> PureLambda:
        header = self.ct.is_functional(tau)
        if header is None:
            raise NoTermError(f"{tau} is not functional")
        names = tuple(self.fresh() for _ in header.param_types)
        typed = self.gen.chance(0.3)
        params = tuple(
            Param(x, p if typed else None) for x, p in zip(names, header.param_types, strict=True)
        )
        inner = env.bind_all(names, header.param_types)
        if base:
            body = self.base(inner, header.result, check=True)
        else:
            body = self.check(inner, header.result, depth)
        return PureLambda(params, body)

    def _cast(self, env: TypeEnv, tau: PreType, depth: int) -> Term:
        targets = self._cast_targets(tau)
        if not targets:
            raise NoTermError(f"no cast target below {tau}")
        kappa = self.gen.pick(targets)
        if not self.cfg.udcast or isinstance(kappa, BoolType) or not self.gen.chance(0.5):
            return Cast(kappa, self.check(env, kappa, depth))
        head = class_component(self.ct, kappa)
        source = self.gen.pick(
            [RefType((c,)) for c in self.ct.superclasses(head)]
            + [n for n in self._nominals if self.ct.is_interface(n.name)]
        )
        if not self.ranks.inhabited(source, check=False):
            raise NoTermError(f"{source} is not inhabited")
        operand = self.synth(env, source, depth)
        judgement = self.checker.t_inf(env, operand)
        if not judgement.ok or isinstance(judgement.type, BoolType):
            raise NoTermError("downcast operand has no reference type")
        found = class_component(self.ct, judgement.type)
        if not (self.ct.is_nominal_subtype(found, head) or self.ct.is_nominal_subtype(head, found)):
            operand = Cast(OBJECT_TYPE, operand)
        return Cast(kappa, operand)

    # -- base cases -----------------------------------------------------------

    def base(self, env: TypeEnv, tau: PreType, *, check: bool) -> Term:
        """The smallest inhabitant of ``tau``, or a variable when one fits."""
        variables = self._vars_of(env, tau)
        if variables and self.gen.chance(0.5):
            return Var(self.gen.pick(variables))
        if isinstance(tau, BoolType):
            return BoolLit(self.gen.chance(0.5))
        lam = self.ranks.lambda_rank(tau)
        classes = self._classes_below(tau)
        best_class = min(classes, key=lambda c: self.ranks.synth[c], default=None)
        class_rank = self.ranks.synth[best_class] if best_class is not None else INF
        if check and lam <= class_rank and lam < INF:
            return self._lambda(env, tau, 0, base=True)
        if best_class is not None:
            return New(
                best_class,
                tuple(self.base(env, f.type, check=True) for f in self.ct.fields(best_class)),
            )
        if self.cfg.casts and lam < INF:
            return Cast(tau, self._lambda(env, tau, 0, base=True))
        if variables:
            return Var(self.gen.pick(variables))
        raise NoTermError(f"no inhabitant of {tau}")

    def value(self, tau: PreType, depth: int) -> Term:
        """A closed value ``v`` (possibly a pure λ) with ``⊢* v : tau``."""
        if isinstance(tau, BoolType):
            return BoolLit(self.gen.chance(0.5))
        classes = self._classes_below(tau)
        lam = self.ranks.lambda_rank(tau)
        options: list[str] = []
        if classes:
            options.append("new")
        if lam < INF:
            options.append("lambda")
        if not options:
            raise NoTermError(f"no value of {tau}")
        if depth <= 0:
            best = min(classes, key=lambda c: self.ranks.synth[c], default=None)
            use_lambda = best is None or lam < self.ranks.synth[best]
            choice = "lambda" if use_lambda else "new"
        else:
            choice = self.gen.pick(options)
        if choice == "lambda":
            return self._lambda(EMPTY_ENV, tau, depth - 1, base=depth <= 0)
        if depth <= 0:
            owner = min(classes, key=lambda c: self.ranks.synth[c])
        else:
            owner = self.gen.pick(classes)
        return New(owner, tuple(self.value(f.type, depth - 1) for f in self.ct.fields(owner)))


def gen_table(cfg: GenConfig) -> ClassTable:
    """A well-formed class table drawn from ``cfg``."""
    return Generator(cfg).table()


def gen_typed_term(cfg: GenConfig, ct: ClassTable) -> tuple[Term, PreType]:
    """A closed term over ``ct`` and its synthesised type."""
    return Generator(cfg).typed_term(ct)


__all__ = [
    "Generator",
    "Inhabitation",
    "NoTermError",
    "OpenTerm",
    "TermGenerator",
    "gen_table",
    "gen_typed_term",
    "method_order",
]
