"""Abstract syntax of FJ&λ: pre-types, terms, declarations and typing environments.

Every node is an immutable, slotted dataclass. Source positions ride along on
nodes for error reporting but never take part in equality or hashing, so a
parsed term compares equal to the same term built by hand.
"""

from __future__ import annotations

import re
from collections.abc import Callable, Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Final, TypeAlias

OBJECT: Final[str] = "Object"
BOOLEAN_NAME: Final[str] = "boolean"
THIS: Final[str] = "this"

RESERVED_TYPE_NAMES: Final[frozenset[str]] = frozenset({OBJECT, BOOLEAN_NAME})
RESERVED_WORDS: Final[frozenset[str]] = frozenset(
    {
        "true",
        "false",
        THIS,
        "super",
        "new",
        "return",
        "class",
        "interface",
        "extends",
        "implements",
        "default",
    }
)

_IDENTIFIER = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


def is_identifier(text: str) -> bool:
    """Return True when ``text`` is lexically an identifier (reserved words included)."""
    return bool(_IDENTIFIER.match(text))


def is_user_identifier(text: str) -> bool:
    """Return True when ``text`` may name a user variable, field or method."""
    return is_identifier(text) and text not in RESERVED_WORDS and text not in RESERVED_TYPE_NAMES


@dataclass(frozen=True, slots=True)
class SourcePosition:
    """Line/column (both 1-based) of a node in its source text."""

    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


def _pos() -> SourcePosition | None:
    return field(default=None, compare=False, repr=False)  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# Pre-types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class RefType:
    """A nominal type or an intersection ``T1 & ... & Tn`` of nominal types.

    The atom order is kept exactly as written. Whether the leftmost atom is a
    class or an interface is a property of a class table, see
    ``ClassTable.split``.
    """

    atoms: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise ValueError("a reference type needs at least one nominal name")
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError(f"duplicate names in intersection {' & '.join(self.atoms)}")
        for index, atom in enumerate(self.atoms):
            if atom == BOOLEAN_NAME:
                raise ValueError("boolean cannot occur in an intersection")
            if atom == OBJECT and index != 0:
                raise ValueError("Object can only occur leftmost in an intersection")

    @property
    def is_nominal(self) -> bool:
        return len(self.atoms) == 1

    @property
    def name(self) -> str:
        """The single nominal name; only meaningful when ``is_nominal``."""
        if not self.is_nominal:
            raise ValueError(f"{self} is an intersection, not a nominal type")
        return self.atoms[0]

    def __str__(self) -> str:
        return " & ".join(self.atoms)


@dataclass(frozen=True, slots=True)
class BoolType:
    """The primitive type ``boolean``."""

    def __str__(self) -> str:
        return BOOLEAN_NAME


BOOLEAN: Final[BoolType] = BoolType()

PreType: TypeAlias = RefType | BoolType


def nominal(name: str) -> PreType:
    """Build the nominal type called ``name`` (``boolean`` included)."""
    if name == BOOLEAN_NAME:
        return BOOLEAN
    return RefType((name,))


def intersection(*names: str) -> RefType:
    """Build ``names[0] & names[1] & ...`` in the given order."""
    return RefType(tuple(names))


def is_nominal_type(tau: PreType) -> bool:
    """True for ``boolean`` and for single-atom reference types."""
    return isinstance(tau, BoolType) or tau.is_nominal


OBJECT_TYPE: Final[RefType] = RefType((OBJECT,))


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Param:
    """A λ parameter, untyped (``x``) or typed (``C x``)."""

    name: str
    declared_type: PreType | None = None
    pos: SourcePosition | None = _pos()

    def __post_init__(self) -> None:
        if self.declared_type is not None and not is_nominal_type(self.declared_type):
            raise ValueError(f"parameter '{self.name}' must have a nominal type")


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    pos: SourcePosition | None = _pos()


@dataclass(frozen=True, slots=True)
class FieldAccess:
    target: Term
    field_name: str
    pos: SourcePosition | None = _pos()


@dataclass(frozen=True, slots=True)
class Invoke:
    target: Term
    method: str
    args: tuple[Term, ...]
    pos: SourcePosition | None = _pos()


@dataclass(frozen=True, slots=True)
class New:
    class_name: str
    args: tuple[Term, ...]
    pos: SourcePosition | None = _pos()


@dataclass(frozen=True, slots=True)
class Cast:
    type: PreType
    term: Term
    pos: SourcePosition | None = _pos()


def _check_params(params: tuple[Param, ...]) -> None:
    names = [p.name for p in params]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate λ parameter names: {', '.join(names)}")
    typed = {p.declared_type is not None for p in params}
    if len(typed) > 1:
        raise ValueError("λ parameters must be all typed or all untyped")


@dataclass(frozen=True, slots=True)
class PureLambda:
    """A λ-expression as written in source, without a target type."""

    params: tuple[Param, ...]
    body: Term
    pos: SourcePosition | None = _pos()

    def __post_init__(self) -> None:
        _check_params(self.params)

    @property
    def is_typed(self) -> bool:
        return bool(self.params) and self.params[0].declared_type is not None


@dataclass(frozen=True, slots=True)
class DecoratedLambda:
    """A λ-expression annotated with the target type it was checked or cast against."""

    params: tuple[Param, ...]
    body: Term
    target: PreType
    pos: SourcePosition | None = _pos()

    def __post_init__(self) -> None:
        _check_params(self.params)

    @property
    def is_typed(self) -> bool:
        return bool(self.params) and self.params[0].declared_type is not None

    @property
    def pure(self) -> PureLambda:
        """The underlying λ without its decoration."""
        return PureLambda(self.params, self.body, pos=self.pos)


@dataclass(frozen=True, slots=True)
class Cond:
    guard: Term
    then: Term
    orelse: Term
    pos: SourcePosition | None = _pos()


@dataclass(frozen=True, slots=True)
class BoolLit:
    value: bool
    pos: SourcePosition | None = _pos()


Term: TypeAlias = (
    Var | FieldAccess | Invoke | New | Cast | PureLambda | DecoratedLambda | Cond | BoolLit
)


# ---------------------------------------------------------------------------
# Declarations
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class MethodHeader:
    """``T m(T1 x1, ..., Tn xn)``.

    Equality compares name, result and parameter types; parameter names are
    carried along but ignored, so headers that differ only in parameter names
    are the same header.
    """

    result: PreType
    name: str
    param_types: tuple[PreType, ...]
    param_names: tuple[str, ...] = field(default=(), compare=False)
    pos: SourcePosition | None = _pos()

    def __post_init__(self) -> None:
        if len(self.param_names) != len(self.param_types):
            raise ValueError(f"header '{self.name}' has mismatched parameter lists")
        for tau in (self.result, *self.param_types):
            if not is_nominal_type(tau):
                raise ValueError(f"header '{self.name}' mentions non-nominal type {tau}")

    @property
    def params(self) -> tuple[tuple[PreType, str], ...]:
        return tuple(zip(self.param_types, self.param_names, strict=True))

    def __str__(self) -> str:
        params = ", ".join(f"{t} {x}" for t, x in self.params)
        return f"{self.result} {self.name}({params})"


@dataclass(frozen=True, slots=True)
class MethodDecl:
    header: MethodHeader
    body: Term
    pos: SourcePosition | None = _pos()

    @property
    def name(self) -> str:
        return self.header.name


@dataclass(frozen=True, slots=True)
class FieldDecl:
    type: PreType
    name: str
    pos: SourcePosition | None = _pos()


@dataclass(frozen=True, slots=True)
class CtorDecl:
    """``C(T1 f1, ...) { super(g1, ...); this.f = f; ... }`` kept exactly as written."""

    name: str
    params: tuple[tuple[PreType, str], ...]
    super_args: tuple[str, ...]
    assignments: tuple[tuple[str, str], ...]
    pos: SourcePosition | None = _pos()


@dataclass(frozen=True, slots=True)
class ClassDecl:
    name: str
    superclass: str
    interfaces: tuple[str, ...]
    fields: tuple[FieldDecl, ...]
    ctor: CtorDecl
    methods: tuple[MethodDecl, ...]
    pos: SourcePosition | None = _pos()

    def method(self, name: str) -> MethodDecl | None:
        return next((m for m in self.methods if m.name == name), None)


@dataclass(frozen=True, slots=True)
class InterfaceDecl:
    name: str
    extends: tuple[str, ...]
    headers: tuple[MethodHeader, ...]
    defaults: tuple[MethodDecl, ...]
    pos: SourcePosition | None = _pos()

    def default(self, name: str) -> MethodDecl | None:
        return next((m for m in self.defaults if m.name == name), None)


Decl: TypeAlias = ClassDecl | InterfaceDecl


def default_ctor(name: str, inherited: Iterable[FieldDecl], own: Iterable[FieldDecl]) -> CtorDecl:
    """Build the canonical constructor for a class with the given fields."""
    inherited = tuple(inherited)
    own = tuple(own)
    return CtorDecl(
        name=name,
        params=tuple((f.type, f.name) for f in (*inherited, *own)),
        super_args=tuple(f.name for f in inherited),
        assignments=tuple((f.name, f.name) for f in own),
    )


# ---------------------------------------------------------------------------
# Typing environments
# ---------------------------------------------------------------------------


class TypeEnv(Mapping[str, PreType]):
    """Finite, ordered map from variables to nominal types.

    Environments are immutable; ``bind`` returns a new environment in which the
    new binding replaces any earlier one for the same name.
    """

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Mapping[str, PreType] | Iterable[tuple[str, PreType]] = ()):
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        self._bindings: dict[str, PreType] = {}
        for name, tau in items:
            if not is_nominal_type(tau):
                raise ValueError(f"variable '{name}' bound to non-nominal type {tau}")
            self._bindings[name] = tau

    def __getitem__(self, name: str) -> PreType:
        return self._bindings[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def lookup(self, name: str) -> PreType | None:
        return self._bindings.get(name)

    def bind(self, name: str, tau: PreType) -> TypeEnv:
        bindings = dict(self._bindings)
        bindings.pop(name, None)
        bindings[name] = tau
        return TypeEnv(bindings)

    def bind_all(self, names: Iterable[str], types: Iterable[PreType]) -> TypeEnv:
        env = self
        for name, tau in zip(names, types, strict=True):
            env = env.bind(name, tau)
        return env

    def without(self, name: str) -> TypeEnv:
        return TypeEnv((x, t) for x, t in self._bindings.items() if x != name)

    def __repr__(self) -> str:
        inner = ", ".join(f"{x}: {t}" for x, t in self._bindings.items())
        return f"TypeEnv({inner})"


EMPTY_ENV: Final[TypeEnv] = TypeEnv()


# ---------------------------------------------------------------------------
# Structural predicates and traversals
# ---------------------------------------------------------------------------


def is_pure_lambda(t: Term) -> bool:
    return isinstance(t, PureLambda)


def is_lambda(t: Term) -> bool:
    """Pure or decorated λ."""
    return isinstance(t, PureLambda | DecoratedLambda)


def is_proper_value(t: Term) -> bool:
    """``new C(v...)`` with value arguments, a decorated λ, or a boolean literal."""
    if isinstance(t, New):
        return all(is_value(arg) for arg in t.args)
    return isinstance(t, DecoratedLambda | BoolLit)


def is_value(t: Term) -> bool:
    """Proper values plus pure λs."""
    return isinstance(t, PureLambda) or is_proper_value(t)


def children(t: Term) -> tuple[Term, ...]:
    """Immediate subterms in left-to-right order (λ bodies included)."""
    match t:
        case FieldAccess(target=target):
            return (target,)
        case Invoke(target=target, args=args):
            return (target, *args)
        case New(args=args):
            return args
        case Cast(term=inner):
            return (inner,)
        case PureLambda(body=body) | DecoratedLambda(body=body):
            return (body,)
        case Cond(guard=guard, then=then, orelse=orelse):
            return (guard, then, orelse)
    return ()


def map_children(t: Term, fn: Callable[[Term], Term]) -> Term:
    """Rebuild ``t`` with ``fn`` applied to each immediate subterm."""
    match t:
        case FieldAccess(target, name, pos):
            return FieldAccess(fn(target), name, pos)
        case Invoke(target, method, args, pos):
            return Invoke(fn(target), method, tuple(fn(a) for a in args), pos)
        case New(class_name, args, pos):
            return New(class_name, tuple(fn(a) for a in args), pos)
        case Cast(tau, inner, pos):
            return Cast(tau, fn(inner), pos)
        case PureLambda(params, body, pos):
            return PureLambda(params, fn(body), pos)
        case DecoratedLambda(params, body, target, pos):
            return DecoratedLambda(params, fn(body), target, pos)
        case Cond(guard, then, orelse, pos):
            return Cond(fn(guard), fn(then), fn(orelse), pos)
    return t


def subterms(t: Term) -> Iterator[Term]:
    """All subterms of ``t`` in pre-order, ``t`` first."""
    stack = [t]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed(children(current)))


def term_size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def free_vars(t: Term) -> frozenset[str]:
    """Variables occurring free in ``t``; λ parameters bind in the body."""
    match t:
        case Var(name=name):
            return frozenset({name})
        case PureLambda(params=params, body=body) | DecoratedLambda(params=params, body=body):
            return free_vars(body) - {p.name for p in params}
    result: frozenset[str] = frozenset()
    for child in children(t):
        result |= free_vars(child)
    return result
