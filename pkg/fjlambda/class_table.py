"""Class table construction and the lookup functions over it.

A ``ClassTable`` maps nominal names to declarations. ``Object`` is always
present implicitly with no fields and no methods. All lookups are pure;
results are memoised per table behind a lock so a table can be shared
between threads.
"""

from __future__ import annotations

import logging
import threading
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass
from typing import Any, TypeVar

from fjlambda.errors import (
    AmbiguousDefaultError,
    CyclicInheritanceError,
    HeaderConflictError,
    MalformedDeclarationError,
    UnknownNameError,
)
from fjlambda.parser import SourceProgram
from fjlambda.syntax import (
    OBJECT,
    RESERVED_TYPE_NAMES,
    BoolType,
    ClassDecl,
    Decl,
    FieldDecl,
    InterfaceDecl,
    MethodHeader,
    PreType,
    RefType,
    Term,
)
from fjlambda.utils import Timer

logger = logging.getLogger(__name__)

_T = TypeVar("_T")

MethodType = tuple[tuple[PreType, ...], PreType]


class HeaderSet:
    """A set of method headers with at most one header per method name.

    Iteration yields headers in insertion order. Equality is set equality of
    headers, and a HeaderSet also compares equal to a plain set of headers.
    """

    __slots__ = ("_by_name",)

    def __init__(self, headers: Iterable[MethodHeader] = ()) -> None:
        self._by_name: dict[str, MethodHeader] = {}
        for header in headers:
            self._add(header)

    def _add(self, header: MethodHeader) -> None:
        existing = self._by_name.get(header.name)
        if existing is None:
            self._by_name[header.name] = header
        elif existing != header:
            raise HeaderConflictError(header.name, str(existing), str(header))

    def union(self, other: HeaderSet) -> HeaderSet:
        """The partial union: defined only when shared names carry identical headers."""
        merged = HeaderSet(self)
        for header in other:
            merged._add(header)
        return merged

    def get(self, name: str) -> MethodHeader | None:
        return self._by_name.get(name)

    @property
    def names(self) -> frozenset[str]:
        return frozenset(self._by_name)

    def issubset(self, other: HeaderSet) -> bool:
        return all(other.get(h.name) == h for h in self)

    def __iter__(self) -> Iterator[MethodHeader]:
        return iter(self._by_name.values())

    def __len__(self) -> int:
        return len(self._by_name)

    def __contains__(self, header: object) -> bool:
        return isinstance(header, MethodHeader) and self._by_name.get(header.name) == header

    def __eq__(self, other: object) -> bool:
        if isinstance(other, HeaderSet):
            return frozenset(self) == frozenset(other)
        if isinstance(other, set | frozenset):
            return frozenset(self) == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self))

    def __repr__(self) -> str:
        return "{" + ", ".join(str(h) for h in self) + "}"


EMPTY_HEADERS = HeaderSet()


@dataclass(frozen=True, slots=True)
class MethodBody:
    """Result of body lookup: parameter names, body, and the declaring type."""

    params: tuple[str, ...]
    body: Term
    owner: str


class ClassTable:
    """Immutable class table with memoised lookups.

    Args:
        decls: Class and interface declarations, in source order.
        memoize: Cache lookup results. ``False`` recomputes every query, which
            the harness uses as an oracle for the cached path.

    Raises:
        UnknownNameError: A superclass or superinterface is not declared.
        MalformedDeclarationError: Wrong declaration kinds or predefined names.
        CyclicInheritanceError: The inheritance graph has a cycle.
    """

    def __init__(self, decls: Iterable[Decl], *, memoize: bool = True) -> None:
        self._decls: dict[str, Decl] = {}
        for decl in decls:
            if decl.name in RESERVED_TYPE_NAMES:
                raise MalformedDeclarationError(
                    f"'{decl.name}' is predefined and cannot be declared", position=decl.pos
                )
            if decl.name in self._decls:
                raise MalformedDeclarationError(
                    f"'{decl.name}' is declared twice", position=decl.pos
                )
            self._decls[decl.name] = decl
        self.memoize = memoize
        self._memo: dict[tuple[Any, ...], Any] = {}
        self._lock = threading.RLock()
        with Timer(f"class table ({len(self._decls)} declarations)"):
            self._check_references()
            self._check_acyclic()
            self._ancestors = self._compute_ancestors()

    @classmethod
    def from_program(cls, program: SourceProgram, *, memoize: bool = True) -> ClassTable:
        return cls(program.decls, memoize=memoize)

    def without_memo(self) -> ClassTable:
        """A copy of this table that never caches."""
        return ClassTable(self._decls.values(), memoize=False)

    # -- construction checks ------------------------------------------------

    def _check_references(self) -> None:
        for decl in self._decls.values():
            if isinstance(decl, ClassDecl):
                if decl.superclass != OBJECT and not self.is_class(decl.superclass):
                    self._reference_error(decl, decl.superclass, "extend", "a class")
                for name in decl.interfaces:
                    if not self.is_interface(name):
                        self._reference_error(decl, name, "implement", "an interface")
            else:
                for name in decl.extends:
                    if not self.is_interface(name):
                        self._reference_error(decl, name, "extend", "an interface")

    def _reference_error(self, decl: Decl, name: str, verb: str, kind: str) -> None:
        if name not in self._decls and name != OBJECT:
            raise UnknownNameError(name, position=decl.pos, context=f"declaration of {decl.name}")
        raise MalformedDeclarationError(
            f"{decl.name} cannot {verb} '{name}': not {kind}", position=decl.pos
        )

    def parents(self, name: str) -> tuple[str, ...]:
        """Direct supertypes as declared (``Object`` omitted)."""
        decl = self._decls.get(name)
        if decl is None:
            return ()
        if isinstance(decl, ClassDecl):
            sup = () if decl.superclass == OBJECT else (decl.superclass,)
            return (*sup, *decl.interfaces)
        return decl.extends

    def _check_acyclic(self) -> None:
        state: dict[str, int] = {}  # 1 = on stack, 2 = done
        path: list[str] = []

        def visit(name: str) -> None:
            state[name] = 1
            path.append(name)
            for parent in self.parents(name):
                if state.get(parent) == 1:
                    cycle = path[path.index(parent) :] + [parent]
                    raise CyclicInheritanceError(cycle, position=self._decls[name].pos)
                if parent not in state:
                    visit(parent)
            path.pop()
            state[name] = 2

        for name in self._decls:
            if name not in state:
                visit(name)

    def _compute_ancestors(self) -> dict[str, frozenset[str]]:
        result: dict[str, frozenset[str]] = {OBJECT: frozenset({OBJECT})}

        def ancestors(name: str) -> frozenset[str]:
            if name not in result:
                acc = {name, OBJECT}
                for parent in self.parents(name):
                    acc |= ancestors(parent)
                result[name] = frozenset(acc)
            return result[name]

        for name in self._decls:
            ancestors(name)
        return result

    # -- declarations -------------------------------------------------------

    def __contains__(self, name: object) -> bool:
        return name == OBJECT or name in self._decls

    def __iter__(self) -> Iterator[Decl]:
        return iter(self._decls.values())

    def __len__(self) -> int:
        return len(self._decls)

    def declared_names(self) -> tuple[str, ...]:
        return tuple(self._decls)

    def classes(self) -> tuple[ClassDecl, ...]:
        return tuple(d for d in self._decls.values() if isinstance(d, ClassDecl))

    def interfaces(self) -> tuple[InterfaceDecl, ...]:
        return tuple(d for d in self._decls.values() if isinstance(d, InterfaceDecl))

    def decl(self, name: str) -> Decl:
        try:
            return self._decls[name]
        except KeyError:
            raise UnknownNameError(name) from None

    def is_class(self, name: str) -> bool:
        return name == OBJECT or isinstance(self._decls.get(name), ClassDecl)

    def is_interface(self, name: str) -> bool:
        return isinstance(self._decls.get(name), InterfaceDecl)

    def require_known(self, name: str) -> None:
        if name not in self:
            raise UnknownNameError(name)

    def ancestors(self, name: str) -> frozenset[str]:
        """All nominal supertypes of ``name``, itself and ``Object`` included."""
        self.require_known(name)
        return self._ancestors[name]

    def is_nominal_subtype(self, sub: str, sup: str) -> bool:
        self.require_known(sup)
        return sup in self.ancestors(sub)

    def superclasses(self, class_name: str) -> tuple[str, ...]:
        """The superclass chain from ``class_name`` up to and including ``Object``."""
        chain = [class_name]
        while chain[-1] != OBJECT:
            decl = self.decl(chain[-1])
            if not isinstance(decl, ClassDecl):
                raise MalformedDeclarationError(f"'{chain[-1]}' is not a class")
            chain.append(decl.superclass)
        return tuple(chain)

    def split(self, tau: RefType) -> tuple[str | None, tuple[str, ...]]:
        """Separate the class component from the interface components.

        Raises:
            UnknownNameError: A name is not declared.
            MalformedDeclarationError: A class is not leftmost, or there are two.
        """
        for atom in tau.atoms:
            self.require_known(atom)
        head = tau.atoms[0] if self.is_class(tau.atoms[0]) else None
        rest = tau.atoms[1:] if head is not None else tau.atoms
        for atom in rest:
            if self.is_class(atom):
                raise MalformedDeclarationError(
                    f"class '{atom}' must be the leftmost and only class in {tau}"
                )
        return head, rest

    # -- memo ---------------------------------------------------------------

    def _cached(self, key: tuple[Any, ...], compute: Callable[[], _T]) -> _T:
        if not self.memoize:
            return compute()
        with self._lock:
            if key in self._memo:
                return self._memo[key]
        value = compute()
        with self._lock:
            return self._memo.setdefault(key, value)

    def _cached_or_conflict(
        self, key: tuple[Any, ...], compute: Callable[[], HeaderSet]
    ) -> HeaderSet | HeaderConflictError:
        def guarded() -> HeaderSet | HeaderConflictError:
            try:
                return compute()
            except HeaderConflictError as exc:
                return exc

        return self._cached(key, guarded)

    def _strict(self, key: tuple[Any, ...], compute: Callable[[], HeaderSet]) -> HeaderSet:
        result = self._cached_or_conflict(key, compute)
        if isinstance(result, HeaderConflictError):
            raise result
        return result

    # -- header functions ---------------------------------------------------

    def _own_headers(self, decl: ClassDecl) -> HeaderSet:
        return HeaderSet(m.header for m in decl.methods)

    def _mh_class(self, name: str) -> HeaderSet:
        if name == OBJECT:
            return EMPTY_HEADERS

        def compute() -> HeaderSet:
            decl = self._decls[name]
            assert isinstance(decl, ClassDecl)
            headers = self._own_headers(decl).union(self._mh_class(decl.superclass))
            return headers.union(self._mh_list(decl.interfaces))

        return self._strict(("mh-class", name), compute)

    def _a_mh_interface(self, name: str) -> HeaderSet:
        def compute() -> HeaderSet:
            decl = self._decls[name]
            assert isinstance(decl, InterfaceDecl)
            return HeaderSet(decl.headers).union(self._a_mh_list(decl.extends))

        return self._strict(("a-mh", name), compute)

    def _d_mh_interface(self, name: str) -> HeaderSet:
        def compute() -> HeaderSet:
            decl = self._decls[name]
            assert isinstance(decl, InterfaceDecl)
            own = HeaderSet(m.header for m in decl.defaults)
            return own.union(self._d_mh_list(decl.extends))

        return self._strict(("d-mh", name), compute)

    def _a_mh_list(self, names: tuple[str, ...]) -> HeaderSet:
        headers = EMPTY_HEADERS
        for name in names:
            headers = headers.union(self._a_mh_interface(name))
        return headers

    def _d_mh_list(self, names: tuple[str, ...]) -> HeaderSet:
        parts = [(name, self._d_mh_interface(name)) for name in names]
        for index, (first, first_headers) in enumerate(parts):
            for second, second_headers in parts[index + 1 :]:
                shared = first_headers.names & second_headers.names
                if shared and not (
                    self.is_nominal_subtype(first, second) or self.is_nominal_subtype(second, first)
                ):
                    method = min(shared)
                    raise HeaderConflictError(
                        method, f"default in {first}", f"default in unrelated {second}"
                    )
        headers = EMPTY_HEADERS
        for _, part in parts:
            headers = headers.union(part)
        return headers

    def _mh_list(self, names: tuple[str, ...]) -> HeaderSet:
        def compute() -> HeaderSet:
            abstract = self._a_mh_list(names)
            defaults = self._d_mh_list(names)
            overlap = abstract.names & defaults.names
            if overlap:
                method = min(overlap)
                raise HeaderConflictError(
                    method, f"abstract {abstract.get(method)}", f"default {defaults.get(method)}"
                )
            return abstract.union(defaults)

        return self._strict(("mh-list", names), compute)

    def require_mh(self, tau: PreType) -> HeaderSet:
        """Like ``mh`` but raises ``HeaderConflictError`` instead of returning None."""
        if isinstance(tau, BoolType):
            raise HeaderConflictError("*", "boolean", "has no methods")
        head, interfaces = self.split(tau)
        if head is None:
            return self._mh_list(interfaces)
        headers = self._mh_class(head)
        if interfaces:
            headers = headers.union(self._mh_list(interfaces))
        return headers

    def mh(self, tau: PreType) -> HeaderSet | None:
        """All method headers of ``tau``, or None when their union is undefined."""
        try:
            return self.require_mh(tau)
        except HeaderConflictError as exc:
            logger.debug("mh(%s) undefined: %s", tau, exc)
            return None

    def _interface_part(self, tau: PreType) -> tuple[str, ...] | None:
        if isinstance(tau, BoolType):
            return None
        return self.split(tau)[1]

    def a_mh(self, tau: PreType) -> HeaderSet | None:
        """Abstract headers of the interface components of ``tau``."""
        interfaces = self._interface_part(tau)
        if interfaces is None:
            return None
        try:
            return self._a_mh_list(interfaces)
        except HeaderConflictError:
            return None

    def d_mh(self, tau: PreType) -> HeaderSet | None:
        """Default headers of the interface components of ``tau``."""
        interfaces = self._interface_part(tau)
        if interfaces is None:
            return None
        try:
            return self._d_mh_list(interfaces)
        except HeaderConflictError:
            return None

    def is_type(self, tau: PreType) -> bool:
        if isinstance(tau, BoolType):
            return True
        try:
            return self.mh(tau) is not None
        except MalformedDeclarationError:
            return False

    def is_functional(self, tau: PreType) -> MethodHeader | None:
        """The single abstract header of a functional type, or None."""
        if isinstance(tau, BoolType) or not self.is_type(tau):
            return None
        head, _ = self.split(tau)
        if head is not None:
            return None
        abstract = self.a_mh(tau)
        if abstract is None or len(abstract) != 1:
            return None
        return next(iter(abstract))

    # -- fields and method types --------------------------------------------

    def fields(self, class_name: str) -> tuple[FieldDecl, ...]:
        """Inherited fields first, then own fields, in constructor order."""
        if class_name == OBJECT:
            return ()
        decl = self.decl(class_name)
        if not isinstance(decl, ClassDecl):
            raise MalformedDeclarationError(f"'{class_name}' is an interface and has no fields")

        def compute() -> tuple[FieldDecl, ...]:
            return self.fields(decl.superclass) + decl.fields

        return self._cached(("fields", class_name), compute)

    @staticmethod
    def _signature(headers: HeaderSet | None, method: str) -> MethodType | None:
        if headers is None:
            return None
        header = headers.get(method)
        if header is None:
            return None
        return header.param_types, header.result

    def mtype(self, method: str, tau: PreType) -> MethodType | None:
        return self._signature(self.mh(tau), method)

    def a_mtype(self, method: str, tau: PreType) -> MethodType | None:
        return self._signature(self.a_mh(tau), method)

    def d_mtype(self, method: str, tau: PreType) -> MethodType | None:
        return self._signature(self.d_mh(tau), method)

    # -- method bodies ------------------------------------------------------

    def _mbody_nominal(self, method: str, name: str) -> MethodBody | None:
        if name == OBJECT:
            return None

        def compute() -> MethodBody | None:
            decl = self._decls[name]
            if isinstance(decl, ClassDecl):
                own = decl.method(method)
                if own is not None:
                    return MethodBody(own.header.param_names, own.body, name)
                inherited = self._mbody_nominal(method, decl.superclass)
                if inherited is not None:
                    return inherited
                return self._mbody_list(method, decl.interfaces)
            default = decl.default(method)
            if default is not None:
                return MethodBody(default.header.param_names, default.body, name)
            return self._mbody_list(method, decl.extends)

        return self._cached(("mbody", method, name), compute)

    def _mbody_list(self, method: str, names: tuple[str, ...]) -> MethodBody | None:
        providers = [
            (name, body)
            for name in names
            if (body := self._mbody_nominal(method, name)) is not None
        ]
        if not providers:
            return None
        minimal = [
            body
            for name, body in providers
            if all(self.is_nominal_subtype(name, other) for other, _ in providers)
        ]
        if len(minimal) != 1:
            raise AmbiguousDefaultError(method, [name for name, _ in providers])
        return minimal[0]

    def mbody(self, method: str, tau: PreType) -> MethodBody | None:
        """Body lookup: the class chain first, then the most specific interface.

        Raises:
            AmbiguousDefaultError: Several unrelated interfaces provide a body.
        """
        if isinstance(tau, BoolType):
            return None
        head, interfaces = self.split(tau)
        if head is not None:
            found = self._mbody_nominal(method, head)
            if found is not None:
                return found
        return self._mbody_list(method, interfaces)

    def __repr__(self) -> str:
        return f"ClassTable({', '.join(self._decls)})"
