"""Well-formedness of class tables.

``ok_table`` walks every declaration and reports each failed premise as a
``WellFormednessError`` value instead of raising, so one run lists every
problem in the table.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator
from dataclasses import dataclass
from typing import Final

from fjlambda.class_table import ClassTable
from fjlambda.errors import AmbiguousDefaultError, ClassTableError, HeaderConflictError
from fjlambda.syntax import (
    THIS,
    BoolType,
    ClassDecl,
    InterfaceDecl,
    MethodDecl,
    PreType,
    RefType,
    SourcePosition,
    TypeEnv,
    default_ctor,
)
from fjlambda.typecheck import TypeChecker
from fjlambda.utils import Timer

logger = logging.getLogger(__name__)

UNKNOWN_TYPE: Final[str] = "unknown-type"
CONSTRUCTOR_SHAPE: Final[str] = "constructor-shape"
FIELD_SHADOWING: Final[str] = "field-shadowing"
HEADER_CONFLICT: Final[str] = "header-conflict"
METHOD_BODY: Final[str] = "method-body"
UNIMPLEMENTED_METHOD: Final[str] = "unimplemented-method"
AMBIGUOUS_DEFAULT: Final[str] = "ambiguous-default"


@dataclass(frozen=True, slots=True)
class WellFormednessError:
    """One failed premise of table well-formedness.

    Attributes:
        decl: Name of the class or interface at fault.
        method: Method involved, if any.
        premise: Short identifier of the failed premise (e.g. ``method-body``).
        message: Human-readable explanation.
    """

    decl: str
    method: str | None
    premise: str
    message: str
    position: SourcePosition | None = None

    def __str__(self) -> str:
        where = self.decl if self.method is None else f"{self.decl}.{self.method}"
        prefix = f"{self.position}: " if self.position is not None else ""
        return f"{prefix}{where}: {self.premise}: {self.message}"

    def to_dict(self) -> dict[str, str | None]:
        return {
            "decl": self.decl,
            "method": self.method,
            "premise": self.premise,
            "message": self.message,
            "position": str(self.position) if self.position is not None else None,
        }


class _TableChecker:
    def __init__(self, ct: ClassTable) -> None:
        self.ct = ct
        self.checker = TypeChecker(ct)

    def run(self) -> list[WellFormednessError]:
        errors: list[WellFormednessError] = []
        for decl in self.ct:
            if isinstance(decl, ClassDecl):
                errors.extend(self._class(decl))
            else:
                errors.extend(self._interface(decl))
        return errors

    def _unknown_types(
        self, owner: str, types: list[tuple[PreType, str | None]], pos: SourcePosition | None
    ) -> Iterator[WellFormednessError]:
        for tau, method in types:
            if isinstance(tau, BoolType):
                continue
            for atom in tau.atoms:
                if atom not in self.ct:
                    yield WellFormednessError(
                        owner, method, UNKNOWN_TYPE, f"type name '{atom}' is not declared", pos
                    )

    def _header_types(self, methods: tuple[MethodDecl, ...]) -> list[tuple[PreType, str | None]]:
        return [
            (tau, m.name)
            for m in methods
            for tau in (m.header.result, *m.header.param_types)
        ]

    def _method_bodies(
        self, owner: str, this_type: RefType, methods: tuple[MethodDecl, ...]
    ) -> Iterator[WellFormednessError]:
        for method in methods:
            header = method.header
            if THIS in header.param_names:
                yield WellFormednessError(
                    owner, method.name, METHOD_BODY, "'this' cannot be a parameter", method.pos
                )
                continue
            env = TypeEnv(zip(header.param_names, header.param_types, strict=True)).bind(
                THIS, this_type
            )
            judgement = self.checker.t_ck(env, method.body, header.result)
            if not judgement.ok:
                error = judgement.error
                assert error is not None
                yield WellFormednessError(
                    owner,
                    method.name,
                    METHOD_BODY,
                    f"{error.kind}: {error.message}",
                    error.position or method.pos,
                )

    def _headers_undefined(
        self, owner: str, tau: RefType, pos: SourcePosition | None
    ) -> WellFormednessError | None:
        try:
            self.ct.require_mh(tau)
        except HeaderConflictError as exc:
            return WellFormednessError(owner, exc.method, HEADER_CONFLICT, exc.message, pos)
        except ClassTableError as exc:
            return WellFormednessError(owner, None, UNKNOWN_TYPE, exc.message, pos)
        return None

    def _class(self, decl: ClassDecl) -> list[WellFormednessError]:
        errors: list[WellFormednessError] = []
        types = [(f.type, None) for f in decl.fields]
        types += [(tau, None) for tau, _ in decl.ctor.params]
        types += self._header_types(decl.methods)
        errors.extend(self._unknown_types(decl.name, types, decl.pos))
        if errors:
            return errors

        inherited = self.ct.fields(decl.superclass)
        inherited_names = {f.name for f in inherited}
        seen: set[str] = set()
        for f in decl.fields:
            if f.name in inherited_names or f.name in seen:
                errors.append(
                    WellFormednessError(
                        decl.name,
                        None,
                        FIELD_SHADOWING,
                        f"field '{f.name}' is declared twice",
                        f.pos,
                    )
                )
            seen.add(f.name)

        expected = default_ctor(decl.name, inherited, decl.fields)
        ctor = decl.ctor
        if (
            ctor.name != expected.name
            or ctor.params != expected.params
            or ctor.super_args != expected.super_args
            or ctor.assignments != expected.assignments
        ):
            shown = ", ".join(f"{t} {x}" for t, x in expected.params)
            errors.append(
                WellFormednessError(
                    decl.name,
                    None,
                    CONSTRUCTOR_SHAPE,
                    f"constructor must take ({shown}), pass the inherited fields to super "
                    "and assign the own fields in order",
                    ctor.pos or decl.pos,
                )
            )

        this_type = RefType((decl.name,))
        conflict = self._headers_undefined(decl.name, this_type, decl.pos)
        if conflict is not None:
            errors.append(conflict)
        else:
            headers = self.ct.require_mh(this_type)
            for header in headers:
                try:
                    found = self.ct.mbody(header.name, this_type)
                except AmbiguousDefaultError as exc:
                    errors.append(
                        WellFormednessError(
                            decl.name, header.name, AMBIGUOUS_DEFAULT, exc.message, decl.pos
                        )
                    )
                    continue
                if found is None:
                    errors.append(
                        WellFormednessError(
                            decl.name,
                            header.name,
                            UNIMPLEMENTED_METHOD,
                            f"no body for {header}",
                            decl.pos,
                        )
                    )
        errors.extend(self._method_bodies(decl.name, this_type, decl.methods))
        return errors

    def _interface(self, decl: InterfaceDecl) -> list[WellFormednessError]:
        errors: list[WellFormednessError] = []
        types = [(tau, h.name) for h in decl.headers for tau in (h.result, *h.param_types)]
        types += self._header_types(decl.defaults)
        errors.extend(self._unknown_types(decl.name, types, decl.pos))
        if errors:
            return errors
        this_type = RefType((decl.name,))
        conflict = self._headers_undefined(decl.name, this_type, decl.pos)
        if conflict is not None:
            errors.append(conflict)
        errors.extend(self._method_bodies(decl.name, this_type, decl.defaults))
        return errors


def ok_table(ct: ClassTable) -> list[WellFormednessError]:
    """Every failed well-formedness premise of ``ct``; empty when the table is OK."""
    with Timer("ok_table"):
        errors = _TableChecker(ct).run()
    logger.debug("ok_table: %d problem(s) in %d declaration(s)", len(errors), len(ct))
    return errors
