"""Algorithmic typing: synthesis (``t_inf``) and checking (``t_ck``).

Synthesis computes the unique type of a standalone expression. Checking
pushes an expected type into a term: λs get decorated with it (conditionals
pass it on to their branches), the result is synthesised, and the synthesised
type must be a subtype of the expected one.

Every successful judgement comes with a derivation tree whose nodes are named
after the typing rules, so traces can be compared against hand derivations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Final

from fjlambda.class_table import ClassTable
from fjlambda.errors import (
    ClassTableError,
    IncomparableTypesError,
    TypeCheckError,
    TypeErrorKind,
)
from fjlambda.evaluator import decorate
from fjlambda.syntax import (
    BOOLEAN,
    EMPTY_ENV,
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
    TypeEnv,
    Var,
)
from fjlambda.subtyping import class_component, lub, subtype

if TYPE_CHECKING:
    from fjlambda.wellformed import WellFormednessError

logger = logging.getLogger(__name__)

T_VAR: Final[str] = "T-VAR"
T_BOOL: Final[str] = "T-BOOL"
T_FIELD: Final[str] = "T-FIELD"
T_INVK: Final[str] = "T-INVK"
T_NEW: Final[str] = "T-NEW"
T_UCAST: Final[str] = "T-UCAST"
T_LAMBDA_UCAST: Final[str] = "T-λUCAST"
T_UDCAST: Final[str] = "T-UDCAST"
T_STUPIDCAST: Final[str] = "T-STUPIDCAST"
T_LAMBDA_UD: Final[str] = "T-λUD"
T_LAMBDA_TD: Final[str] = "T-λTD"
T_COND: Final[str] = "T-COND"
T_CHECK: Final[str] = "⊢⊢*"


@dataclass(frozen=True, slots=True)
class Derivation:
    """One rule application: the rule, its conclusion, and its premises."""

    rule: str
    term: Term
    type: PreType
    premises: tuple[Derivation, ...] = ()

    def rule_names(self) -> list[str]:
        """Rule names in pre-order (conclusion before premises)."""
        names = [self.rule]
        for premise in self.premises:
            names.extend(premise.rule_names())
        return names


@dataclass(frozen=True, slots=True)
class Judgement:
    """Outcome of a typing query: a type with its derivation, or an error."""

    term: Term
    env: TypeEnv
    result: PreType | TypeCheckError
    derivation: Derivation | None = field(default=None, compare=False)

    @property
    def ok(self) -> bool:
        return not isinstance(self.result, TypeCheckError)

    @property
    def type(self) -> PreType:
        if isinstance(self.result, TypeCheckError):
            raise self.result
        return self.result

    @property
    def error(self) -> TypeCheckError | None:
        return self.result if isinstance(self.result, TypeCheckError) else None

    @property
    def rule_trace(self) -> list[str]:
        return self.derivation.rule_names() if self.derivation is not None else []


class TypeChecker:
    """Type checker bound to one class table.

    Args:
        ct: The class table.
        stupid_cast: Accept every cast whose checked form fails, typing it at
            the target type, instead of requiring related class components.
    """

    def __init__(self, ct: ClassTable, *, stupid_cast: bool = False) -> None:
        self.ct = ct
        self.stupid_cast = stupid_cast

    def stupid_cast_mode(self, flag: bool) -> TypeChecker:
        """A checker over the same table with stupid casts switched on or off."""
        return TypeChecker(self.ct, stupid_cast=flag)

    # -- public entry points --------------------------------------------------

    def t_inf(self, env: TypeEnv, t: Term) -> Judgement:
        try:
            derivation = self.infer(env, t)
        except TypeCheckError as exc:
            logger.debug("t_inf failed on %s: %s", type(t).__name__, exc)
            return Judgement(t, env, exc)
        return Judgement(t, env, derivation.type, derivation)

    def t_ck(self, env: TypeEnv, t: Term, tau: PreType) -> Judgement:
        """Check ``t`` against ``tau``; on success the result is the synthesised type."""
        try:
            derivation = self.check(env, t, tau)
        except TypeCheckError as exc:
            return Judgement(t, env, exc)
        return Judgement(t, env, derivation.premises[0].type, derivation)

    # -- rules ----------------------------------------------------------------

    def _error(
        self, kind: TypeErrorKind, message: str, t: Term, rule: str | None
    ) -> TypeCheckError:
        return TypeCheckError(kind, message, rule=rule, position=t.pos)

    def check(
        self,
        env: TypeEnv,
        t: Term,
        tau: PreType,
        mismatch: TypeErrorKind = TypeErrorKind.ARG_MISMATCH,
    ) -> Derivation:
        """Checking mode: decorate with ``tau``, synthesise, compare."""
        inner = self.infer(env, decorate(t, tau))
        try:
            ok = subtype(self.ct, inner.type, tau)
        except ClassTableError as exc:
            raise self._error(TypeErrorKind.ILL_FORMED_TYPE, str(exc), t, T_CHECK) from exc
        if not ok:
            raise self._error(mismatch, f"expected {tau}, found {inner.type}", t, T_CHECK)
        return Derivation(T_CHECK, t, tau, (inner,))

    def infer(self, env: TypeEnv, t: Term) -> Derivation:
        """Synthesis mode. Raises ``TypeCheckError`` when no type exists."""
        try:
            return self._infer(env, t)
        except ClassTableError as exc:
            raise self._error(TypeErrorKind.ILL_FORMED_TYPE, str(exc), t, None) from exc

    def _infer(self, env: TypeEnv, t: Term) -> Derivation:
        match t:
            case Var(name=name):
                bound = env.lookup(name)
                if bound is None:
                    raise self._error(
                        TypeErrorKind.UNBOUND_VAR, f"unbound variable '{name}'", t, T_VAR
                    )
                return Derivation(T_VAR, t, bound)
            case BoolLit():
                return Derivation(T_BOOL, t, BOOLEAN)
            case FieldAccess():
                return self._field(env, t)
            case Invoke():
                return self._invoke(env, t)
            case New():
                return self._new(env, t)
            case Cast():
                return self._cast(env, t)
            case PureLambda():
                raise self._error(
                    TypeErrorKind.LAMBDA_NEEDS_TARGET, "lambda requires a target type", t, None
                )
            case DecoratedLambda():
                return self._lambda(env, t)
            case Cond():
                return self._cond(env, t)
        raise TypeError(f"not a term: {t!r}")

    def _field(self, env: TypeEnv, t: FieldAccess) -> Derivation:
        receiver = self.infer(env, t.target)
        if isinstance(receiver.type, BoolType):
            raise self._error(
                TypeErrorKind.NO_SUCH_FIELD, f"boolean has no field '{t.field_name}'", t, T_FIELD
            )
        owner = class_component(self.ct, receiver.type)
        for decl in self.ct.fields(owner):
            if decl.name == t.field_name:
                return Derivation(T_FIELD, t, decl.type, (receiver,))
        raise self._error(
            TypeErrorKind.NO_SUCH_FIELD,
            f"{receiver.type} has no field '{t.field_name}'",
            t,
            T_FIELD,
        )

    def _arguments(
        self,
        env: TypeEnv,
        t: Term,
        args: tuple[Term, ...],
        expected: tuple[PreType, ...],
        rule: str,
    ) -> tuple[Derivation, ...]:
        if len(args) != len(expected):
            raise self._error(
                TypeErrorKind.ARITY_MISMATCH,
                f"expected {len(expected)} argument(s), found {len(args)}",
                t,
                rule,
            )
        return tuple(self.check(env, arg, tau) for arg, tau in zip(args, expected, strict=True))

    def _invoke(self, env: TypeEnv, t: Invoke) -> Derivation:
        receiver = self.infer(env, t.target)
        signature = self.ct.mtype(t.method, receiver.type)
        if signature is None:
            raise self._error(
                TypeErrorKind.NO_SUCH_METHOD,
                f"{receiver.type} has no method '{t.method}'",
                t,
                T_INVK,
            )
        params, result = signature
        args = self._arguments(env, t, t.args, params, T_INVK)
        return Derivation(T_INVK, t, result, (receiver, *args))

    def _new(self, env: TypeEnv, t: New) -> Derivation:
        if not self.ct.is_class(t.class_name):
            what = "an interface" if self.ct.is_interface(t.class_name) else "not declared"
            raise self._error(
                TypeErrorKind.ILL_FORMED_TYPE,
                f"cannot instantiate '{t.class_name}': {what}",
                t,
                T_NEW,
            )
        fields = self.ct.fields(t.class_name)
        args = self._arguments(env, t, t.args, tuple(f.type for f in fields), T_NEW)
        return Derivation(T_NEW, t, RefType((t.class_name,)), args)

    def _cast(self, env: TypeEnv, t: Cast) -> Derivation:
        target = t.type
        if not self.ct.is_type(target):
            raise self._error(
                TypeErrorKind.ILL_FORMED_TYPE, f"cast target {target} is not a type", t, None
            )
        try:
            checked = self.check(env, t.term, target)
        except TypeCheckError as failed:
            if isinstance(t.term, PureLambda):
                raise self._error(
                    TypeErrorKind.BAD_CAST,
                    f"bad cast to {target}: {failed.message}",
                    t,
                    T_LAMBDA_UCAST,
                ) from failed
        else:
            rule = T_LAMBDA_UCAST if isinstance(t.term, PureLambda) else T_UCAST
            return Derivation(rule, t, target, (checked,))

        inner = self.infer(env, t.term)
        if isinstance(target, BoolType) or isinstance(inner.type, BoolType):
            if self.stupid_cast:
                return Derivation(T_STUPIDCAST, t, target, (inner,))
            raise self._error(
                TypeErrorKind.BAD_CAST, f"cannot cast {inner.type} to {target}", t, T_UDCAST
            )
        to_class = class_component(self.ct, target)
        from_class = class_component(self.ct, inner.type)
        if self.ct.is_nominal_subtype(to_class, from_class) or self.ct.is_nominal_subtype(
            from_class, to_class
        ):
            return Derivation(T_UDCAST, t, target, (inner,))
        if self.stupid_cast:
            return Derivation(T_STUPIDCAST, t, target, (inner,))
        raise self._error(
            TypeErrorKind.BAD_CAST,
            f"cannot cast {inner.type} to {target}: "
            f"classes {from_class} and {to_class} are unrelated",
            t,
            T_UDCAST,
        )

    def _lambda(self, env: TypeEnv, t: DecoratedLambda) -> Derivation:
        rule = T_LAMBDA_TD if t.is_typed else T_LAMBDA_UD
        header = None
        if not isinstance(t.target, BoolType) and self.ct.is_type(t.target):
            header = self.ct.is_functional(t.target)
        if header is None:
            raise self._error(
                TypeErrorKind.TARGET_NOT_FUNCTIONAL,
                f"target type {t.target} is not functional",
                t,
                rule,
            )
        if len(t.params) != len(header.param_types):
            raise self._error(
                TypeErrorKind.ARITY_MISMATCH,
                f"{header} takes {len(header.param_types)} parameter(s), λ has {len(t.params)}",
                t,
                rule,
            )
        if t.is_typed:
            declared = tuple(p.declared_type for p in t.params)
            if declared != header.param_types:
                shown = ", ".join(str(d) for d in declared)
                raise self._error(
                    TypeErrorKind.PARAM_ANNOTATION_MISMATCH,
                    f"λ parameters ({shown}) do not match {header}",
                    t,
                    rule,
                )
        inner_env = env.bind_all((p.name for p in t.params), header.param_types)
        body = self.check(inner_env, t.body, header.result)
        return Derivation(rule, t, t.target, (body,))

    def _cond(self, env: TypeEnv, t: Cond) -> Derivation:
        try:
            guard = self.check(env, t.guard, BOOLEAN, TypeErrorKind.NOT_BOOLEAN_GUARD)
        except TypeCheckError as exc:
            if exc.kind is TypeErrorKind.TARGET_NOT_FUNCTIONAL:
                raise self._error(
                    TypeErrorKind.NOT_BOOLEAN_GUARD, "guard must be boolean", t, T_COND
                ) from exc
            raise
        then = self.infer(env, t.then)
        orelse = self.infer(env, t.orelse)
        try:
            joined = lub(self.ct, then.type, orelse.type)
        except IncomparableTypesError as exc:
            raise self._error(TypeErrorKind.COND_BRANCH_MISMATCH, str(exc), t, T_COND) from exc
        if not self.ct.is_type(joined):
            raise self._error(
                TypeErrorKind.COND_BRANCH_MISMATCH,
                f"branch types {then.type} and {orelse.type} have no usable upper bound",
                t,
                T_COND,
            )
        return Derivation(T_COND, t, joined, (guard, then, orelse))


def t_inf(ct: ClassTable, env: TypeEnv, t: Term, *, stupid_cast: bool = False) -> Judgement:
    """Synthesise the type of ``t`` under ``env``."""
    return TypeChecker(ct, stupid_cast=stupid_cast).t_inf(env, t)


def t_ck(
    ct: ClassTable, env: TypeEnv, t: Term, tau: PreType, *, stupid_cast: bool = False
) -> Judgement:
    """Check ``t`` against ``tau`` under ``env``."""
    return TypeChecker(ct, stupid_cast=stupid_cast).t_ck(env, t, tau)


def stupid_cast_mode(ct: ClassTable, flag: bool) -> TypeChecker:
    return TypeChecker(ct, stupid_cast=flag)


@dataclass(frozen=True, slots=True)
class ProgramReport:
    """Table findings plus the judgement for the main term."""

    table_errors: tuple[WellFormednessError, ...]
    judgement: Judgement

    @property
    def ok(self) -> bool:
        return not self.table_errors and self.judgement.ok


def check_program(ct: ClassTable, t: Term, *, stupid_cast: bool = False) -> ProgramReport:
    """A program is well typed when its table is well formed and its term has a type."""
    from fjlambda.wellformed import ok_table

    return ProgramReport(tuple(ok_table(ct)), t_inf(ct, EMPTY_ENV, t, stupid_cast=stupid_cast))
