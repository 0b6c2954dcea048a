"""Small-step call-by-value evaluation.

``step`` performs one reduction following a fixed strategy: the receiver
before the arguments, arguments and constructor arguments left to right, the
operand of a cast, the guard of a conditional. Evaluation contexts are not
reified; the congruence rules crossed on the way to the redex are recorded
on the ``Stepped`` result instead.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from typing import Final, TypeAlias

from fjlambda.class_table import ClassTable
from fjlambda.errors import AnnotationMismatchError, ClassTableError, OpenTermError
from fjlambda.syntax import (
    BoolLit,
    BoolType,
    Cast,
    Cond,
    DecoratedLambda,
    FieldAccess,
    Invoke,
    New,
    Param,
    PreType,
    PureLambda,
    RefType,
    Term,
    Var,
    free_vars,
    is_proper_value,
    is_value,
    map_children,
)
from fjlambda.subtyping import subtype

logger = logging.getLogger(__name__)

DEFAULT_MAX_STEPS: Final[int] = 10_000

E_PROJ_NEW: Final[str] = "E-ProjNew"
E_INVK_NEW: Final[str] = "E-InvkNew"
E_INVK_LAMBDA_U: Final[str] = "E-InvkλU-A"
E_INVK_LAMBDA_T: Final[str] = "E-InvkλT-A"
E_INVK_LAMBDA_D: Final[str] = "E-Invkλ-D"
E_CAST_NEW: Final[str] = "E-CastNew"
E_CAST_LAMBDA: Final[str] = "E-Castλ"
E_CAST_LAMBDA_TARGET: Final[str] = "E-CastλTarget"
E_CAST_BOOL: Final[str] = "E-CastBool"
E_IF_TRUE: Final[str] = "E-IfTrue"
E_IF_FALSE: Final[str] = "E-IfFalse"

E_FIELD: Final[str] = "E-Field"
E_INVK_RECV: Final[str] = "E-Invk-Recv"
E_INVK_ARG: Final[str] = "E-Invk-Arg"
E_NEW_ARG: Final[str] = "E-New-Arg"
E_CAST: Final[str] = "E-Cast"
E_IF: Final[str] = "E-If"


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class FailedObjectCast:
    """``(τ)(new C(...))`` with ``C`` not a subtype of ``τ``."""

    target: PreType
    class_name: str
    redex: Term

    def describe(self) -> str:
        return f"cannot cast object of class {self.class_name} to {self.target}"


@dataclass(frozen=True, slots=True)
class FailedLambdaCast:
    """``(τ)[λ : φ]`` with ``φ`` not a subtype of ``τ``."""

    target: PreType
    decoration: PreType
    redex: Term

    def describe(self) -> str:
        return f"cannot cast λ of type {self.decoration} to {self.target}"


@dataclass(frozen=True, slots=True)
class Other:
    """Any other irreducible non-value; unreachable from well-typed programs."""

    description: str
    redex: Term

    def describe(self) -> str:
        return self.description


StuckReason: TypeAlias = FailedObjectCast | FailedLambdaCast | Other


@dataclass(frozen=True, slots=True)
class Stepped:
    """One reduction. ``congruence`` lists the context rules from outermost in."""

    term: Term
    rule: str
    congruence: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class Value:
    term: Term


@dataclass(frozen=True, slots=True)
class Stuck:
    reason: StuckReason


@dataclass(frozen=True, slots=True)
class BudgetExhausted:
    """The step budget ran out before a value or a stuck term was reached."""

    steps: int


StepResult: TypeAlias = Stepped | Value | Stuck
Outcome: TypeAlias = Value | Stuck | BudgetExhausted


@dataclass(frozen=True, slots=True)
class EvalResult:
    """Final outcome plus every term visited, the initial and final one included."""

    final: Outcome
    trace: tuple[Term, ...]
    rules: tuple[str, ...]

    @property
    def steps(self) -> int:
        return len(self.rules)


# ---------------------------------------------------------------------------
# Decoration and substitution
# ---------------------------------------------------------------------------


def decorate(t: Term, tau: PreType) -> Term:
    """Attach ``tau`` to a pure λ, pushing through conditional branches."""
    match t:
        case PureLambda(params=params, body=body, pos=pos):
            return DecoratedLambda(params, body, tau, pos)
        case Cond(guard=guard, then=then, orelse=orelse, pos=pos):
            return Cond(guard, decorate(then, tau), decorate(orelse, tau), pos)
    return t


def _fresh(base: str, avoid: set[str]) -> str:
    for index in itertools.count(1):
        candidate = f"{base}_{index}"
        if candidate not in avoid:
            return candidate
    raise AssertionError("unreachable")


def _substitute_under(
    params: tuple[Param, ...], body: Term, bindings: Mapping[str, Term]
) -> tuple[tuple[Param, ...], Term]:
    names = {p.name for p in params}
    live = {x: v for x, v in bindings.items() if x not in names}
    if not live:
        return params, body
    incoming: set[str] = set()
    for v in live.values():
        incoming |= free_vars(v)
    clashes = names & incoming
    if clashes:
        avoid = incoming | names | free_vars(body) | set(live)
        renaming: dict[str, Term] = {}
        renamed: list[Param] = []
        for p in params:
            if p.name in clashes:
                fresh = _fresh(p.name, avoid)
                avoid.add(fresh)
                renaming[p.name] = Var(fresh, p.pos)
                renamed.append(Param(fresh, p.declared_type, p.pos))
            else:
                renamed.append(p)
        body = substitute(body, renaming)
        params = tuple(renamed)
    return params, substitute(body, live)


def substitute(t: Term, bindings: Mapping[str, Term]) -> Term:
    """Simultaneous capture-avoiding substitution of ``bindings`` into ``t``.

    λ parameters shadow the bindings; a parameter that would capture a free
    variable of a substituted term is renamed first.
    """
    if not bindings:
        return t
    match t:
        case Var(name=name):
            return bindings.get(name, t)
        case PureLambda(params=params, body=body, pos=pos):
            new_params, new_body = _substitute_under(params, body, bindings)
            return PureLambda(new_params, new_body, pos)
        case DecoratedLambda(params=params, body=body, target=target, pos=pos):
            new_params, new_body = _substitute_under(params, body, bindings)
            return DecoratedLambda(new_params, new_body, target, pos)
    return map_children(t, lambda child: substitute(child, bindings))


# ---------------------------------------------------------------------------
# Reduction
# ---------------------------------------------------------------------------


class Evaluator:
    """Reduction over one class table.

    Args:
        ct: The class table.
        check_annotations: Raise ``AnnotationMismatchError`` when a typed λ is
            invoked through a header whose parameter types differ from its
            annotations, instead of silently using the header's types.
    """

    def __init__(self, ct: ClassTable, *, check_annotations: bool = False) -> None:
        self.ct = ct
        self.check_annotations = check_annotations

    def step(self, t: Term) -> StepResult:
        free = free_vars(t)
        if free:
            raise OpenTermError(sorted(free), position=t.pos)
        if is_proper_value(t):
            return Value(t)
        return self._reduce(t)

    def evaluate(self, t: Term, max_steps: int = DEFAULT_MAX_STEPS) -> EvalResult:
        trace: list[Term] = [t]
        rules: list[str] = []
        current = t
        for _ in range(max_steps + 1):
            result = self.step(current)
            if not isinstance(result, Stepped):
                if isinstance(result, Stuck):
                    logger.debug("stuck after %d steps: %s", len(rules), result.reason.describe())
                return EvalResult(result, tuple(trace), tuple(rules))
            if len(rules) == max_steps:
                break
            current = result.term
            trace.append(current)
            rules.append(result.rule)
            if logger.isEnabledFor(logging.DEBUG):
                from fjlambda.printer import pretty

                logger.debug(
                    "step %d [%s]: %s",
                    len(rules),
                    result.rule,
                    pretty(current),
                    extra={"step": True},
                )
        logger.debug("step budget of %d exhausted", max_steps)
        return EvalResult(BudgetExhausted(max_steps), tuple(trace), tuple(rules))

    # -- rules ----------------------------------------------------------------

    @staticmethod
    def _inside(
        inner: StepResult, rebuild: Callable[[Term], Term], rule: str
    ) -> StepResult:
        if isinstance(inner, Stepped):
            return Stepped(rebuild(inner.term), inner.rule, (rule, *inner.congruence))
        return inner

    def _reduce(self, t: Term) -> StepResult:
        match t:
            case FieldAccess():
                return self._field(t)
            case Invoke():
                return self._invoke(t)
            case New(class_name=name, args=args, pos=pos):
                index = next(i for i, a in enumerate(args) if not is_value(a))
                return self._inside(
                    self._reduce(args[index]),
                    lambda a: New(name, (*args[:index], a, *args[index + 1 :]), pos),
                    E_NEW_ARG,
                )
            case Cast():
                return self._cast(t)
            case Cond(guard=guard, then=then, orelse=orelse, pos=pos):
                if not is_value(guard):
                    return self._inside(
                        self._reduce(guard), lambda g: Cond(g, then, orelse, pos), E_IF
                    )
                if isinstance(guard, BoolLit):
                    return Stepped(then, E_IF_TRUE) if guard.value else Stepped(orelse, E_IF_FALSE)
                return Stuck(Other("conditional guard is not a boolean", t))
            case PureLambda():
                return Stuck(Other("λ without a target type cannot be used", t))
            case Var(name=name):
                return Stuck(Other(f"free variable '{name}'", t))
        return Value(t)

    def _field(self, t: FieldAccess) -> StepResult:
        target = t.target
        if not is_value(target):
            return self._inside(
                self._reduce(target), lambda r: FieldAccess(r, t.field_name, t.pos), E_FIELD
            )
        if isinstance(target, New):
            try:
                fields = self.ct.fields(target.class_name)
            except ClassTableError as exc:
                return Stuck(Other(str(exc), t))
            for index, decl in enumerate(fields):
                if decl.name == t.field_name and index < len(target.args):
                    return Stepped(decorate(target.args[index], decl.type), E_PROJ_NEW)
        return Stuck(Other(f"no field '{t.field_name}' to project", t))

    def _invoke(self, t: Invoke) -> StepResult:
        target, args = t.target, t.args
        if not is_value(target):
            return self._inside(
                self._reduce(target), lambda r: Invoke(r, t.method, args, t.pos), E_INVK_RECV
            )
        if not is_proper_value(target):
            return Stuck(Other(f"method '{t.method}' invoked on a λ without a target type", t))
        for index, arg in enumerate(args):
            if not is_value(arg):
                return self._inside(
                    self._reduce(arg),
                    lambda a, i=index: Invoke(
                        target, t.method, (*args[:i], a, *args[i + 1 :]), t.pos
                    ),
                    E_INVK_ARG,
                )
        try:
            if isinstance(target, New):
                return self._invoke_object(t, target)
            if isinstance(target, DecoratedLambda):
                return self._invoke_lambda(t, target)
        except ClassTableError as exc:
            return Stuck(Other(str(exc), t))
        return Stuck(Other(f"method '{t.method}' invoked on a boolean", t))

    @staticmethod
    def _call(
        params: tuple[str, ...],
        body: Term,
        args: tuple[Term, ...],
        signature: tuple[tuple[PreType, ...], PreType],
        this: Term | None = None,
    ) -> Term:
        param_types, result = signature
        bindings: dict[str, Term] = {
            x: decorate(u, tau) for x, u, tau in zip(params, args, param_types, strict=True)
        }
        if this is not None:
            bindings["this"] = this
        return decorate(substitute(body, bindings), result)

    def _invoke_object(self, t: Invoke, target: New) -> StepResult:
        receiver = RefType((target.class_name,))
        signature = self.ct.mtype(t.method, receiver)
        found = self.ct.mbody(t.method, receiver)
        if signature is None or found is None:
            return Stuck(Other(f"{target.class_name} has no method '{t.method}'", t))
        if len(found.params) != len(t.args):
            return Stuck(Other(f"wrong number of arguments for '{t.method}'", t))
        return Stepped(self._call(found.params, found.body, t.args, signature, target), E_INVK_NEW)

    def _invoke_lambda(self, t: Invoke, target: DecoratedLambda) -> StepResult:
        abstract = self.ct.a_mtype(t.method, target.target)
        if abstract is not None:
            if len(target.params) != len(t.args):
                return Stuck(Other(f"wrong number of arguments for '{t.method}'", t))
            if self.check_annotations and target.is_typed:
                declared = tuple(p.declared_type for p in target.params)
                if declared != abstract[0]:
                    raise AnnotationMismatchError(
                        f"λ annotations do not match the header of '{t.method}'", position=t.pos
                    )
            rule = E_INVK_LAMBDA_T if target.is_typed else E_INVK_LAMBDA_U
            params = tuple(p.name for p in target.params)
            return Stepped(self._call(params, target.body, t.args, abstract), rule)

        default = self.ct.d_mtype(t.method, target.target)
        found = self.ct.mbody(t.method, target.target)
        if default is None or found is None:
            return Stuck(Other(f"{target.target} has no method '{t.method}'", t))
        if len(found.params) != len(t.args):
            return Stuck(Other(f"wrong number of arguments for '{t.method}'", t))
        reduct = self._call(found.params, found.body, t.args, default, target)
        return Stepped(reduct, E_INVK_LAMBDA_D)

    def _cast(self, t: Cast) -> StepResult:
        operand = t.term
        if isinstance(operand, PureLambda):
            decorated = DecoratedLambda(operand.params, operand.body, t.type, operand.pos)
            return Stepped(decorated, E_CAST_LAMBDA)
        if not is_value(operand):
            return self._inside(self._reduce(operand), lambda s: Cast(t.type, s, t.pos), E_CAST)
        match operand:
            case New(class_name=name):
                if subtype(self.ct, RefType((name,)), t.type):
                    return Stepped(operand, E_CAST_NEW)
                return Stuck(FailedObjectCast(t.type, name, t))
            case DecoratedLambda(target=decoration):
                if subtype(self.ct, decoration, t.type):
                    return Stepped(operand, E_CAST_LAMBDA_TARGET)
                return Stuck(FailedLambdaCast(t.type, decoration, t))
            case BoolLit():
                if isinstance(t.type, BoolType):
                    return Stepped(operand, E_CAST_BOOL)
        return Stuck(Other(f"cannot cast a boolean to {t.type}", t))


def step(ct: ClassTable, t: Term, *, check_annotations: bool = False) -> StepResult:
    """One reduction step of the closed term ``t``.

    Raises:
        OpenTermError: ``t`` has free variables.
    """
    return Evaluator(ct, check_annotations=check_annotations).step(t)


def evaluate(
    ct: ClassTable,
    t: Term,
    max_steps: int = DEFAULT_MAX_STEPS,
    *,
    check_annotations: bool = False,
) -> EvalResult:
    """Iterate ``step`` until a value, a stuck term, or ``max_steps`` reductions."""
    return Evaluator(ct, check_annotations=check_annotations).evaluate(t, max_steps)


def values(ct: ClassTable, t: Term, max_steps: int = DEFAULT_MAX_STEPS) -> Term | None:
    """The proper value ``t`` reduces to, or None when it gets stuck or runs out of steps."""
    final = evaluate(ct, t, max_steps).final
    return final.term if isinstance(final, Value) else None


__all__ = [
    "BudgetExhausted",
    "EvalResult",
    "Evaluator",
    "FailedLambdaCast",
    "FailedObjectCast",
    "Other",
    "Stepped",
    "Stuck",
    "StuckReason",
    "Value",
    "decorate",
    "evaluate",
    "step",
    "substitute",
    "values",
]
