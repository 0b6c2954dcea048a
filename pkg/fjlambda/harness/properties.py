"""Executable metatheory: each property draws a case from a seed and checks it.

A property run ends in one of four statuses. ``fail`` carries a witness that
the runner shrinks and stores; ``inconclusive`` means the step budget ran out
before the trace settled; ``skipped`` means no case satisfying the property's
precondition could be drawn.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Any, ClassVar

try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):  # type: ignore[no-redef]
        __str__ = str.__str__
        __format__ = str.__format__

from fjlambda.class_table import ClassTable
from fjlambda.errors import (
    AmbiguousDefaultError,
    GenerationBudgetError,
    PropertyPreconditionError,
)
from fjlambda.evaluator import (
    BudgetExhausted,
    Evaluator,
    FailedLambdaCast,
    FailedObjectCast,
    Stepped,
    Stuck,
    Value,
    decorate,
    substitute,
)
from fjlambda.harness.config import GenConfig
from fjlambda.harness.generate import Generator, NoTermError
from fjlambda.harness.oracles import (
    SubtypeOracle,
    class_pairs,
    enumerate_redexes,
    lookup_disagreements,
)
from fjlambda.parser import SourceProgram, parse_program
from fjlambda.printer import pretty
from fjlambda.report import stuck_to_dict
from fjlambda.subtyping import subtype
from fjlambda.syntax import (
    EMPTY_ENV,
    OBJECT,
    OBJECT_TYPE,
    THIS,
    FieldAccess,
    Invoke,
    PreType,
    PureLambda,
    RefType,
    Term,
    TypeEnv,
    subterms,
)
from fjlambda.typecheck import T_UDCAST, TypeChecker
from fjlambda.wellformed import ok_table

logger = logging.getLogger(__name__)


class PropertyStatus(StrEnum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class Case:
    """One drawn input.

    Closed-term properties use ``term`` alone. The substitution and weakening
    properties also set ``env`` and ``target`` (``env ⊢* term : target``),
    and substitution names the variable ``var`` replaced by the closed value
    ``value``.
    """

    seed: int
    ct: ClassTable
    term: Term | None = None
    env: TypeEnv = EMPTY_ENV
    target: PreType | None = None
    var: str | None = None
    value: Term | None = None

    def replace(self, **changes: Any) -> Case:
        return dataclasses.replace(self, **changes)


@dataclass
class PropertyResult:
    """Outcome of one property run.

    Attributes:
        property: Name of the property.
        status: pass, fail, inconclusive or skipped.
        seed: Seed the case was drawn from.
        message: Short explanation for anything but a pass.
        witness: JSON-ready details of a failure.
        case: The case that was checked, when one was drawn.
    """

    property: str
    status: PropertyStatus
    seed: int
    message: str = ""
    witness: dict[str, Any] = field(default_factory=dict)
    case: Case | None = None

    @property
    def failed(self) -> bool:
        return self.status is PropertyStatus.FAIL

    def to_dict(self) -> dict[str, Any]:
        return {
            "property": self.property,
            "status": str(self.status),
            "seed": self.seed,
            "message": self.message,
            "witness": self.witness,
        }


class BaseProperty:
    """Base class for harness properties.

    Subclasses set ``name`` and implement ``check``; ``generate`` and
    ``precondition`` default to a closed typed term over a generated table.
    """

    name: ClassVar[str] = ""
    requires_no_udcast: ClassVar[bool] = False
    # With +udcast, type with stupid casts instead of refusing downcast terms.
    types_udcast_with_stupid_casts: ClassVar[bool] = False

    def __init__(self, cfg: GenConfig | None = None) -> None:
        self.cfg = cfg or GenConfig()

    def result(
        self, case: Case, status: PropertyStatus, message: str = "", **witness: Any
    ) -> PropertyResult:
        return PropertyResult(self.name, status, case.seed, message, witness, case)

    def generate(self, gen: Generator, seed: int) -> Case:
        ct = gen.table()
        term, _ = gen.typed_term(ct)
        return Case(seed, ct, term)

    def precondition(self, case: Case) -> None:
        """Raise ``PropertyPreconditionError`` unless the case is in the property's domain."""
        problems = ok_table(case.ct)
        if problems:
            raise PropertyPreconditionError(f"table is not well formed: {problems[0]}")
        if case.term is None:
            raise PropertyPreconditionError("no term to check")
        judgement = self.checker(case.ct).t_inf(EMPTY_ENV, case.term)
        if not judgement.ok:
            raise PropertyPreconditionError(f"term is not well typed: {judgement.error}")
        if self.excludes_udcast and T_UDCAST in judgement.rule_trace:
            raise PropertyPreconditionError(f"{self.name} excludes terms typed with {T_UDCAST}")

    @property
    def stupid_casts(self) -> bool:
        return self.types_udcast_with_stupid_casts and self.cfg.udcast

    @property
    def excludes_udcast(self) -> bool:
        """Whether terms typed with T-UDCAST fall outside this property's domain."""
        return self.requires_no_udcast and not self.stupid_casts

    def checker(self, ct: ClassTable) -> TypeChecker:
        return TypeChecker(ct, stupid_cast=self.stupid_casts)

    def check(self, case: Case) -> PropertyResult:
        raise NotImplementedError

    def check_case(self, case: Case) -> PropertyResult:
        """Precondition then check; a failed precondition skips the case."""
        try:
            self.precondition(case)
        except PropertyPreconditionError as exc:
            return self.result(case, PropertyStatus.SKIPPED, exc.message)
        return self.check(case)

    def run(self, seed: int) -> PropertyResult:
        """Draw a case from ``seed`` and check it."""
        cfg = self.cfg.with_seed(seed)
        gen = Generator(cfg)
        try:
            case = self.generate(gen, seed)
        except (GenerationBudgetError, NoTermError) as exc:
            logger.debug("%s seed %d: nothing generated: %s", self.name, seed, exc)
            return PropertyResult(self.name, PropertyStatus.SKIPPED, seed, str(exc))
        return self.check_case(case)


class SubjectReduction(BaseProperty):
    """Every step of the trace keeps a type below the previous one.

    Downcasts can reduce to casts between unrelated classes, so with ``+udcast``
    every step is typed with stupid casts enabled.
    """

    name = "subject-reduction"
    requires_no_udcast = True
    types_udcast_with_stupid_casts = True

    def check(self, case: Case) -> PropertyResult:
        assert case.term is not None
        checker = self.checker(case.ct)
        evaluator = Evaluator(case.ct)
        current = case.term
        current_type = checker.t_inf(EMPTY_ENV, current).type
        for index in range(1, self.cfg.max_steps + 1):
            outcome = evaluator.step(current)
            if not isinstance(outcome, Stepped):
                return self.result(case, PropertyStatus.PASS)
            judgement = checker.t_inf(EMPTY_ENV, outcome.term)
            witness = {
                "step": index,
                "rule": outcome.rule,
                "before": pretty(current),
                "after": pretty(outcome.term),
                "expected": str(current_type),
            }
            if not judgement.ok:
                return self.result(
                    case,
                    PropertyStatus.FAIL,
                    f"step {index} is ill typed: {judgement.error}",
                    **witness,
                )
            if not subtype(case.ct, judgement.type, current_type):
                return self.result(
                    case,
                    PropertyStatus.FAIL,
                    f"step {index} types at {judgement.type}, not below {current_type}",
                    found=str(judgement.type),
                    **witness,
                )
            current, current_type = outcome.term, judgement.type
        return self.result(
            case, PropertyStatus.INCONCLUSIVE, f"no value within {self.cfg.max_steps} steps"
        )


def _undecorated_use(t: Term) -> Term | None:
    for sub in subterms(t):
        if isinstance(sub, Invoke | FieldAccess) and isinstance(sub.target, PureLambda):
            return sub
    return None


class Progress(BaseProperty):
    """A typed closed term that stops reducing is a proper value."""

    name = "progress"
    requires_no_udcast = True

    def check(self, case: Case) -> PropertyResult:
        assert case.term is not None
        result = Evaluator(case.ct).evaluate(case.term, self.cfg.max_steps)
        for term in result.trace:
            bare = _undecorated_use(term)
            if bare is not None:
                return self.result(
                    case,
                    PropertyStatus.FAIL,
                    "a λ is used without a target type",
                    redex=pretty(bare),
                    steps=result.steps,
                )
        match result.final:
            case Value():
                return self.result(case, PropertyStatus.PASS)
            case Stuck(reason=reason):
                return self.result(
                    case,
                    PropertyStatus.FAIL,
                    f"stuck after {result.steps} steps: {reason.describe()}",
                    steps=result.steps,
                    stuck=stuck_to_dict(reason),
                )
            case BudgetExhausted():
                return self.result(
                    case, PropertyStatus.INCONCLUSIVE, f"no value within {self.cfg.max_steps} steps"
                )
        raise AssertionError(result.final)


class StuckClassification(BaseProperty):
    """With downcasts allowed, every stuck state is a failed cast."""

    name = "stuck-classification"

    def __init__(self, cfg: GenConfig | None = None) -> None:
        super().__init__((cfg or GenConfig()).with_features("+udcast"))

    def check(self, case: Case) -> PropertyResult:
        assert case.term is not None
        result = Evaluator(case.ct).evaluate(case.term, self.cfg.max_steps)
        match result.final:
            case Stuck(reason=FailedObjectCast() | FailedLambdaCast()) | Value():
                return self.result(case, PropertyStatus.PASS)
            case Stuck(reason=reason):
                return self.result(
                    case,
                    PropertyStatus.FAIL,
                    f"stuck on something other than a cast: {reason.describe()}",
                    stuck=stuck_to_dict(reason),
                )
        return self.result(
            case, PropertyStatus.INCONCLUSIVE, f"no value within {self.cfg.max_steps} steps"
        )


class _OpenTermProperty(BaseProperty):
    types_udcast_with_stupid_casts = True

    def generate(self, gen: Generator, seed: int) -> Case:
        ct = gen.table()
        drawn = gen.open_term(ct)
        return Case(seed, ct, drawn.term, drawn.env, drawn.target)

    def precondition(self, case: Case) -> None:
        if case.term is None or case.target is None:
            raise PropertyPreconditionError("no open term to check")
        judgement = self.checker(case.ct).t_ck(case.env, case.term, case.target)
        if not judgement.ok:
            raise PropertyPreconditionError(f"term does not check: {judgement.error}")


class Substitution(_OpenTermProperty):
    """Replacing a variable by a decorated value of its type preserves typing.

    Checking against the original target must still succeed, and where the
    term synthesises a type the substituted term synthesises a subtype.
    """

    name = "substitution"

    def generate(self, gen: Generator, seed: int) -> Case:
        case = super().generate(gen, seed)
        var = gen.pick(sorted(case.env))
        value = gen.terms(case.ct).value(case.env[var], max(1, self.cfg.max_term_depth // 2))
        return case.replace(var=var, value=value)

    def precondition(self, case: Case) -> None:
        super().precondition(case)
        if case.var is None or case.value is None or case.var not in case.env:
            raise PropertyPreconditionError("no variable to substitute")
        judgement = self.checker(case.ct).t_ck(EMPTY_ENV, case.value, case.env[case.var])
        if not judgement.ok:
            raise PropertyPreconditionError(f"value does not check: {judgement.error}")

    def check(self, case: Case) -> PropertyResult:
        assert case.term is not None and case.target is not None
        assert case.var is not None and case.value is not None
        checker = self.checker(case.ct)
        replacement = decorate(case.value, case.env[case.var])
        substituted = substitute(case.term, {case.var: replacement})
        env = case.env.without(case.var)
        witness = {"substituted": pretty(substituted), "target": str(case.target)}

        checked = checker.t_ck(env, substituted, case.target)
        if not checked.ok:
            return self.result(
                case,
                PropertyStatus.FAIL,
                f"checking against {case.target} fails: {checked.error}",
                **witness,
            )
        before = checker.t_inf(case.env, case.term)
        if before.ok:
            after = checker.t_inf(env, substituted)
            if not after.ok:
                return self.result(
                    case,
                    PropertyStatus.FAIL,
                    f"substituted term has no type: {after.error}",
                    **witness,
                )
            if not subtype(case.ct, after.type, before.type):
                return self.result(
                    case,
                    PropertyStatus.FAIL,
                    f"substituted term types at {after.type}, not below {before.type}",
                    **witness,
                )
        return self.result(case, PropertyStatus.PASS)


class Weakening(_OpenTermProperty):
    """An extra unused binding changes no typing result."""

    name = "weakening"

    def check(self, case: Case) -> PropertyResult:
        assert case.term is not None and case.target is not None
        checker = self.checker(case.ct)
        fresh = "w"
        while fresh in case.env:
            fresh += "_"
        wider = case.env.bind(fresh, OBJECT_TYPE)
        before = checker.t_ck(case.env, case.term, case.target)
        after = checker.t_ck(wider, case.term, case.target)
        if before.ok != after.ok or (before.ok and before.type != after.type):
            return self.result(
                case,
                PropertyStatus.FAIL,
                "typing changed under a larger environment",
                before=str(before.result),
                after=str(after.result),
            )
        inferred, widened = checker.t_inf(case.env, case.term), checker.t_inf(wider, case.term)
        if inferred.ok != widened.ok or (inferred.ok and inferred.type != widened.type):
            return self.result(
                case,
                PropertyStatus.FAIL,
                "inferred type changed under a larger environment",
                before=str(inferred.result),
                after=str(widened.result),
            )
        return self.result(case, PropertyStatus.PASS)


class Lookup(BaseProperty):
    """Lookup lemmas over one table.

    Fields of a superclass are a prefix of the subclass's, method types are
    stable down the hierarchy, every reachable body checks against its header
    in its owner, interface-only types split their headers disjointly into
    abstract and default ones, and caching changes no answer.
    """

    name = "lookup"

    def generate(self, gen: Generator, seed: int) -> Case:
        return Case(seed, gen.table())

    def precondition(self, case: Case) -> None:
        problems = ok_table(case.ct)
        if problems:
            raise PropertyPreconditionError(f"table is not well formed: {problems[0]}")

    def _types(self, ct: ClassTable) -> list[RefType]:
        types = [RefType((name,)) for name in (OBJECT, *ct.declared_names())]
        interfaces = [d.name for d in ct.interfaces()]
        for head in (OBJECT, *(d.name for d in ct.classes()), *interfaces):
            for other in interfaces:
                if other != head:
                    tau = RefType((head, other))
                    if ct.is_type(tau):
                        types.append(tau)
        return types

    def check(self, case: Case) -> PropertyResult:
        ct = case.ct
        checker = self.checker(ct)
        for sub, sup in class_pairs(ct):
            below, above = ct.fields(sub), ct.fields(sup)
            if below[: len(above)] != above:
                return self.result(
                    case, PropertyStatus.FAIL, f"fields({sup}) is not a prefix of fields({sub})"
                )
        types = [tau for tau in self._types(ct) if ct.is_type(tau)]
        for sigma in types:
            for tau in types:
                if not subtype(ct, sigma, tau):
                    continue
                for header in ct.require_mh(tau):
                    if ct.mtype(header.name, sigma) != ct.mtype(header.name, tau):
                        return self.result(
                            case,
                            PropertyStatus.FAIL,
                            f"mtype({header.name}) differs between {sigma} and {tau}",
                        )
        for tau in types:
            failure = self._bodies(case, checker, tau)
            if failure is not None:
                return failure
            if ct.split(tau)[0] is None:
                abstract, defaults = ct.a_mh(tau), ct.d_mh(tau)
                if abstract is None or defaults is None:
                    return self.result(case, PropertyStatus.FAIL, f"mh({tau}) does not split")
                if abstract.names & defaults.names or abstract.union(defaults) != ct.mh(tau):
                    return self.result(
                        case, PropertyStatus.FAIL, f"abstract and default headers of {tau} overlap"
                    )
        disagreements = lookup_disagreements(ct)
        if disagreements:
            return self.result(
                case,
                PropertyStatus.FAIL,
                f"cached lookups disagree: {disagreements[0]}",
                queries=disagreements,
            )
        return self.result(case, PropertyStatus.PASS)

    def _bodies(self, case: Case, checker: TypeChecker, tau: RefType) -> PropertyResult | None:
        ct = case.ct
        abstract = ct.a_mh(tau) if ct.split(tau)[0] is None else None
        for header in ct.require_mh(tau):
            if abstract is not None and header in abstract:
                continue
            try:
                found = ct.mbody(header.name, tau)
            except AmbiguousDefaultError:
                if tau.is_nominal:
                    return self.result(
                        case, PropertyStatus.FAIL, f"ambiguous body for {header.name} in {tau}"
                    )
                continue
            if found is None:
                if tau.is_nominal and ct.is_class(tau.name):
                    return self.result(
                        case, PropertyStatus.FAIL, f"no body for {header.name} in {tau}"
                    )
                continue
            owner = RefType((found.owner,))
            if not subtype(ct, tau, owner):
                return self.result(
                    case, PropertyStatus.FAIL, f"body of {header.name} comes from unrelated {owner}"
                )
            env = TypeEnv(zip(found.params, header.param_types, strict=True)).bind(THIS, owner)
            judgement = checker.t_ck(env, found.body, header.result)
            if not judgement.ok:
                return self.result(
                    case,
                    PropertyStatus.FAIL,
                    f"body of {header.name} for {tau} does not check: {judgement.error}",
                )
        return None


class SubtypingOracle(Lookup):
    """Subtyping and lub agree with a brute-force closure of the table."""

    name = "oracles"

    def check(self, case: Case) -> PropertyResult:
        oracle = SubtypeOracle(case.ct)
        disagreements = oracle.disagreements()
        if disagreements:
            return self.result(
                case, PropertyStatus.FAIL, disagreements[0], pairs=disagreements[:20]
            )
        pretypes = [tau for tau in oracle.pretypes() if case.ct.is_type(tau)]
        for first in pretypes:
            for second in pretypes:
                problem = oracle.check_lub(first, second)
                if problem is not None:
                    return self.result(case, PropertyStatus.FAIL, problem)
        return self.result(case, PropertyStatus.PASS)


class Determinism(BaseProperty):
    """Exactly one redex applies at every step, and it is the one taken."""

    name = "determinism"

    def check(self, case: Case) -> PropertyResult:
        assert case.term is not None
        evaluator = Evaluator(case.ct)
        current = case.term
        for index in range(self.cfg.max_steps + 1):
            redexes = enumerate_redexes(case.ct, current)
            outcome = evaluator.step(current)
            if not isinstance(outcome, Stepped):
                if redexes:
                    return self.result(
                        case,
                        PropertyStatus.FAIL,
                        f"step {index}: evaluation stopped but {len(redexes)} redex(es) remain",
                        term=pretty(current),
                    )
                return self.result(case, PropertyStatus.PASS)
            if len(redexes) != 1:
                return self.result(
                    case,
                    PropertyStatus.FAIL,
                    f"step {index}: {len(redexes)} redexes apply",
                    term=pretty(current),
                    redexes=[rule for _, rule in redexes],
                )
            [(path, rule)] = redexes
            if rule != outcome.rule or len(path) != len(outcome.congruence):
                return self.result(
                    case,
                    PropertyStatus.FAIL,
                    f"step {index}: took {outcome.rule} but the only redex is {rule}",
                    term=pretty(current),
                )
            current = outcome.term
        return self.result(
            case, PropertyStatus.INCONCLUSIVE, f"no value within {self.cfg.max_steps} steps"
        )


class RoundTrip(BaseProperty):
    """Printing then parsing a generated program gives the program back."""

    name = "round-trip"

    def precondition(self, case: Case) -> None:
        if case.term is None:
            raise PropertyPreconditionError("no term to print")

    def check(self, case: Case) -> PropertyResult:
        assert case.term is not None
        program = SourceProgram(tuple(case.ct), case.term)
        source = pretty(program)
        parsed = parse_program(source)
        if parsed != program:
            return self.result(
                case, PropertyStatus.FAIL, "parse(pretty(p)) differs from p", source=source
            )
        return self.result(case, PropertyStatus.PASS)


PROPERTIES: dict[str, type[BaseProperty]] = {
    cls.name: cls
    for cls in (
        SubjectReduction,
        Progress,
        Substitution,
        Lookup,
        Determinism,
        Weakening,
        StuckClassification,
        SubtypingOracle,
        RoundTrip,
    )
}


def get_property(name: str, cfg: GenConfig | None = None) -> BaseProperty:
    """Instantiate a property by name.

    Raises:
        KeyError: Unknown property name.
    """
    try:
        return PROPERTIES[name](cfg)
    except KeyError:
        known = ", ".join(PROPERTIES)
        raise KeyError(f"unknown property '{name}' (expected one of: {known})") from None


def _closed(
    ct: ClassTable, t: Term, cfg: GenConfig | None, prop: type[BaseProperty]
) -> PropertyResult:
    return prop(cfg).check_case(Case(0, ct, t))


def check_subject_reduction(
    ct: ClassTable, t: Term, cfg: GenConfig | None = None
) -> PropertyResult:
    """Subject reduction along the full trace of ``t``."""
    return _closed(ct, t, cfg, SubjectReduction)


def check_progress(ct: ClassTable, t: Term, cfg: GenConfig | None = None) -> PropertyResult:
    """Evaluation of ``t`` ends in a value, never stuck."""
    return _closed(ct, t, cfg, Progress)


def check_substitution_lemma(
    ct: ClassTable,
    samples: list[tuple[TypeEnv, Term, PreType, str, Term]],
    cfg: GenConfig | None = None,
) -> PropertyResult:
    """Check ``(env, term, target, var, value)`` samples.

    The first failure wins; otherwise any passing sample makes the whole check pass.
    """
    prop = Substitution(cfg)
    result = PropertyResult(prop.name, PropertyStatus.SKIPPED, 0, "no samples")
    passed: PropertyResult | None = None
    for env, term, target, var, value in samples:
        result = prop.check_case(Case(0, ct, term, env, target, var, value))
        if result.failed:
            return result
        if result.status is PropertyStatus.PASS and passed is None:
            passed = result
    return passed if passed is not None else result


__all__ = [
    "PROPERTIES",
    "BaseProperty",
    "Case",
    "Determinism",
    "Lookup",
    "Progress",
    "PropertyResult",
    "PropertyStatus",
    "RoundTrip",
    "StuckClassification",
    "SubjectReduction",
    "Substitution",
    "SubtypingOracle",
    "Weakening",
    "check_progress",
    "check_subject_reduction",
    "check_substitution_lemma",
    "get_property",
]
