"""Exception hierarchy shared by the parser, lookups, type checker and evaluator."""

from __future__ import annotations

from collections.abc import Sequence
from typing import TYPE_CHECKING, Any

try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):  # type: ignore[no-redef]
        __str__ = str.__str__
        __format__ = str.__format__

if TYPE_CHECKING:
    from fjlambda.syntax import SourcePosition


class FJLError(Exception):
    """Base class for every error raised by fjlambda.

    Attributes:
        position: Source position of the offending node, when known.
        context: Optional high-level description of what was being attempted.
        hints: Suggested fixes shown by the CLI.
    """

    def __init__(
        self,
        message: str,
        *,
        position: SourcePosition | None = None,
        context: str | None = None,
        hints: Sequence[str] | None = None,
    ) -> None:
        super().__init__(message)
        self.message = message
        self.position = position
        self.context = context
        self.hints = list(hints or [])

    def __reduce__(self) -> tuple[Any, ...]:
        """Make errors picklable for process-pool fuzz workers."""
        return (_restore_error, (self.__class__, self.__dict__.copy()))

    def __str__(self) -> str:
        if self.position is None:
            return self.message
        return f"{self.position}: {self.message}"


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class ParseError(FJLError):
    """Syntax error with line/column information."""


class LexError(ParseError):
    """Unrecognised character in the source text."""


class DuplicateDeclarationError(ParseError):
    """Two declarations (or two members of one declaration) share a name."""


class MixedLambdaParametersError(ParseError):
    """A λ mixes typed and untyped parameters."""


# ---------------------------------------------------------------------------
# Class table
# ---------------------------------------------------------------------------


class ClassTableError(FJLError):
    """Base class for lookup and table-construction failures."""


class UnknownNameError(ClassTableError):
    """A nominal type name that is neither declared nor ``Object``."""

    def __init__(self, name: str, **kwargs: Any) -> None:
        super().__init__(f"unknown type name '{name}'", **kwargs)
        self.name = name


class HeaderConflictError(ClassTableError):
    """The header union is undefined: one method name, two different headers."""

    def __init__(self, method: str, first: str, second: str, **kwargs: Any) -> None:
        super().__init__(
            f"conflicting headers for method '{method}': {first} vs {second}", **kwargs
        )
        self.method = method
        self.first = first
        self.second = second


class AmbiguousDefaultError(ClassTableError):
    """No unique most specific interface provides a default body."""

    def __init__(self, method: str, providers: Sequence[str], **kwargs: Any) -> None:
        names = ", ".join(providers)
        super().__init__(
            f"ambiguous default for method '{method}': provided by unrelated {names}", **kwargs
        )
        self.method = method
        self.providers = list(providers)


class CyclicInheritanceError(ClassTableError):
    """The extends/implements graph contains a cycle."""

    def __init__(self, cycle: Sequence[str], **kwargs: Any) -> None:
        super().__init__("cyclic inheritance: " + " -> ".join(cycle), **kwargs)
        self.cycle = list(cycle)


class MalformedDeclarationError(ClassTableError):
    """A declaration or pre-type has the wrong shape for the table it is used with."""


# ---------------------------------------------------------------------------
# Typing
# ---------------------------------------------------------------------------


class TypeErrorKind(StrEnum):
    """Categories of type errors reported by the checker."""

    UNBOUND_VAR = "unbound-var"
    NO_SUCH_FIELD = "no-such-field"
    NO_SUCH_METHOD = "no-such-method"
    ARG_MISMATCH = "arg-mismatch"
    LAMBDA_NEEDS_TARGET = "lambda-needs-target"
    TARGET_NOT_FUNCTIONAL = "target-not-functional"
    ARITY_MISMATCH = "arity-mismatch"
    PARAM_ANNOTATION_MISMATCH = "param-annotation-mismatch"
    BAD_CAST = "bad-cast"
    COND_BRANCH_MISMATCH = "cond-branch-mismatch"
    NOT_BOOLEAN_GUARD = "not-boolean-guard"
    ILL_FORMED_TYPE = "ill-formed-type"


class TypeCheckError(FJLError):
    """A failed typing judgement.

    Attributes:
        kind: Error category.
        rule: Name of the typing rule whose premise failed.
        detail: Short machine-friendly description of the failed premise.
    """

    def __init__(
        self,
        kind: TypeErrorKind,
        message: str,
        *,
        rule: str | None = None,
        detail: str | None = None,
        **kwargs: Any,
    ) -> None:
        super().__init__(message, **kwargs)
        self.kind = kind
        self.rule = rule
        self.detail = detail or message


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


class EvaluationError(FJLError):
    """Base class for evaluator misuse (as opposed to stuck terms, which are results)."""


class OpenTermError(EvaluationError):
    """Evaluation was asked to reduce a term with free variables."""

    def __init__(self, free: Sequence[str], **kwargs: Any) -> None:
        names = ", ".join(sorted(free))
        super().__init__(f"cannot evaluate open term (free variables: {names})", **kwargs)
        self.free = sorted(free)


class AnnotationMismatchError(EvaluationError):
    """A typed λ's annotations disagree with the abstract header it is invoked through."""


# ---------------------------------------------------------------------------
# Harness
# ---------------------------------------------------------------------------


class HarnessError(FJLError):
    """Base class for generator and property-runner failures."""


class GenerationBudgetError(HarnessError):
    """The generator ran out of attempts before producing a valid table or term."""


class PropertyPreconditionError(HarnessError):
    """A property was asked to check an input outside its precondition."""


def _restore_error(cls: type[FJLError], state: dict[str, Any]) -> FJLError:
    """Rebuild a pickled error without re-running subclass constructors."""
    error = cls.__new__(cls)
    Exception.__init__(error, state.get("message", ""))
    error.__dict__.update(state)
    return error


class IncomparableTypesError(FJLError):
    """No least upper bound exists: ``boolean`` against a reference type."""
