"""Shared engine settings for type checking and evaluation."""

from __future__ import annotations

import os
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any, ClassVar, Final

from fjlambda.evaluator import DEFAULT_MAX_STEPS

MAX_STEPS_ENV: Final[str] = "FJL_MAX_STEPS"


@dataclass(frozen=True, slots=True)
class ValidationIssue:
    """Represents a single validation issue for a settings object."""

    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


class EngineSettings:
    """Container for interpreter settings.

    ``max_steps`` is resolved in order: explicit keyword, the ``FJL_MAX_STEPS``
    environment variable (via ``from_env``), then the built-in default.
    """

    _SERIALIZED_FIELDS: ClassVar[tuple[str, ...]] = (
        "max_steps",
        "stupid_cast",
        "check_annotations",
        "unsafe",
    )

    def __init__(self, **kwargs: Any) -> None:
        """Initialize settings from keyword arguments."""
        self.max_steps: Any = kwargs.get("max_steps", DEFAULT_MAX_STEPS)
        # Typing
        self.stupid_cast: bool = bool(kwargs.get("stupid_cast", False))
        # Evaluation
        self.check_annotations: bool = bool(kwargs.get("check_annotations", False))
        self.unsafe: bool = bool(kwargs.get("unsafe", False))

    @classmethod
    def from_env(
        cls, environ: Mapping[str, str] | None = None, **overrides: Any
    ) -> EngineSettings:
        """Build settings from the environment; keyword overrides that are not None win."""
        environ = os.environ if environ is None else environ
        values: dict[str, Any] = {}
        raw = environ.get(MAX_STEPS_ENV, "").strip()
        if raw:
            try:
                values["max_steps"] = int(raw)
            except ValueError:
                values["max_steps"] = raw
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def validate(self) -> list[ValidationIssue]:
        """Return a list of validation issues for the current settings."""
        issues: list[ValidationIssue] = []
        if isinstance(self.max_steps, bool) or not isinstance(self.max_steps, int):
            issues.append(ValidationIssue("max_steps", "Step budget must be an integer."))
        elif self.max_steps < 0:
            issues.append(ValidationIssue("max_steps", "Step budget cannot be negative."))
        if self.unsafe and self.stupid_cast:
            issues.append(
                ValidationIssue(
                    "stupid_cast", "Stupid casts only affect type checking, which unsafe skips."
                )
            )
        return issues

    def to_dict(self) -> dict[str, Any]:
        """Serialize settings to a plain dictionary."""
        return {key: getattr(self, key) for key in self._SERIALIZED_FIELDS}

    @classmethod
    def from_dict(cls, data: dict[str, Any] | None) -> EngineSettings:
        """Create settings from a previously serialized dictionary."""
        if data is None:
            return cls()
        if not isinstance(data, dict):
            raise TypeError("EngineSettings.from_dict expects a dictionary.")
        return cls(**{k: v for k, v in data.items() if k in cls._SERIALIZED_FIELDS})

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v!r}" for k, v in self.to_dict().items())
        return f"EngineSettings({inner})"
