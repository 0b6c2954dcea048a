"""Generator configuration for the property harness."""

from __future__ import annotations

from typing import Any, ClassVar, Final

from fjlambda.evaluator import DEFAULT_MAX_STEPS
from fjlambda.settings import ValidationIssue

FEATURES: Final[tuple[str, ...]] = (
    "lambdas",
    "defaults",
    "intersections",
    "casts",
    "conditionals",
    "udcast",
)

# Relative weights of term productions; a production is only drawn when it applies.
DEFAULT_WEIGHTS: Final[dict[str, float]] = {
    "var": 3.0,
    "new": 3.0,
    "lambda": 3.0,
    "invoke": 4.0,
    "field": 2.0,
    "cast": 1.5,
    "cond": 1.0,
    "bool": 1.0,
}

_COUNT_FIELDS: Final[tuple[str, ...]] = (
    "max_classes",
    "max_interfaces",
    "max_hierarchy_depth",
    "max_term_depth",
    "max_fields",
    "max_methods",
    "max_params",
    "max_steps",
    "max_attempts",
    "workers",
)


class GenConfig:
    """Container for generation settings.

    Counts bound the size of generated tables and terms. Feature toggles are
    independent; ``udcast`` lets the term generator emit downcasts; progress excludes
    them and subject reduction then types with stupid casts.
    """

    _SERIALIZED_FIELDS: ClassVar[tuple[str, ...]] = (
        "seed",
        *_COUNT_FIELDS,
        *FEATURES,
        "weights",
    )

    def __init__(self, **kwargs: Any) -> None:
        """Initialize the configuration from keyword arguments."""
        self.seed: int = kwargs.get("seed", 0)

        # Table shape
        self.max_classes: int = kwargs.get("max_classes", 4)
        self.max_interfaces: int = kwargs.get("max_interfaces", 3)
        self.max_hierarchy_depth: int = kwargs.get("max_hierarchy_depth", 3)
        self.max_fields: int = kwargs.get("max_fields", 2)
        self.max_methods: int = kwargs.get("max_methods", 2)
        self.max_params: int = kwargs.get("max_params", 2)

        # Terms
        self.max_term_depth: int = kwargs.get("max_term_depth", 4)

        # Features
        self.lambdas: bool = bool(kwargs.get("lambdas", True))
        self.defaults: bool = bool(kwargs.get("defaults", True))
        self.intersections: bool = bool(kwargs.get("intersections", True))
        self.casts: bool = bool(kwargs.get("casts", True))
        self.conditionals: bool = bool(kwargs.get("conditionals", True))
        self.udcast: bool = bool(kwargs.get("udcast", False))

        weights = kwargs.get("weights") or {}
        self.weights: dict[str, float] = {**DEFAULT_WEIGHTS, **weights}

        # Budgets
        self.max_steps: int = kwargs.get("max_steps", DEFAULT_MAX_STEPS)
        self.max_attempts: int = kwargs.get("max_attempts", 50)
        self.workers: int = kwargs.get("workers", 1)

    def with_seed(self, seed: int) -> GenConfig:
        return GenConfig(**{**self.to_dict(), "seed": seed})

    def with_features(self, features: str) -> GenConfig:
        """Toggle features from a list like ``"+udcast,-lambdas"``.

        A bare name switches the feature on.

        Raises:
            ValueError: An entry names an unknown feature.
        """
        values = self.to_dict()
        for raw in features.split(","):
            entry = raw.strip()
            if not entry:
                continue
            enabled = not entry.startswith("-")
            name = entry.lstrip("+-").strip()
            if name not in FEATURES:
                raise ValueError(
                    f"unknown feature '{name}' (expected one of: {', '.join(FEATURES)})"
                )
            values[name] = enabled
        return GenConfig(**values)

    def validate(self) -> list[ValidationIssue]:
        """Return a list of validation issues for the current configuration."""
        issues: list[ValidationIssue] = []
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            issues.append(ValidationIssue("seed", "Seed must be an integer."))
        elif self.seed < 0:
            issues.append(ValidationIssue("seed", "Seed cannot be negative."))
        for name in _COUNT_FIELDS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                issues.append(ValidationIssue(name, "Value must be an integer."))
            elif value < 1:
                issues.append(ValidationIssue(name, "Value must be at least 1."))
        for production, weight in self.weights.items():
            if production not in DEFAULT_WEIGHTS:
                issues.append(ValidationIssue("weights", f"Unknown production '{production}'."))
            elif not isinstance(weight, int | float) or weight < 0:
                issues.append(
                    ValidationIssue("weights", f"Weight of '{production}' must be non-negative.")
                )
        return issues

    def to_dict(self) -> dict[str, Any]:
        """Serialize the configuration to a plain dictionary."""
        result = {key: getattr(self, key) for key in self._SERIALIZED_FIELDS}
        result["weights"] = dict(self.weights)
        return result

    @classmethod
    def from_dict(cls, data: dict[str, Any] | None) -> GenConfig:
        """Create a configuration from a previously serialized dictionary."""
        if data is None:
            return cls()
        if not isinstance(data, dict):
            raise TypeError("GenConfig.from_dict expects a dictionary.")
        return cls(**{k: v for k, v in data.items() if k in cls._SERIALIZED_FIELDS})

    def __repr__(self) -> str:
        enabled = [name for name in FEATURES if getattr(self, name)]
        return f"GenConfig(seed={self.seed}, features={'+'.join(enabled) or 'none'})"
