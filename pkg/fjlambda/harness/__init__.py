"""Property harness: random programs, metatheory checks, shrinking and replay."""

from fjlambda.harness.config import FEATURES, GenConfig
from fjlambda.harness.corpus import CounterExample, golden_programs, replay
from fjlambda.harness.generate import Generator, gen_table, gen_typed_term
from fjlambda.harness.properties import (
    PROPERTIES,
    BaseProperty,
    PropertyResult,
    PropertyStatus,
    check_progress,
    check_subject_reduction,
    check_substitution_lemma,
    get_property,
)
from fjlambda.harness.runner import FuzzReport, run_property

__all__ = [
    "FEATURES",
    "PROPERTIES",
    "BaseProperty",
    "CounterExample",
    "FuzzReport",
    "GenConfig",
    "Generator",
    "PropertyResult",
    "PropertyStatus",
    "check_progress",
    "check_subject_reduction",
    "check_substitution_lemma",
    "gen_table",
    "gen_typed_term",
    "get_property",
    "golden_programs",
    "replay",
    "run_property",
]
