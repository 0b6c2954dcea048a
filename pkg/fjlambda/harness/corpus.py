"""Counterexample corpus and the golden example programs.

A counterexample is stored as two files sharing a stem,
``<property>-<seed>.fjl`` holding the table and ``main = <term>;`` and
``<property>-<seed>.json`` holding the metadata needed to replay it.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from fjlambda.class_table import ClassTable
from fjlambda.errors import HarnessError
from fjlambda.harness.config import GenConfig
from fjlambda.harness.properties import Case, PropertyResult, get_property
from fjlambda.parser import SourceProgram, parse_program, parse_term, parse_type
from fjlambda.printer import pretty
from fjlambda.report import save_json
from fjlambda.syntax import TypeEnv
from fjlambda.utils import ensure_dir

logger = logging.getLogger(__name__)

GOLDEN_PACKAGE = "fjlambda.corpus"


@dataclass
class CounterExample:
    """A replayable property violation.

    Attributes:
        property: Name of the violated property.
        seed: Seed the case was drawn from.
        table_source: The class table in concrete syntax.
        term_source: The term in concrete syntax, if the property has one.
        message: What went wrong.
        witness: Property-specific details (for example the offending step).
        shrunk: Whether the case went through the shrinker.
        extra: Open-term context: ``env``, ``target``, ``var`` and ``value``.
    """

    property: str
    seed: int
    table_source: str
    term_source: str | None
    message: str
    witness: dict[str, Any] = field(default_factory=dict)
    shrunk: bool = False
    extra: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_result(cls, result: PropertyResult, *, shrunk: bool = False) -> CounterExample:
        case = result.case
        if case is None:
            raise HarnessError(f"{result.property} result for seed {result.seed} has no case")
        extra: dict[str, Any] = {}
        if case.env:
            extra["env"] = {x: str(tau) for x, tau in case.env.items()}
        if case.target is not None:
            extra["target"] = str(case.target)
        if case.var is not None:
            extra["var"] = case.var
        if case.value is not None:
            extra["value"] = pretty(case.value)
        return cls(
            property=result.property,
            seed=result.seed,
            table_source=pretty(SourceProgram(tuple(case.ct))),
            term_source=pretty(case.term) if case.term is not None else None,
            message=result.message,
            witness=result.witness,
            shrunk=shrunk,
            extra=extra,
        )

    @property
    def stem(self) -> str:
        return f"{self.property}-{self.seed}"

    def source(self) -> str:
        """The ``.fjl`` file contents."""
        text = self.table_source.rstrip()
        if self.term_source is not None:
            main = f"main = {self.term_source};"
            text = f"{text}\n\n{main}" if text else main
        return text + "\n"

    def to_case(self) -> Case:
        program = parse_program(self.source())
        env = TypeEnv((x, parse_type(tau)) for x, tau in self.extra.get("env", {}).items())
        target = self.extra.get("target")
        value = self.extra.get("value")
        return Case(
            seed=self.seed,
            ct=ClassTable.from_program(program),
            term=program.main,
            env=env,
            target=parse_type(target) if target is not None else None,
            var=self.extra.get("var"),
            value=parse_term(value) if value is not None else None,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "property": self.property,
            "seed": self.seed,
            "message": self.message,
            "witness": self.witness,
            "shrunk": self.shrunk,
            "extra": self.extra,
            "table_source": self.table_source,
            "term_source": self.term_source,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> CounterExample:
        return cls(
            property=data["property"],
            seed=int(data["seed"]),
            table_source=data.get("table_source", ""),
            term_source=data.get("term_source"),
            message=data.get("message", ""),
            witness=data.get("witness", {}),
            shrunk=bool(data.get("shrunk", False)),
            extra=data.get("extra", {}),
        )


def save_counterexample(example: CounterExample, corpus_dir: Path) -> Path:
    """Write the ``.fjl`` and ``.json`` pair; returns the ``.fjl`` path."""
    ensure_dir(corpus_dir)
    source_path = corpus_dir / f"{example.stem}.fjl"
    source_path.write_text(example.source(), encoding="utf-8")
    save_json(corpus_dir / f"{example.stem}.json", example.to_dict())
    logger.info("Saved counterexample: %s", source_path)
    return source_path


def load_counterexample(path: Path) -> CounterExample:
    """Load a counterexample from either file of its pair.

    The ``.fjl`` file is authoritative for the program, so a hand-edited
    source replays as edited.

    Raises:
        HarnessError: The metadata file is missing.
    """
    meta_path = path.with_suffix(".json")
    if not meta_path.exists():
        raise HarnessError(f"no metadata next to {path}", hints=[f"expected {meta_path.name}"])
    with open(meta_path, encoding="utf-8") as f:
        example = CounterExample.from_dict(json.load(f))
    source_path = path.with_suffix(".fjl")
    if source_path.exists():
        program = parse_program(source_path.read_text(encoding="utf-8"))
        example.table_source = pretty(SourceProgram(program.decls))
        example.term_source = pretty(program.main) if program.main is not None else None
    return example


def replay(path: Path, cfg: GenConfig | None = None) -> PropertyResult:
    """Re-check a stored counterexample against its property."""
    example = load_counterexample(path)
    prop = get_property(example.property, cfg)
    result = prop.check_case(example.to_case())
    logger.debug("replayed %s: %s", path.name, result.status)
    return result


def golden_programs() -> dict[str, str]:
    """The example programs shipped with the package, by file stem."""
    root = resources.files(GOLDEN_PACKAGE)
    return {
        entry.name.removesuffix(".fjl"): entry.read_text(encoding="utf-8")
        for entry in sorted(root.iterdir(), key=lambda e: e.name)
        if entry.name.endswith(".fjl")
    }


def golden_program(name: str) -> SourceProgram:
    """Parse one shipped example program.

    Raises:
        KeyError: No example with that name.
    """
    return parse_program(golden_programs()[name])


__all__ = [
    "CounterExample",
    "golden_program",
    "golden_programs",
    "load_counterexample",
    "replay",
    "save_counterexample",
]
