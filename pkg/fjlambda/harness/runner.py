"""Fuzz runner: one property over a range of seeds, sequential or in a process pool."""

from __future__ import annotations

import dataclasses
import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from tqdm import tqdm

from fjlambda.errors import HarnessError, PropertyPreconditionError
from fjlambda.harness.config import GenConfig
from fjlambda.harness.corpus import CounterExample, save_counterexample
from fjlambda.harness.properties import PropertyResult, PropertyStatus, get_property
from fjlambda.harness.shrink import shrink
from fjlambda.utils import Timer, format_duration

logger = logging.getLogger(__name__)


@dataclass
class FuzzReport:
    """Summary of a fuzz run."""

    property: str
    seed: int
    runs: int
    counts: dict[str, int]
    counterexamples: list[CounterExample] = field(default_factory=list)
    paths: list[Path] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return self.counts.get(PropertyStatus.FAIL, 0) == 0

    def summary(self) -> str:
        parts = ", ".join(f"{self.counts.get(s, 0)} {s}" for s in PropertyStatus)
        took = format_duration(self.elapsed)
        return f"{self.property}: {self.runs} runs from seed {self.seed}: {parts} ({took})"

    def to_dict(self) -> dict[str, Any]:
        return {
            "property": self.property,
            "seed": self.seed,
            "runs": self.runs,
            "ok": self.ok,
            "counts": {str(s): self.counts.get(s, 0) for s in PropertyStatus},
            "elapsed": self.elapsed,
            "counterexamples": [c.to_dict() for c in self.counterexamples],
            "paths": [str(p) for p in self.paths],
        }


def _run_one(
    name: str, cfg_data: dict[str, Any], seed: int, shrink_failures: bool = True
) -> tuple[PropertyResult, CounterExample | None]:
    """Run one seed; failures are shrunk here so only picklable data leaves the worker."""
    prop = get_property(name, GenConfig.from_dict(cfg_data))
    result = prop.run(seed)
    example = None
    if result.failed and result.case is not None:
        shrunk = False
        if shrink_failures:
            case, result = shrink(prop, result.case, result)
            shrunk = True
        example = CounterExample.from_result(result, shrunk=shrunk)
    return dataclasses.replace(result, case=None), example


def check_config(name: str, cfg: GenConfig) -> None:
    """Reject configurations a property cannot run with.

    Raises:
        KeyError: Unknown property.
        PropertyPreconditionError: The property excludes an enabled feature.
        HarnessError: The configuration does not validate.
    """
    prop = get_property(name, cfg)
    if prop.excludes_udcast and cfg.udcast:
        raise PropertyPreconditionError(
            f"{name} excludes downcasts; drop +udcast",
            hints=["run stuck-classification to exercise downcasts"],
        )
    issues = cfg.validate()
    if issues:
        raise HarnessError(
            "invalid generator configuration", hints=[str(issue) for issue in issues]
        )


def run_property(
    name: str,
    cfg: GenConfig | None = None,
    *,
    runs: int = 100,
    seed: int = 0,
    corpus_dir: Path | None = None,
    progress: bool = True,
    shrink_failures: bool = True,
) -> FuzzReport:
    """Run property ``name`` on seeds ``seed .. seed + runs - 1``.

    Failures are shrunk and, when ``corpus_dir`` is given, saved there.
    ``cfg.workers > 1`` fans the seeds out over a process pool.
    """
    cfg = cfg or GenConfig()
    check_config(name, cfg)
    seeds = range(seed, seed + runs)
    data = cfg.to_dict()
    outcomes: list[tuple[PropertyResult, CounterExample | None]] = []
    with Timer(f"fuzz {name} ({runs} runs)") as timer:
        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                futures = [pool.submit(_run_one, name, data, s, shrink_failures) for s in seeds]
                for future in tqdm(futures, desc=name, disable=not progress):
                    outcomes.append(future.result())
        else:
            for s in tqdm(seeds, desc=name, disable=not progress):
                outcomes.append(_run_one(name, data, s, shrink_failures))

    counts = Counter(result.status for result, _ in outcomes)
    report = FuzzReport(name, seed, runs, dict(counts), elapsed=timer.elapsed or 0.0)
    for result, example in outcomes:
        if example is None:
            continue
        logger.warning("%s failed on seed %d: %s", name, result.seed, result.message)
        report.counterexamples.append(example)
        if corpus_dir is not None:
            report.paths.append(save_counterexample(example, corpus_dir))
    inconclusive = counts.get(PropertyStatus.INCONCLUSIVE, 0)
    if inconclusive:
        logger.warning("%s: %d run(s) hit the step budget of %d", name, inconclusive, cfg.max_steps)
    logger.info(report.summary())
    return report


__all__ = ["FuzzReport", "check_config", "run_property"]
