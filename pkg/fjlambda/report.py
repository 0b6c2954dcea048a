"""Report rendering: JSON payloads and text for checks, typings and evaluations."""

from __future__ import annotations

import json
import logging
from collections.abc import Iterable
from pathlib import Path
from typing import Any

from fjlambda.errors import FJLError, TypeCheckError
from fjlambda.evaluator import (
    BudgetExhausted,
    EvalResult,
    FailedLambdaCast,
    FailedObjectCast,
    Stuck,
    StuckReason,
    Value,
)
from fjlambda.printer import pretty
from fjlambda.typecheck import Derivation, Judgement
from fjlambda.utils import ensure_dir
from fjlambda.wellformed import WellFormednessError

logger = logging.getLogger(__name__)


def error_to_dict(exc: FJLError) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "error": type(exc).__name__,
        "message": exc.message,
        "position": str(exc.position) if exc.position is not None else None,
    }
    if isinstance(exc, TypeCheckError):
        payload["kind"] = str(exc.kind)
        payload["rule"] = exc.rule
    if exc.hints:
        payload["hints"] = list(exc.hints)
    return payload


def table_report(errors: Iterable[WellFormednessError]) -> dict[str, Any]:
    errors = list(errors)
    return {"ok": not errors, "errors": [e.to_dict() for e in errors]}


def derivation_to_dict(derivation: Derivation) -> dict[str, Any]:
    return {
        "rule": derivation.rule,
        "term": pretty(derivation.term),
        "type": str(derivation.type),
        "premises": [derivation_to_dict(p) for p in derivation.premises],
    }


def render_derivation(derivation: Derivation, indent: str = "  ") -> str:
    """Indented text rendering, conclusion first."""
    lines: list[str] = []

    def walk(node: Derivation, depth: int) -> None:
        lines.append(f"{indent * depth}[{node.rule}] {pretty(node.term)} : {node.type}")
        for premise in node.premises:
            walk(premise, depth + 1)

    walk(derivation, 0)
    return "\n".join(lines)


def judgement_to_dict(judgement: Judgement) -> dict[str, Any]:
    payload: dict[str, Any] = {"term": pretty(judgement.term), "ok": judgement.ok}
    if judgement.ok:
        payload["type"] = str(judgement.type)
        payload["rule_trace"] = judgement.rule_trace
    else:
        assert judgement.error is not None
        payload["error"] = error_to_dict(judgement.error)
    return payload


def stuck_to_dict(reason: StuckReason) -> dict[str, Any]:
    payload: dict[str, Any] = {"redex": pretty(reason.redex), "message": reason.describe()}
    match reason:
        case FailedObjectCast(target=target, class_name=name):
            payload.update(kind="failed-object-cast", target=str(target), class_name=name)
        case FailedLambdaCast(target=target, decoration=decoration):
            payload.update(
                kind="failed-lambda-cast", target=str(target), decoration=str(decoration)
            )
        case _:
            payload["kind"] = "other"
    return payload


def outcome_name(result: EvalResult) -> str:
    match result.final:
        case Value():
            return "value"
        case Stuck():
            return "stuck"
        case BudgetExhausted():
            return "budget-exhausted"
    raise TypeError(f"unknown outcome {result.final!r}")


def eval_to_dict(result: EvalResult, *, trace: bool = True) -> dict[str, Any]:
    """JSON payload for an evaluation; ``trace`` lists each step with its rule."""
    payload: dict[str, Any] = {
        "outcome": outcome_name(result),
        "steps": result.steps,
        "final": pretty(result.trace[-1]),
    }
    if isinstance(result.final, Stuck):
        payload["stuck"] = stuck_to_dict(result.final.reason)
    if trace:
        payload["trace"] = [
            {"step": index, "rule": rule, "term": pretty(term)}
            for index, (rule, term) in enumerate(zip(result.rules, result.trace[1:]), start=1)
        ]
    return payload


def render_eval(result: EvalResult, *, trace: bool = False) -> str:
    lines: list[str] = []
    if trace:
        lines.append(f"   {pretty(result.trace[0])}")
        lines.extend(
            f"-> {pretty(term)}    [{rule}]" for rule, term in zip(result.rules, result.trace[1:])
        )
    match result.final:
        case Value(term=term):
            lines.append(pretty(term))
        case Stuck(reason=reason):
            lines.append(f"stuck: {reason.describe()} in {pretty(reason.redex)}")
        case BudgetExhausted(steps=steps):
            lines.append(f"step budget of {steps} exhausted")
    return "\n".join(lines)


def save_json(output_path: Path, payload: dict[str, Any]) -> None:
    """Write a JSON payload, creating parent directories."""
    ensure_dir(output_path.parent)
    with open(output_path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, ensure_ascii=False)
    logger.debug("Saved JSON: %s", output_path)
