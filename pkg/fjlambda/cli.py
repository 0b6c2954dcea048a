"""Command-line interface: check tables, infer types, evaluate, and fuzz the metatheory.

Exit codes:
    0  success
    1  parse, table or type error; a fuzz counterexample
    2  evaluation got stuck
    3  usage error or invalid settings
    4  evaluation ran out of steps
"""

import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any, NoReturn

import typer

try:  # newer typer releases raise exceptions from their bundled click
    from typer._click import exceptions as click
except ImportError:
    from click import exceptions as click

from fjlambda import __version__
from fjlambda.class_table import ClassTable
from fjlambda.errors import (
    ClassTableError,
    EvaluationError,
    FJLError,
    HarnessError,
    ParseError,
)
from fjlambda.evaluator import BudgetExhausted, Stuck, evaluate
from fjlambda.harness.config import GenConfig
from fjlambda.harness.properties import PROPERTIES
from fjlambda.harness.runner import run_property
from fjlambda.parser import SourceProgram, parse_program, parse_term
from fjlambda.report import (
    derivation_to_dict,
    error_to_dict,
    eval_to_dict,
    judgement_to_dict,
    render_eval,
    table_report,
)
from fjlambda.settings import EngineSettings
from fjlambda.syntax import EMPTY_ENV, Term
from fjlambda.typecheck import check_program, t_inf
from fjlambda.utils import setup_logging
from fjlambda.wellformed import ok_table

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_STUCK = 2
EXIT_USAGE = 3
EXIT_BUDGET = 4

app = typer.Typer(
    name="fjlambda",
    help="Reference interpreter and type checker for FJ&λ.",
    add_completion=False,
    no_args_is_help=True,
)


def _emit_json(payload: dict[str, Any]) -> None:
    typer.echo(json.dumps(payload, indent=2, ensure_ascii=False))


def _fail(exc: FJLError, code: int, as_json: bool) -> NoReturn:
    if as_json:
        _emit_json({"ok": False, "error": error_to_dict(exc)})
    else:
        where = f" (at {exc.position})" if exc.position is not None else ""
        typer.echo(f"error: {exc.message}{where}", err=True)
        for hint in exc.hints:
            typer.echo(f"  hint: {hint}", err=True)
    raise typer.Exit(code)


def _usage(message: str) -> NoReturn:
    typer.echo(f"usage error: {message}", err=True)
    raise typer.Exit(EXIT_USAGE)


def _settings(**overrides: Any) -> EngineSettings:
    settings = EngineSettings.from_env(**overrides)
    issues = settings.validate()
    if issues:
        _usage("; ".join(str(issue) for issue in issues))
    logger.debug("Engine settings: %r", settings)
    return settings


def _load(path: Path, as_json: bool) -> tuple[SourceProgram, ClassTable]:
    try:
        program = parse_program(path.read_text(encoding="utf-8"))
        return program, ClassTable.from_program(program)
    except (ParseError, ClassTableError) as exc:
        _fail(exc, EXIT_ERROR, as_json)


def _main_term(program: SourceProgram, expr: str | None, as_json: bool) -> Term:
    if expr is not None:
        try:
            return parse_term(expr)
        except ParseError as exc:
            _fail(exc, EXIT_ERROR, as_json)
    if program.main is None:
        _usage("no term given: pass -e TERM or end the file with 'main = <term>;'")
    return program.main


def _require_ok_table(ct: ClassTable, as_json: bool) -> None:
    errors = ok_table(ct)
    if not errors:
        return
    if as_json:
        _emit_json(table_report(errors))
    else:
        for error in errors:
            typer.echo(f"error: {error}", err=True)
    raise typer.Exit(EXIT_ERROR)


@app.callback()
def _configure(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable DEBUG logging."),
) -> None:
    setup_logging(verbose=verbose)


@app.command()
def version() -> None:
    """Print the version."""
    typer.echo(f"fjlambda {__version__}")


@app.command()
def check(
    file: Path = typer.Argument(..., exists=True, dir_okay=False, help="Program file (.fjl)."),
    json_output: bool = typer.Option(False, "--json", help="Print a JSON report."),
) -> None:
    """Check that the class table of FILE is well formed."""
    _, ct = _load(file, json_output)
    errors = ok_table(ct)
    if json_output:
        _emit_json(table_report(errors))
    elif errors:
        for error in errors:
            typer.echo(str(error))
    else:
        typer.echo("OK")
    raise typer.Exit(EXIT_ERROR if errors else EXIT_OK)


@app.command("type")
def type_(
    file: Path = typer.Argument(..., exists=True, dir_okay=False, help="Program file (.fjl)."),
    expr: str | None = typer.Option(None, "-e", "--expr", help="Term to type; overrides main."),
    json_output: bool = typer.Option(False, "--json", help="Print a JSON report."),
    trace_rules: bool = typer.Option(False, "--trace-rules", help="Print the rules used."),
    stupid_cast: bool = typer.Option(False, "--stupid-cast", help="Accept stupid casts."),
) -> None:
    """Infer the type of a term over the class table of FILE."""
    settings = _settings(stupid_cast=stupid_cast)
    program, ct = _load(file, json_output)
    term = _main_term(program, expr, json_output)
    _require_ok_table(ct, json_output)
    judgement = t_inf(ct, EMPTY_ENV, term, stupid_cast=settings.stupid_cast)

    if json_output:
        payload = judgement_to_dict(judgement)
        if trace_rules and judgement.derivation is not None:
            payload["derivation"] = derivation_to_dict(judgement.derivation)
        _emit_json(payload)
        raise typer.Exit(EXIT_OK if judgement.ok else EXIT_ERROR)
    if not judgement.ok:
        assert judgement.error is not None
        _fail(judgement.error, EXIT_ERROR, as_json=False)
    typer.echo(str(judgement.type))
    if trace_rules:
        typer.echo("rules: " + " ".join(judgement.rule_trace))


@app.command("eval")
def eval_(
    file: Path = typer.Argument(..., exists=True, dir_okay=False, help="Program file (.fjl)."),
    expr: str | None = typer.Option(None, "-e", "--expr", help="Term to run; overrides main."),
    trace: bool = typer.Option(False, "--trace", help="Print every step with its rule."),
    max_steps: int | None = typer.Option(
        None, "--max-steps", help="Step budget (default: $FJL_MAX_STEPS or 10000)."
    ),
    json_output: bool = typer.Option(False, "--json", help="Print a JSON report."),
    unsafe: bool = typer.Option(False, "--unsafe", help="Skip the type check."),
    stupid_cast: bool = typer.Option(False, "--stupid-cast", help="Type check with stupid casts."),
    check_annotations: bool = typer.Option(
        False, "--check-annotations", help="Fail when λ annotations disagree with the header."
    ),
) -> None:
    """Evaluate a term over the class table of FILE."""
    settings = _settings(
        max_steps=max_steps,
        unsafe=unsafe,
        stupid_cast=stupid_cast,
        check_annotations=check_annotations,
    )
    program, ct = _load(file, json_output)
    term = _main_term(program, expr, json_output)
    if not settings.unsafe:
        report = check_program(ct, term, stupid_cast=settings.stupid_cast)
        if report.table_errors:
            _require_ok_table(ct, json_output)
        if not report.judgement.ok:
            assert report.judgement.error is not None
            _fail(report.judgement.error, EXIT_ERROR, json_output)

    try:
        result = evaluate(
            ct, term, settings.max_steps, check_annotations=settings.check_annotations
        )
    except EvaluationError as exc:
        _fail(exc, EXIT_ERROR, json_output)

    if json_output:
        _emit_json(eval_to_dict(result, trace=trace))
    else:
        typer.echo(render_eval(result, trace=trace))
    match result.final:
        case Stuck():
            raise typer.Exit(EXIT_STUCK)
        case BudgetExhausted():
            raise typer.Exit(EXIT_BUDGET)


@app.command()
def fuzz(
    property_name: str = typer.Option(
        ..., "--property", "-p", help=f"One of: {', '.join(PROPERTIES)}."
    ),
    seed: int = typer.Option(0, "--seed", help="First seed."),
    runs: int = typer.Option(100, "--runs", help="Number of seeds to try."),
    features: str = typer.Option(
        "", "--features", help='Feature toggles, e.g. "+udcast,-lambdas".'
    ),
    workers: int = typer.Option(1, "--workers", help="Worker processes."),
    max_steps: int | None = typer.Option(
        None, "--max-steps", help="Step budget per run (default: $FJL_MAX_STEPS or 10000)."
    ),
    corpus: Path | None = typer.Option(None, "--corpus", help="Directory for counterexamples."),
    json_output: bool = typer.Option(False, "--json", help="Print a JSON report."),
) -> None:
    """Run a metatheory property over generated programs."""
    if property_name not in PROPERTIES:
        _usage(f"unknown property '{property_name}' (expected one of: {', '.join(PROPERTIES)})")
    if runs < 1:
        _usage("--runs must be at least 1")
    budget = _settings(max_steps=max_steps).max_steps
    try:
        cfg = GenConfig(seed=seed, workers=workers, max_steps=budget).with_features(features)
    except ValueError as exc:
        _usage(str(exc))

    try:
        report = run_property(
            property_name, cfg, runs=runs, seed=seed, corpus_dir=corpus, progress=not json_output
        )
    except HarnessError as exc:
        typer.echo(f"usage error: {exc.message}", err=True)
        for hint in exc.hints:
            typer.echo(f"  hint: {hint}", err=True)
        raise typer.Exit(EXIT_USAGE) from exc

    if json_output:
        _emit_json(report.to_dict())
    else:
        typer.echo(report.summary())
        for example in report.counterexamples:
            typer.echo(f"counterexample (seed {example.seed}): {example.message}")
        for path in report.paths:
            typer.echo(f"saved {path}")
    raise typer.Exit(EXIT_OK if report.ok else EXIT_ERROR)


def main(argv: Sequence[str] | None = None) -> int:
    """Console entry point; returns the process exit code.

    Click reports usage errors with code 2, which here means "stuck", so they
    are caught and mapped to 3.
    """
    command = typer.main.get_command(app)
    try:
        code = command.main(
            args=list(argv) if argv is not None else None,
            prog_name="fjlambda",
            standalone_mode=False,
        )
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_ERROR
    except click.Abort:
        typer.echo("Aborted.", err=True)
        return EXIT_ERROR
    return code if isinstance(code, int) else EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
