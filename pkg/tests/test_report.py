"""Tests for JSON payloads and text rendering."""

import json

from fjlambda.errors import ParseError, TypeErrorKind
from fjlambda.evaluator import evaluate
from fjlambda.parser import parse_term
from fjlambda.report import (
    error_to_dict,
    eval_to_dict,
    judgement_to_dict,
    outcome_name,
    render_derivation,
    render_eval,
    save_json,
)
from fjlambda.syntax import EMPTY_ENV, SourcePosition
from fjlambda.typecheck import t_inf


def test_error_payloads():
    """Errors serialise with their class, position, hints and, for type errors, kind and rule."""
    parse = ParseError("unexpected '}'", position=SourcePosition(3, 4), hints=["add a term"])
    assert error_to_dict(parse) == {
        "error": "ParseError",
        "message": "unexpected '}'",
        "position": "3:4",
        "hints": ["add a term"],
    }


def test_judgement_payloads(shapes):
    """Successful judgements carry a type and a rule trace; failures carry the error."""
    ok = judgement_to_dict(t_inf(shapes, EMPTY_ENV, parse_term("new A()")))
    assert ok == {"term": "new A()", "ok": True, "type": "A", "rule_trace": ["T-NEW"]}
    failed = judgement_to_dict(t_inf(shapes, EMPTY_ENV, parse_term("new A().nope()")))
    assert failed["ok"] is False
    assert failed["error"]["kind"] == str(TypeErrorKind.NO_SUCH_METHOD)
    assert failed["error"]["rule"] == "T-INVK"


def test_derivation_rendering(shapes):
    """Derivations print conclusion first, one premise level per indent."""
    judgement = t_inf(shapes, EMPTY_ENV, parse_term("new Holder((x) -> x)"))
    lines = render_derivation(judgement.derivation).splitlines()
    assert lines[0] == "[T-NEW] new Holder((x) -> x) : Holder"
    assert len(lines) == 5
    assert lines[-1] == "        [T-VAR] x : Object"


def test_evaluation_payloads(shapes):
    """Values, stuck states and budget exhaustion each have an outcome name."""
    value = evaluate(shapes, parse_term("new Holder((x) -> x).run(new A())"))
    assert outcome_name(value) == "value"
    payload = eval_to_dict(value)
    assert payload["steps"] == 3
    assert payload["trace"][0] == {
        "step": 1,
        "rule": "E-InvkNew",
        "term": "new Holder((x) -> x).f.apply(new A())",
    }
    assert render_eval(value) == "new A()"

    stuck = evaluate(shapes, parse_term("(Pair) new A()"))
    assert outcome_name(stuck) == "stuck"
    assert eval_to_dict(stuck, trace=False)["stuck"] == {
        "redex": "(Pair) new A()",
        "message": "cannot cast object of class A to Pair",
        "kind": "failed-object-cast",
        "target": "Pair",
        "class_name": "A",
    }


def test_budget_rendering(table):
    """An exhausted budget is reported with the step count."""
    ct = table("class Loop { Loop() { super(); } Object go() { return this.go(); } }")
    result = evaluate(ct, parse_term("new Loop().go()"), max_steps=2)
    assert outcome_name(result) == "budget-exhausted"
    text = render_eval(result, trace=True).splitlines()
    assert text[0] == "   new Loop().go()"
    assert text[1].endswith("[E-InvkNew]")
    assert text[-1] == "step budget of 2 exhausted"


def test_save_json_creates_directories(tmp_path):
    """Payloads are written under freshly created parent directories."""
    path = tmp_path / "a" / "b" / "report.json"
    save_json(path, {"ok": True, "name": "λ"})
    assert json.loads(path.read_text(encoding="utf-8")) == {"ok": True, "name": "λ"}
