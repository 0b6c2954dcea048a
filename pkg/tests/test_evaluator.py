"""Tests for small-step evaluation."""

import pytest

from fjlambda.class_table import ClassTable
from fjlambda.errors import AnnotationMismatchError, OpenTermError
from fjlambda.evaluator import (
    E_CAST,
    E_CAST_BOOL,
    E_CAST_LAMBDA,
    E_CAST_LAMBDA_TARGET,
    E_CAST_NEW,
    E_IF,
    E_IF_FALSE,
    E_IF_TRUE,
    E_INVK_LAMBDA_D,
    E_INVK_LAMBDA_T,
    E_INVK_LAMBDA_U,
    E_INVK_NEW,
    E_INVK_RECV,
    E_NEW_ARG,
    E_PROJ_NEW,
    BudgetExhausted,
    FailedLambdaCast,
    FailedObjectCast,
    Other,
    Stepped,
    Stuck,
    Value,
    decorate,
    evaluate,
    step,
    substitute,
    values,
)
from fjlambda.harness.corpus import golden_program
from fjlambda.parser import parse_term
from fjlambda.syntax import (
    BOOLEAN,
    BoolLit,
    Cast,
    Cond,
    DecoratedLambda,
    Invoke,
    New,
    Param,
    PureLambda,
    Var,
    nominal,
)

LOOP = "class Loop { Loop() { super(); } Object go() { return this.go(); } }"


def run(ct, source, **kwargs):
    return evaluate(ct, parse_term(source), **kwargs)


def test_lambda_stored_in_a_field_is_called(shapes):
    """Invocation, projection with decoration, then the λ call."""
    result = run(shapes, "new Holder((x) -> x).run(new A())")
    assert result.final == Value(New("A", ()))
    assert result.rules == (E_INVK_NEW, E_PROJ_NEW, E_INVK_LAMBDA_U)
    assert result.steps == 3
    assert len(result.trace) == 4
    assert result.trace[2] == parse_term("[(x) -> x : Fun].apply(new A())")


def test_congruence_rules_are_recorded(shapes):
    """The context rules crossed to reach the redex come with the step."""
    projected = step(shapes, parse_term("new Holder((x) -> x).f.apply(new A())"))
    assert isinstance(projected, Stepped)
    assert projected.rule == E_PROJ_NEW
    assert projected.congruence == (E_INVK_RECV,)
    in_ctor = step(shapes, parse_term("new Pair((Object) new A(), new A())"))
    assert in_ctor == Stepped(New("Pair", (New("A", ()), New("A", ()))), E_CAST_NEW, (E_NEW_ARG,))


def test_default_method_called_on_a_lambda(shapes):
    """A default reached through a λ's target type runs with ``this`` bound to the λ."""
    result = run(shapes, "((Named) () -> new A()).greet()")
    assert result.rules == (E_CAST_LAMBDA, E_INVK_LAMBDA_D, E_INVK_LAMBDA_U)
    assert result.final == Value(New("A", ()))


def test_conditionals(shapes):
    """The guard is reduced first, then one branch is chosen."""
    result = run(shapes, "new Flag(true).pick(new A(), new Pair(new A(), new A()))")
    assert result.rules == (E_INVK_NEW, E_PROJ_NEW, E_IF_TRUE)
    assert result.final == Value(New("A", ()))
    guard = step(shapes, parse_term("new Flag(false).on ? new A() : new Object()"))
    assert guard.congruence == (E_IF,)
    assert run(shapes, "false ? new A() : new Object()").rules == (E_IF_FALSE,)


def test_successful_casts(shapes):
    """Object upcasts, λ decoration and λ re-targeting all succeed."""
    assert run(shapes, "(A) new B(new Object())").rules == (E_CAST_NEW,)
    retarget = run(shapes, "(Object) ((Fun) (x) -> x)")
    assert retarget.rules == (E_CAST_LAMBDA, E_CAST_LAMBDA_TARGET)
    assert retarget.final == Value(
        DecoratedLambda((Param("x"),), Var("x"), nominal("Fun"))
    )
    boolean = step(shapes, Cast(BOOLEAN, BoolLit(True)))
    assert boolean == Stepped(BoolLit(True), E_CAST_BOOL)


def test_failed_object_cast_is_stuck(shapes):
    """Casting an object to an unrelated class gets stuck with the class named."""
    result = run(shapes, "(Pair) new A()")
    assert isinstance(result.final, Stuck)
    reason = result.final.reason
    assert isinstance(reason, FailedObjectCast)
    assert reason.class_name == "A"
    assert reason.target == nominal("Pair")
    assert reason.describe() == "cannot cast object of class A to Pair"


def test_failed_lambda_cast_is_stuck(shapes):
    """A decorated λ keeps its first target; casting it elsewhere gets stuck."""
    result = run(shapes, "(Fun) ((Named) () -> new A())")
    assert result.rules == (E_CAST_LAMBDA,)
    reason = result.final.reason
    assert isinstance(reason, FailedLambdaCast)
    assert reason.decoration == nominal("Named")
    assert reason.describe() == "cannot cast λ of type Named to Fun"


def test_other_stuck_terms(shapes):
    """Missing methods and untargeted λs are irreducible."""
    missing = run(shapes, "new A().nope()").final
    assert isinstance(missing.reason, Other)
    assert missing.reason.describe() == "A has no method 'nope'"
    bare = step(shapes, PureLambda((), New("A", ())))
    assert isinstance(bare, Stuck)


def test_step_budget(table):
    """A diverging program stops after exactly the budget."""
    ct = table(LOOP)
    result = run(ct, "new Loop().go()", max_steps=5)
    assert result.final == BudgetExhausted(5)
    assert result.steps == 5
    assert len(result.trace) == 6
    assert run(ct, "new Loop().go()", max_steps=0).final == BudgetExhausted(0)
    assert run(ct, "new Loop()", max_steps=0).final == Value(New("Loop", ()))


def test_open_terms_are_rejected(shapes):
    """Reduction is only defined for closed terms."""
    with pytest.raises(OpenTermError):
        step(shapes, parse_term("x.f"))
    with pytest.raises(OpenTermError):
        evaluate(shapes, Var("y"))


def test_values_helper(shapes):
    """``values`` returns the final proper value, or None."""
    t = parse_term("new Pair(new A(), new Object()).swap().first()")
    assert values(shapes, t) == New("Object", ())
    assert values(shapes, parse_term("(Pair) new A()")) is None


def test_substitution_avoids_capture():
    """A λ parameter clashing with an incoming free variable is renamed."""
    lam = PureLambda((Param("y"),), Invoke(Var("x"), "m", (Var("y"),)))
    assert substitute(lam, {"x": Var("y")}) == PureLambda(
        (Param("y_1"),), Invoke(Var("y"), "m", (Var("y_1"),))
    )


def test_substitution_respects_shadowing_and_is_simultaneous():
    """Bound names are untouched; all bindings apply at once."""
    lam = PureLambda((Param("x"),), Var("x"))
    assert substitute(lam, {"x": New("A", ())}) == lam
    swapped = substitute(Invoke(Var("x"), "m", (Var("y"),)), {"x": Var("y"), "y": Var("x")})
    assert swapped == Invoke(Var("y"), "m", (Var("x"),))


def test_decorate_reaches_conditional_branches():
    """Only pure λs are decorated; conditionals pass the type to both branches."""
    fun = nominal("Fun")
    lam = PureLambda((), New("A", ()))
    assert decorate(lam, fun) == DecoratedLambda((), New("A", ()), fun)
    cond = decorate(Cond(BoolLit(True), lam, New("A", ())), fun)
    assert cond == Cond(BoolLit(True), DecoratedLambda((), New("A", ()), fun), New("A", ()))
    assert decorate(New("A", ()), fun) == New("A", ())


def test_typed_lambda_annotations(shapes):
    """Typed λs run with the header's types unless annotation checking is on."""
    ok = run(shapes, "((Fun) (Object x) -> x).apply(new A())", check_annotations=True)
    assert ok.rules == (E_CAST_LAMBDA, E_INVK_LAMBDA_T)
    mismatched = "((Fun) (A x) -> x).apply(new A())"
    assert run(shapes, mismatched).final == Value(New("A", ()))
    with pytest.raises(AnnotationMismatchError):
        run(shapes, mismatched, check_annotations=True)


@pytest.mark.parametrize(
    ("name", "expected", "rules"),
    [
        ("simple_table", "new C()", (E_INVK_NEW, E_INVK_LAMBDA_U)),
        ("default_method", "new Box(new Object())", None),
        ("conditional", "new B()", None),
        ("lub_extension", "new C()", (E_IF_TRUE, E_INVK_NEW, E_INVK_LAMBDA_U)),
        ("default_lambda", "new Object()", (E_CAST_LAMBDA, E_INVK_LAMBDA_D)),
    ],
)
def test_shipped_programs_evaluate(name, expected, rules):
    """Example programs reduce to their documented values."""
    program = golden_program(name)
    result = evaluate(ClassTable.from_program(program), program.main)
    assert result.final == Value(parse_term(expected))
    if rules is not None:
        assert result.rules == rules


def test_shipped_stuck_program():
    """A λ cast to an interface and then to an unrelated class gets stuck."""
    program = golden_program("stuck_casts")
    result = evaluate(ClassTable.from_program(program), program.main)
    assert result.rules == (E_CAST_LAMBDA,)
    assert isinstance(result.final.reason, FailedLambdaCast)
    assert result.final.reason.target == nominal("C")
    assert result.final.reason.decoration == nominal("I")
    first = step(ClassTable.from_program(program), program.main)
    assert first.congruence == (E_CAST,)
