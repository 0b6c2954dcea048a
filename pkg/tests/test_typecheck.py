"""Tests for synthesis, checking and typing derivations."""

import pytest

from fjlambda.class_table import ClassTable
from fjlambda.errors import TypeCheckError, TypeErrorKind
from fjlambda.harness.corpus import golden_program
from fjlambda.parser import parse_term
from fjlambda.syntax import BOOLEAN, EMPTY_ENV, OBJECT_TYPE, intersection, nominal
from fjlambda.typecheck import (
    T_CHECK,
    T_LAMBDA_TD,
    T_LAMBDA_UCAST,
    T_LAMBDA_UD,
    T_STUPIDCAST,
    T_UCAST,
    T_UDCAST,
    TypeChecker,
    check_program,
    stupid_cast_mode,
    t_ck,
    t_inf,
)


def infer(ct, source, env=EMPTY_ENV, **kwargs):
    return t_inf(ct, env, parse_term(source), **kwargs)


def test_objects_methods_and_fields(shapes):
    """Constructor calls, invocations and field reads synthesise their declared types."""
    judgement = infer(shapes, "new Pair(new A(), new Object()).swap().first()")
    assert judgement.ok
    assert judgement.type == OBJECT_TYPE
    assert judgement.rule_trace == [
        "T-INVK",
        "T-INVK",
        "T-NEW",
        T_CHECK,
        "T-NEW",
        T_CHECK,
        "T-NEW",
    ]
    assert infer(shapes, "new B(new Object()).n").type == OBJECT_TYPE
    assert infer(shapes, "new Pair(new A(), new A()).swap()").type == nominal("Pair")


def test_variables_come_from_the_environment(shapes):
    """Bound variables have their bound type; unbound ones are an error."""
    env = EMPTY_ENV.bind("x", nominal("A"))
    assert infer(shapes, "x.id(x)", env).type == OBJECT_TYPE
    judgement = infer(shapes, "y")
    assert not judgement.ok
    assert judgement.error.kind is TypeErrorKind.UNBOUND_VAR
    with pytest.raises(TypeCheckError):
        _ = judgement.type
    assert judgement.rule_trace == []


@pytest.mark.parametrize(
    ("source", "kind"),
    [
        ("new A().nope()", TypeErrorKind.NO_SUCH_METHOD),
        ("new A().id()", TypeErrorKind.ARITY_MISMATCH),
        ("new A().id(true)", TypeErrorKind.ARG_MISMATCH),
        ("new A().f", TypeErrorKind.NO_SUCH_FIELD),
        ("true.f", TypeErrorKind.NO_SUCH_FIELD),
        ("new Fun()", TypeErrorKind.ILL_FORMED_TYPE),
        ("new Nope()", TypeErrorKind.ILL_FORMED_TYPE),
        ("new Flag(new Object())", TypeErrorKind.ARG_MISMATCH),
        ("(x) -> x", TypeErrorKind.LAMBDA_NEEDS_TARGET),
        ("new Holder(() -> new Object())", TypeErrorKind.ARITY_MISMATCH),
        ("new Holder((A x) -> x)", TypeErrorKind.PARAM_ANNOTATION_MISMATCH),
        ("new Pair(() -> new Object(), new Object())", TypeErrorKind.TARGET_NOT_FUNCTIONAL),
        ("(Pair) new A()", TypeErrorKind.BAD_CAST),
        ("(Object) true", TypeErrorKind.BAD_CAST),
        ("(A) ((x) -> x)", TypeErrorKind.BAD_CAST),
        ("(Nope) new A()", TypeErrorKind.ILL_FORMED_TYPE),
        ("new A() ? new A() : new A()", TypeErrorKind.NOT_BOOLEAN_GUARD),
        ("(() -> new A()) ? new A() : new A()", TypeErrorKind.NOT_BOOLEAN_GUARD),
        ("true ? true : new A()", TypeErrorKind.COND_BRANCH_MISMATCH),
    ],
)
def test_ill_typed_terms(shapes, source, kind):
    """Each failure is reported with its category."""
    judgement = infer(shapes, source)
    assert not judgement.ok
    assert judgement.error.kind is kind


def test_lambdas_are_typed_against_their_target(shapes):
    """Untyped and typed λs in argument position."""
    untyped = infer(shapes, "new Holder((x) -> x)")
    assert untyped.type == nominal("Holder")
    assert untyped.rule_trace == ["T-NEW", T_CHECK, T_LAMBDA_UD, T_CHECK, "T-VAR"]
    typed = infer(shapes, "new Holder((Object x) -> x)")
    assert T_LAMBDA_TD in typed.rule_trace
    assert not infer(shapes, "new Holder((x) -> true)").ok


def test_lambda_bodies_see_this_and_parameters(shapes):
    """The body is checked under the enclosing environment plus the parameters."""
    env = EMPTY_ENV.bind("this", nominal("Pair"))
    assert infer(shapes, "new Holder((x) -> this.fst)", env).ok
    assert not infer(shapes, "new Holder((x) -> z)").ok


def test_checked_casts(shapes):
    """Upcasts and λ casts are checked; the result is the target type."""
    up = infer(shapes, "(A) new B(new Object())")
    assert up.type == nominal("A")
    assert up.derivation.rule == T_UCAST
    lam = infer(shapes, "(Fun) ((x) -> x)")
    assert lam.type == nominal("Fun")
    assert lam.rule_trace == [T_LAMBDA_UCAST, T_CHECK, T_LAMBDA_UD, T_CHECK, "T-VAR"]
    assert infer(shapes, "(Fun & Loud) ((x) -> x)").type.atoms == ("Fun", "Loud")


def test_downcasts_need_related_classes(shapes):
    """A downcast or an interface cast is accepted when the class components are related."""
    down = infer(shapes, "(B) new A()")
    assert down.type == nominal("B")
    assert down.derivation.rule == T_UDCAST
    assert infer(shapes, "(Fun) new A()").derivation.rule == T_UDCAST
    assert not infer(shapes, "(Pair) new A()").ok


def test_stupid_casts_accept_unrelated_targets(shapes):
    """With stupid casts on, a failed checked cast is still typed at the target."""
    judgement = infer(shapes, "(Pair) new A()", stupid_cast=True)
    assert judgement.type == nominal("Pair")
    assert judgement.derivation.rule == T_STUPIDCAST
    assert infer(shapes, "(B) new A()", stupid_cast=True).derivation.rule == T_UDCAST
    checker = TypeChecker(shapes).stupid_cast_mode(True)
    assert checker.stupid_cast
    plain = stupid_cast_mode(shapes, False)
    assert plain.t_inf(EMPTY_ENV, parse_term("(Pair) new A()")).error is not None


def test_conditionals_join_their_branches(shapes):
    """The type of a conditional is the least upper bound of its branches."""
    judgement = infer(shapes, "true ? new A() : new B(new Object())")
    assert judgement.type == nominal("A")
    assert judgement.rule_trace == ["T-COND", T_CHECK, "T-BOOL", "T-NEW", "T-NEW", T_CHECK, "T-NEW"]
    assert infer(shapes, "new Flag(true).on ? true : false").type is BOOLEAN


def test_conditionals_pass_targets_to_lambda_branches(shapes):
    """In checking mode both branches of a conditional receive the expected type."""
    judgement = infer(shapes, "new Holder(true ? (x) -> x : (y) -> new A())")
    assert judgement.type == nominal("Holder")


def test_checking_returns_the_synthesised_type(shapes):
    """``t_ck`` succeeds with the subtype that was found, not the expected type."""
    term = parse_term("new B(new Object())")
    assert t_ck(shapes, EMPTY_ENV, term, nominal("A")).type == nominal("B")
    failed = t_ck(shapes, EMPTY_ENV, term, nominal("Pair"))
    assert failed.error.kind is TypeErrorKind.ARG_MISMATCH
    assert failed.error.rule == T_CHECK


def test_shipped_programs_are_well_typed():
    """The example programs type as expected."""
    program = golden_program("simple_table")
    report = check_program(ClassTable.from_program(program), program.main)
    assert report.ok
    assert report.judgement.type == nominal("C")
    assert report.judgement.rule_trace == [
        "T-INVK",
        "T-NEW",
        T_CHECK,
        T_LAMBDA_UD,
        T_CHECK,
        "T-NEW",
    ]
    stuck = golden_program("stuck_casts")
    report = check_program(ClassTable.from_program(stuck), stuck.main)
    assert report.ok
    assert report.judgement.derivation.rule == T_UDCAST


def test_program_report_includes_table_errors(table):
    """A well-typed term in an ill-formed table is not a well-typed program."""
    ct = table("class C { C() { super(); } Object m() { return true; } }")
    report = check_program(ct, parse_term("new C()"))
    assert report.judgement.ok
    assert report.table_errors
    assert not report.ok


def test_casts_of_a_lambda_to_intersections(golden_table):
    """I & E is a λ target; Object & I is not."""
    ct = golden_table("simple_table")
    judgement = infer(ct, "(I & E) (() -> new C())")
    assert judgement.type == intersection("I", "E")
    assert judgement.derivation.rule == T_LAMBDA_UCAST
    assert infer(ct, "(Object & I) (() -> new C())").error.kind is TypeErrorKind.BAD_CAST


def test_conditional_with_a_lambda_branch(golden_table):
    """A λ branch and a B branch both check against I, so the call types at C."""
    ct = golden_table("lub_extension")
    program = golden_program("lub_extension")
    report = check_program(ct, program.main)
    assert report.ok
    assert report.judgement.type == nominal("C")
    assert infer(ct, "true ? [() -> new C() : I] : new B()").type == nominal("I")
    assert infer(ct, "false ? new B() : new D()").type == intersection("C", "I")


def test_lambda_cast_to_an_interface_with_a_default(golden_table):
    """(I & J) types a λ and its default m can be called; J alone is not a λ target."""
    ct = golden_table("default_lambda")
    cast = infer(ct, "(I & J) (() -> new C())")
    assert cast.type == intersection("I", "J")
    assert cast.derivation.rule == T_LAMBDA_UCAST
    program = golden_program("default_lambda")
    assert check_program(ct, program.main).judgement.type == OBJECT_TYPE
    assert not infer(ct, "(J) (() -> new C())").ok
