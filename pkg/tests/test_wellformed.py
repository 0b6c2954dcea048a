"""Tests for class-table well-formedness."""

import pytest

from fjlambda.class_table import ClassTable
from fjlambda.harness.corpus import golden_programs
from fjlambda.parser import parse_program
from fjlambda.syntax import SourcePosition
from fjlambda.wellformed import (
    CONSTRUCTOR_SHAPE,
    FIELD_SHADOWING,
    HEADER_CONFLICT,
    METHOD_BODY,
    UNIMPLEMENTED_METHOD,
    UNKNOWN_TYPE,
    WellFormednessError,
    ok_table,
)


def premises(errors):
    return {e.premise for e in errors}


def test_fixture_and_shipped_tables_are_well_formed(shapes):
    """The shared fixture and every example program pass."""
    assert ok_table(shapes) == []
    for name, source in golden_programs().items():
        assert ok_table(ClassTable.from_program(parse_program(source))) == [], name


def test_unknown_type_names(table):
    """Field, constructor and header types must be declared."""
    errors = ok_table(table("class C { Nope f; C(Nope f) { super(); this.f = f; } }"))
    assert premises(errors) == {UNKNOWN_TYPE}
    assert all(e.decl == "C" for e in errors)


def test_constructor_must_match_fields(table):
    """The constructor takes inherited then own fields."""
    errors = ok_table(table("class C { Object f; C() { super(); } }"))
    assert premises(errors) == {CONSTRUCTOR_SHAPE}
    assert "(Object f)" in errors[0].message


def test_fields_cannot_shadow_inherited_ones(table):
    """A subclass field with an inherited name is rejected."""
    ct = table(
        """
        class A { Object f; A(Object f) { super(); this.f = f; } }
        class B extends A { Object f; B(Object f) { super(f); } }
        """
    )
    assert FIELD_SHADOWING in premises(ok_table(ct))


def test_overrides_must_keep_the_header(table):
    """Changing a method's signature in a subclass makes the headers conflict."""
    ct = table(
        """
        class A { A() { super(); } Object m() { return this; } }
        class B extends A { B() { super(); } boolean m() { return true; } }
        """
    )
    (error,) = [e for e in ok_table(ct) if e.premise == HEADER_CONFLICT]
    assert error.decl == "B"
    assert error.method == "m"


def test_interfaces_with_conflicting_parents(table):
    """An interface extending two incompatible headers is rejected."""
    ct = table(
        """
        interface I { Object m(); }
        interface J { boolean m(); }
        interface K extends I, J { }
        """
    )
    errors = ok_table(ct)
    assert [(e.decl, e.premise) for e in errors] == [("K", HEADER_CONFLICT)]


def test_classes_implement_every_abstract_method(table):
    """An abstract header without a class body or default is reported."""
    ct = table("interface I { Object m(); }\nclass C implements I { C() { super(); } }")
    (error,) = ok_table(ct)
    assert (error.decl, error.method, error.premise) == ("C", "m", UNIMPLEMENTED_METHOD)


@pytest.mark.parametrize(
    "source",
    [
        "class C { C() { super(); } Object m() { return true; } }",
        "interface I { default boolean m() { return new Object(); } }",
        "class C { C() { super(); } Object m(Object x) { return y; } }",
    ],
)
def test_method_bodies_are_checked_against_their_headers(table, source):
    """Class methods and defaults must check at their declared result type."""
    errors = ok_table(table(source))
    assert premises(errors) == {METHOD_BODY}
    assert errors[0].method == "m"


def test_all_problems_are_listed(table):
    """One run reports every faulty declaration."""
    ct = table(
        """
        class C { C() { super(); } Object m() { return true; } }
        class D { Object f; D() { super(); } }
        """
    )
    assert {e.decl for e in ok_table(ct)} == {"C", "D"}


def test_error_rendering():
    """Errors print with their location and convert to plain dictionaries."""
    error = WellFormednessError("C", "m", METHOD_BODY, "boom", SourcePosition(1, 2))
    assert str(error) == "1:2: C.m: method-body: boom"
    assert str(WellFormednessError("C", None, CONSTRUCTOR_SHAPE, "bad")) == (
        "C: constructor-shape: bad"
    )
    assert error.to_dict() == {
        "decl": "C",
        "method": "m",
        "premise": "method-body",
        "message": "boom",
        "position": "1:2",
    }
