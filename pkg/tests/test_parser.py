"""Tests for the ``.fjl`` tokenizer and parser."""

import pytest

from fjlambda.errors import (
    DuplicateDeclarationError,
    LexError,
    MixedLambdaParametersError,
    ParseError,
)
from fjlambda.parser import parse_program, parse_term, parse_type
from fjlambda.syntax import (
    BOOLEAN,
    OBJECT_TYPE,
    BoolLit,
    Cast,
    ClassDecl,
    Cond,
    DecoratedLambda,
    FieldAccess,
    InterfaceDecl,
    Invoke,
    New,
    Param,
    PureLambda,
    RefType,
    SourcePosition,
    Var,
    intersection,
)


def test_parse_program_with_main():
    """Declarations keep source order and ``main`` is optional."""
    program = parse_program(
        """
        interface I { Object m(); }
        class C implements I {
            Object f;
            C(Object f) { super(); this.f = f; }
            Object m() { return this.f; }
        }
        main = new C(new Object()).m();
        """
    )
    assert [d.name for d in program.decls] == ["I", "C"]
    assert isinstance(program.decls[0], InterfaceDecl)
    klass = program.decls[1]
    assert isinstance(klass, ClassDecl)
    assert klass.superclass == "Object"
    assert klass.interfaces == ("I",)
    assert [f.name for f in klass.fields] == ["f"]
    assert program.main == Invoke(New("C", (New("Object", ()),)), "m", ())
    assert parse_program("class D { D() { super(); } }").main is None


def test_interface_members_split_into_headers_and_defaults():
    """Members with a body are defaults, with or without the keyword."""
    program = parse_program(
        """
        interface I {
            Object m(Object x);
            default Object k() { return new Object(); }
            boolean b() { return true; }
        }
        """
    )
    decl = program.decls[0]
    assert isinstance(decl, InterfaceDecl)
    assert [h.name for h in decl.headers] == ["m"]
    assert [m.name for m in decl.defaults] == ["k", "b"]
    assert decl.headers[0].param_names == ("x",)


def test_parse_lambdas():
    """Untyped, typed and nullary λs."""
    assert parse_term("() -> new Object()") == PureLambda((), New("Object", ()))
    assert parse_term("(x, y) -> x") == PureLambda((Param("x"), Param("y")), Var("x"))
    typed = parse_term("(Object x) -> x")
    assert typed == PureLambda((Param("x", OBJECT_TYPE),), Var("x"))
    assert typed.is_typed


def test_parse_decorated_lambda():
    """``[λ : T]`` is accepted so evaluation traces can be parsed back."""
    t = parse_term("[(x) -> x : I & J]")
    assert t == DecoratedLambda((Param("x"),), Var("x"), intersection("I", "J"))


def test_parse_casts_and_intersections():
    """A parenthesised type followed by an operand is a cast."""
    assert parse_term("(C) x") == Cast(RefType(("C",)), Var("x"))
    assert parse_term("(I & J) () -> x") == Cast(
        intersection("I", "J"), PureLambda((), Var("x"))
    )
    # Casts bind looser than member access.
    assert parse_term("(C) x.f") == Cast(RefType(("C",)), FieldAccess(Var("x"), "f"))
    # A parenthesised variable is not a cast.
    assert parse_term("(x).f") == FieldAccess(Var("x"), "f")


def test_parse_conditionals_are_right_nested():
    """``a ? b : c ? d : e`` nests to the right."""
    t = parse_term("a ? b : c ? d : e")
    assert t == Cond(Var("a"), Var("b"), Cond(Var("c"), Var("d"), Var("e")))
    assert parse_term("true ? false : true") == Cond(BoolLit(True), BoolLit(False), BoolLit(True))


def test_parse_types():
    """Pre-types: boolean, nominal and intersections."""
    assert parse_type("boolean") is BOOLEAN
    assert parse_type("Object") == OBJECT_TYPE
    assert parse_type("C & I") == intersection("C", "I")


def test_boolean_inside_intersection_is_rejected():
    """``boolean`` can only stand alone."""
    with pytest.raises(ParseError, match="boolean"):
        parse_type("I & boolean")


def test_intersections_are_rejected_in_header_positions():
    """Fields, parameters and results are nominal."""
    with pytest.raises(ParseError, match="intersection"):
        parse_program("interface I { I & J m(); }")


def test_mixed_lambda_parameters_are_rejected():
    """λ parameters are either all typed or all untyped."""
    with pytest.raises(MixedLambdaParametersError):
        parse_term("(Object x, y) -> x")


def test_duplicate_declarations_are_rejected():
    """Two declarations with one name fail at the second one."""
    with pytest.raises(DuplicateDeclarationError) as excinfo:
        parse_program("class C { C() { super(); } }\nclass C { C() { super(); } }")
    assert excinfo.value.position == SourcePosition(2, 1)


def test_duplicate_members_are_rejected():
    """Fields, methods and parameters are unique within their scope."""
    with pytest.raises(DuplicateDeclarationError):
        parse_program("class C { Object f; Object f; C(Object f) { super(); this.f = f; } }")
    with pytest.raises(DuplicateDeclarationError):
        parse_program("interface I { Object m(); Object m(); }")
    with pytest.raises(DuplicateDeclarationError):
        parse_program("interface I { Object m(Object x, Object x); }")


def test_predefined_names_cannot_be_declared():
    """``Object`` and ``boolean`` are built in."""
    with pytest.raises(ParseError, match="predefined"):
        parse_program("class Object { Object() { super(); } }")


def test_class_needs_constructor():
    """Every class declares its constructor."""
    with pytest.raises(ParseError, match="constructor"):
        parse_program("class C { }")


def test_errors_carry_line_and_column():
    """Parse errors point at the offending token."""
    with pytest.raises(ParseError) as excinfo:
        parse_program("class C {\n  C() { super(); }\n  Object m() { return ; }\n}")
    assert excinfo.value.position == SourcePosition(3, 23)
    assert str(excinfo.value).startswith("3:23: ")


def test_unknown_characters_are_lex_errors():
    """Characters outside the grammar fail in the tokenizer."""
    with pytest.raises(LexError) as excinfo:
        parse_term("x + y")
    assert excinfo.value.position == SourcePosition(1, 3)


def test_comments_and_trailing_input():
    """Line comments are skipped; leftover tokens are an error."""
    assert parse_term("x // trailing comment") == Var("x")
    with pytest.raises(ParseError, match="after end of input"):
        parse_term("x y")


def test_main_must_come_last():
    """Declarations cannot follow the main clause."""
    with pytest.raises(ParseError, match="before the main clause"):
        parse_program("main = new Object();\nclass C { C() { super(); } }")
