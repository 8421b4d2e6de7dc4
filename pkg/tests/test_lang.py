import random

from hypothesis import given, settings, strategies as st
import pytest

from gvn.fuzz import Shape, generate_program
from gvn.lang import (Assign, DuplicateLabelError, If, Label, ParseError, ReservedIdentifierError, While,
                      parse, parse_term)
from gvn.terms import App, Const, Var


def test_fig1(fig1):
    assert fig1.labels() == ["p1", "p2", "p3"]
    assert isinstance(fig1.items[3], If)
    assert fig1.variables() == {"c", "d", "e", "x", "y", "z"}
    assert fig1.max_term_size() == 1


def test_precedence_and_associativity():
    assert parse_term("a+b*c") == App("+", Var("a"), App("*", Var("b"), Var("c")))
    assert parse_term("a-b-c") == App("-", App("-", Var("a"), Var("b")), Var("c"))
    assert parse_term("(a+b)*2") == App("*", App("+", Var("a"), Var("b")), Const(2))


def test_statements():
    p = parse("x := 1;\nL: while (*) { x := x + 1; }")
    assert p.items[0] == Assign("x", Const(1))
    assert p.items[1] == Label("L")
    assert isinstance(p.items[2], While) and p.has_loops()


def test_errors():
    with pytest.raises(ParseError) as exc:
        parse("x := ;")
    assert exc.value.line == 1
    with pytest.raises(DuplicateLabelError):
        parse("p: x := 1; p:")
    with pytest.raises(ReservedIdentifierError):
        parse("__x := 1;")
    with pytest.raises(ParseError):
        parse("if (*) { x := 1;")


def test_empty_program():
    assert parse("").items == ()
    assert parse("# only a comment\n").items == ()


@settings(max_examples=150)
@given(st.integers(0, 10**6), st.booleans())
def test_print_parse_round_trip(seed, loops):
    p = generate_program(random.Random(seed), Shape(n_vars=5, n_stmts=10, loops=loops))
    assert parse(str(p)) == p
