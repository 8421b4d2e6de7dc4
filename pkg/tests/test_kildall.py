import random

import numpy as np
from hypothesis import given, settings, strategies as st
import pytest

from gvn.analyses import analyze, default_universe
from gvn.fuzz import Shape, generate_program
from gvn.kildall import (StructuredPartition, UnknownTermError, _canonical, _tables, kildall_equiv,
                         kildall_initial, kildall_meet, kildall_transfer)
from gvn.lang import Assign, parse, parse_term
from gvn.terms import TermUniverse, variables

# pools as printed, members written in source syntax
E1 = [["d"], ["x", "1"], ["y", "2"], ["z", "3"], ["c", "x+y", "1+y", "x+2", "1+2"]]
E2 = [["c"], ["x", "1"], ["y", "2"], ["z", "4"], ["d", "x+y", "1+y", "x+2", "1+2"]]
E3 = [["c"], ["d"], ["z"], ["x", "1"], ["y", "2"], ["x+y", "1+y", "x+2", "1+2"]]


def as_sets(classes):
    return {frozenset(parse_term(t) if isinstance(t, str) else t for t in c) for c in classes}


def printed_view(pool):
    """Present classes without the variable the figure leaves out (e is assigned after p3)."""
    out = [[t for t in c if "e" not in variables(t)] for c in pool.classes()]
    return as_sets(c for c in out if c)


@pytest.mark.parametrize("point,expected", [("p1", E1), ("p2", E2), ("p3", E3)])
def test_figure1_pools(fig1, point, expected):
    pool = analyze(fig1, "kildall").result.at(point)
    assert printed_view(pool) == as_sets(expected)


def test_render_is_canonical(fig1):
    pool = analyze(fig1, "kildall").result.at("p3")
    assert pool.render() == "{ [c], [d], [e], [z], [x, 1], [y, 2], [x+y, x+2, 1+y, 1+2] }"


def test_initial():
    u = TermUniverse.of(1, "xy", [1], "+")
    pool = kildall_initial(u)
    assert as_sets(pool.classes()) == as_sets([["x"], ["y"]])
    assert not kildall_equiv(pool, parse_term("x+1"), parse_term("1+x"))


def test_transfer_makes_target_equal_to_rhs():
    u = TermUniverse.of(2, "abx", [1], "+*")
    pool = kildall_initial(u)
    for s in parse("x := a+b; a := x*1; b := 1;").statements():
        pool = kildall_transfer(pool, s)
        assert kildall_equiv(pool, parse_term(s.target), s.rhs)
    # the old a+b value is still held by x, and a is now x*1
    assert kildall_equiv(pool, parse_term("a"), parse_term("x*1"))
    assert not kildall_equiv(pool, parse_term("x"), parse_term("a+b"))


def test_out_of_universe_rhs_warns():
    u = TermUniverse.of(1, "xy", [1], "+")
    pool = kildall_transfer(kildall_initial(u), Assign("x", parse_term("(y+1)+1")))
    assert pool.warnings and "exceeds the universe bound" in pool.warnings[0]
    assert pool.class_of(parse_term("x")) == [parse_term("x")]


def test_unknown_term():
    pool = kildall_initial(TermUniverse.of(1, "xy", [1], "+"))
    with pytest.raises(UnknownTermError):
        kildall_equiv(pool, parse_term("q"), parse_term("x"))


SMALL = TermUniverse.of(1, "xy", [1], "+")


@st.composite
def partitions(draw, u=SMALL):
    n = u.count()
    keys = np.array(draw(st.lists(st.integers(0, 4), min_size=n, max_size=n)), dtype=np.int64)
    present = np.array(draw(st.lists(st.booleans(), min_size=n, max_size=n)))
    return StructuredPartition(u, _canonical(keys), present)


def pairs(p):
    n = len(p.cls)
    return {(i, j) for i in range(n) for j in range(n)
            if i != j and p.present[i] and p.present[j] and p.cls[i] == p.cls[j]}


@settings(max_examples=200)
@given(partitions(), partitions())
def test_meet_is_pairwise_intersection(a, b):
    assert pairs(kildall_meet(a, b)) == pairs(a) & pairs(b)


def congruent(pool):
    tb = _tables(pool.universe)
    seen = {}
    for op, l, r, c in zip(tb.app_op.tolist(), pool.cls[tb.app_left].tolist(),
                           pool.cls[tb.app_right].tolist(), pool.cls[tb.app_idx].tolist()):
        if seen.setdefault((op, l, r), c) != c:
            return False
    return True


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_states_stay_congruences(seed):
    p = generate_program(random.Random(seed), Shape(n_vars=3, n_stmts=10, max_term_size=2))
    run = analyze(p, "kildall", default_universe(p, 3))
    assert all(congruent(s) for s in run.result.states.values())


def test_regression_signature_shared_across_sizes():
    # once a == c+1, a*(x*y) and (c+1)*(x*y) have one signature at two sizes
    p = parse("d := c; a := c+1; d := 2+1;")
    run = analyze(p, "kildall", default_universe(p, 3))
    assert congruent(run.result.at("__exit"))
