import random

import numpy as np

from gvn.analyses import analyze, relation
from gvn.fuzz import Shape, agrees_with_paths, check_program, generate_program, minimize, run_fuzz
from gvn.herbrand import PathOracle
from gvn.lang import parse
from gvn.terms import TermUniverse


def test_oracle_matches_figure1(fig1):
    window = TermUniverse.of(1, fig1.variables(), fig1.constants(), fig1.operators())
    keys, computed = PathOracle(fig1).evaluate("p3", window)
    rel = relation(analyze(fig1, "kildall").result.at("p3"), window)
    assert agrees_with_paths(rel, keys, computed)


def test_oracle_rejects_a_wrong_merge(fig1):
    window = TermUniverse.of(1, fig1.variables(), fig1.constants(), fig1.operators())
    keys, computed = PathOracle(fig1).evaluate("p3", window)
    rel = relation(analyze(fig1, "kildall").result.at("p3"), window).copy()
    x, z = window.position(parse("q := x;").items[0].rhs), window.position(parse("q := z;").items[0].rhs)
    rel[z] = rel[x]  # claim x == z
    assert not agrees_with_paths(rel, keys, computed)


def test_oracle_rejects_uncomputed_terms():
    p = parse("x := 1; L:")
    window = TermUniverse.of(1, "x", [1], "+")
    keys, computed = PathOracle(p).evaluate("L", window)
    rel = relation(analyze(p, "kildall", window).result.at("L"), window).copy()
    rel[window.position(parse("q := x+x;").items[0].rhs)] = 5  # x+x was never computed
    assert not agrees_with_paths(rel, keys, computed)


def test_generator_respects_shape():
    shape = Shape(n_vars=3, n_stmts=9, n_joins=2, max_term_size=2)
    for seed in range(30):
        p = generate_program(random.Random(seed), shape)
        assert len(p.statements()) == 9
        assert len(p.variables()) <= 3
        assert p.max_term_size() <= 2
        assert not p.has_loops()


def test_fuzz_is_deterministic():
    shape = Shape(n_vars=3, n_stmts=8, max_term_size=2)
    assert run_fuzz(7, 15, shape).to_dict() == run_fuzz(7, 15, shape).to_dict()


def test_no_join_programs():
    # without merges the all-pairs variant matches the partitions; the original
    # one can still fall behind because it prunes after every assignment
    shape = Shape(n_vars=3, n_stmts=8, n_joins=0, max_term_size=2)
    s = run_fuzz(3, 10, shape)
    assert s.programs_with_joins == 0 and s.violations == 0 and s.joins_checked == 0


def test_looped_programs_check_inclusions():
    s = run_fuzz(5, 15, Shape(n_vars=3, n_stmts=8, max_term_size=2, loops=True))
    assert s.violations == 0 and not s.diverged


def test_minimize_keeps_the_finding():
    # make check_program report on a trivially failing kind by asking for one it always has
    p = generate_program(random.Random(11), Shape(n_vars=3, n_stmts=8, max_term_size=2))
    res = check_program(p, Shape(n_vars=3, n_stmts=8, max_term_size=2))
    assert not res.findings
    # nothing to minimize towards: the program comes back unchanged
    assert minimize(p, Shape(), "no-such-kind") == p
