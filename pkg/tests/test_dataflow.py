import pytest

from gvn.analyses import ALGOS, analyze, default_universe
from gvn.dataflow import DivergenceError, run_fixpoint
from gvn.analyses import make_analysis
from gvn.cfg import build_cfg
from gvn.lang import parse, parse_term
from gvn.kildall import kildall_equiv
from gvn.sed import sed_equiv

COUNTER = parse("x := 0; while (*) { x := x + 1; } L: y := x;")


@pytest.mark.parametrize("algo", ALGOS)
def test_counting_loop_converges(algo):
    run = analyze(COUNTER, algo, default_universe(COUNTER, 2))
    assert run.result.iterations < 20
    # x differs per iteration, so nothing pins it down after the loop
    st = run.result.at("L")
    equiv = kildall_equiv if algo == "kildall" else sed_equiv
    assert not equiv(st, parse_term("x"), parse_term("0"))


@pytest.mark.parametrize("algo", ALGOS)
def test_loop_invariant_survives(algo):
    p = parse("a := 1; b := a + 2; while (*) { c := a + 2; } L:")
    st = analyze(p, algo).result.at("L")
    equiv = kildall_equiv if algo == "kildall" else sed_equiv
    assert equiv(st, parse_term("b"), parse_term("1+2"))


def test_loop_free_blocks_visited_once(fig1):
    run = analyze(fig1, "kildall")
    assert run.result.iterations == len(run.cfg.blocks)


def test_visit_cap():
    cfg = build_cfg(COUNTER)
    with pytest.raises(DivergenceError):
        run_fixpoint(cfg, make_analysis("sed-modified", COUNTER, cfg), max_visits=2)


def test_unreachable_points_are_absent():
    run = analyze(parse("x := 1; L:"), "sed-modified")
    with pytest.raises(KeyError, match="unknown program point"):
        run.result.at("nope")
