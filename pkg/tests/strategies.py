"""Shared random-state generators for the property tests."""
import random

from hypothesis import strategies as st

from gvn.fuzz import Shape, generate_program
from gvn.sed import sed_initial, sed_transfer, prune_unnecessary

NAMES = ("a", "b", "c", "d")
STRAIGHT = Shape(n_vars=len(NAMES), n_stmts=6, n_joins=0, max_term_size=2)


def sed_from_seed(seed: int, prune: bool = False):
    g = sed_initial(NAMES)
    for s in generate_program(random.Random(seed), STRAIGHT).statements():
        g = sed_transfer(g, s)
        if prune:
            g = prune_unnecessary(g)
    return g


seeds = st.integers(0, 10**9)
