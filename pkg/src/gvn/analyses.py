"""The three GVN analyses behind one interface, plus helpers to compare them."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cfg import CFG, build_cfg
from .dataflow import FixpointResult, run_fixpoint
from .join import Instrumentation, sed_join_modified, sed_join_original
from .kildall import StructuredPartition, kildall_initial, kildall_meet, kildall_transfer, relation_key
from .lang import Assign, Program
from .sed import SED, prune_unnecessary, sed_initial, sed_transfer
from .terms import Term, TermUniverse, constants, operators, size, variables

ALGOS = ("kildall", "sed-original", "sed-modified")


class KildallAnalysis:
    name = "kildall"

    def __init__(self, universe: TermUniverse):
        self.universe = universe

    def initial(self) -> StructuredPartition:
        return kildall_initial(self.universe)

    def transfer(self, state, s: Assign):
        return kildall_transfer(state, s)

    def join(self, a, b):
        return kildall_meet(a, b)

    def equal(self, a, b) -> bool:
        return a == b


class SEDAnalysis:
    def __init__(self, variables, variant: str, s_prime: int, inst: Instrumentation | None = None):
        if variant not in ("original", "modified"):
            raise ValueError(f"unknown SED variant {variant!r}")
        self.name = f"sed-{variant}"
        self.variables = frozenset(variables)
        self.variant = variant
        self.s_prime = s_prime
        self.inst = inst
        self._join = sed_join_original if variant == "original" else sed_join_modified

    def initial(self) -> SED:
        return sed_initial(self.variables)

    def transfer(self, state: SED, s: Assign) -> SED:
        g = sed_transfer(state, s)
        return prune_unnecessary(g) if self.variant == "original" else g

    def join(self, a: SED, b: SED) -> SED:
        return self._join(a, b, self.s_prime, self.inst)

    def equal(self, a: SED, b: SED) -> bool:
        return a == b


def default_universe(p: Program, max_term_size: int | None = None, extra: tuple[Term, ...] = ()) -> TermUniverse:
    """Universe over the program's symbols (plus those of ``extra`` query terms);
    the bound defaults to the largest right-hand side."""
    bound = p.max_term_size() if max_term_size is None else max_term_size
    vs, cs, ops = set(p.variables()), set(p.constants()), set(p.operators())
    for t in extra:
        vs |= variables(t)
        cs |= constants(t)
        ops |= operators(t)
        if max_term_size is None:
            bound = max(bound, size(t))
    return TermUniverse.of(bound, vs, cs, ops)


def default_s_prime(cfg: CFG) -> int:
    return cfg.point_count()


def make_analysis(algo: str, p: Program, cfg: CFG, universe: TermUniverse | None = None,
                  s_prime: int | None = None, inst: Instrumentation | None = None):
    if algo == "kildall":
        return KildallAnalysis(universe or default_universe(p))
    if algo in ("sed-original", "sed-modified"):
        return SEDAnalysis(p.variables(), algo.split("-")[1], s_prime or default_s_prime(cfg), inst)
    raise ValueError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGOS)}")


@dataclass
class Run:
    algo: str
    program: Program
    cfg: CFG
    universe: TermUniverse
    result: FixpointResult


def analyze(p: Program, algo: str, universe: TermUniverse | None = None, s_prime: int | None = None,
            inst: Instrumentation | None = None) -> Run:
    cfg = build_cfg(p)
    universe = universe or default_universe(p)
    a = make_analysis(algo, p, cfg, universe, s_prime, inst)
    return Run(algo, p, cfg, universe, run_fixpoint(cfg, a))


def relation(state, universe: TermUniverse) -> np.ndarray:
    """Canonical partial partition of the terms of ``universe`` induced by ``state``.

    Entry ``i`` is the index of the first term in the same class as term
    ``i``, or -1 if the state does not represent term ``i``.
    """
    if isinstance(state, StructuredPartition):
        su = state.universe
        if (su.variables, su.constants, su.operators) == (universe.variables, universe.constants,
                                                         universe.operators) and su.bound >= universe.bound:
            # same symbols: the smaller universe is a prefix of the larger one
            keys = relation_key(state)[: universe.count()]
        else:
            pos = [su.position(t) for t in universe.terms]
            idx = np.array([-1 if i is None else i for i in pos], dtype=np.int64)
            keys = np.where(idx >= 0, relation_key(state)[idx], -1)  # outside the pool's universe
    else:
        keys = state.node_vector(universe.structure)
    return canonical_relation(keys)


def canonical_relation(keys) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.int64)
    out = np.full(len(keys), -1, dtype=np.int64)
    first: dict[int, int] = {}
    for i, k in enumerate(keys.tolist()):
        if k >= 0:
            out[i] = first.setdefault(k, i)
    return out


def is_subrelation(a: np.ndarray, b: np.ndarray) -> bool:
    """Every class of ``a`` lies inside one class of ``b`` (represented terms included)."""
    image: dict[int, int] = {}
    for ka, kb in zip(a.tolist(), b.tolist()):
        if ka < 0:
            continue
        if kb < 0 or image.setdefault(ka, kb) != kb:
            return False
    return True


def equivalent_pairs(rel: np.ndarray, terms) -> set[tuple[Term, Term]]:
    """Unordered pairs of distinct terms in one class, each as (smaller, larger)."""
    groups: dict[int, list[int]] = {}
    for i, k in enumerate(rel.tolist()):
        if k >= 0:
            groups.setdefault(k, []).append(i)
    out = set()
    for members in groups.values():
        for x in range(len(members)):
            for y in range(x + 1, len(members)):
                out.add((terms[members[x]], terms[members[y]]))
    return out
