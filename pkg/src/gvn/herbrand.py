"""Herbrand equivalence by explicit path enumeration (loop-free programs only).

Each path is executed symbolically: a variable's value is the term over the
entry values it evaluates to, interned as an integer. Two terms are
equivalent at a point when they evaluate to the same value on every path
reaching it, and a term counts as computed when on every path its value was
produced by some statement (or is held by a variable). This shares no code
with either the partition or the DAG analyses.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cfg import EXIT_POINT
from .lang import Assign, If, Label, Program, While
from .terms import OPERATORS, Const, Term, TermUniverse, Var


class LoopError(ValueError):
    pass


class _Values:
    def __init__(self):
        self.ids: dict[tuple, int] = {}

    def intern(self, key: tuple) -> int:
        return self.ids.setdefault(key, len(self.ids))


@dataclass(frozen=True)
class _PathState:
    env: tuple[tuple[str, int], ...]
    computed: frozenset[int]


def _eval(t: Term, env: dict[str, int], values: _Values, out: set[int] | None = None) -> int:
    if isinstance(t, Var):
        v = env[t.name]
    elif isinstance(t, Const):
        v = values.intern(("c", t.value))
    else:
        v = values.intern(("a", t.op, _eval(t.left, env, values, out), _eval(t.right, env, values, out)))
    if out is not None:
        out.add(v)
    return v


def path_states(p: Program) -> tuple[_Values, dict[str, list[_PathState]]]:
    """Per labelled point (and ``__exit``), the symbolic state of every path reaching it."""
    values = _Values()
    env0 = tuple((v, values.intern(("v", v))) for v in sorted(p.variables()))
    start = _PathState(env0, frozenset(v for _, v in env0))
    at: dict[str, list[_PathState]] = {}

    def run(items, states: list[_PathState]) -> list[_PathState]:
        for it in items:
            if isinstance(it, Assign):
                nxt = []
                for st in states:
                    env = dict(st.env)
                    computed = set(st.computed)
                    env[it.target] = _eval(it.rhs, env, values, computed)
                    nxt.append(_PathState(tuple(sorted(env.items())), frozenset(computed)))
                states = nxt
            elif isinstance(it, Label):
                at[it.name] = states
            elif isinstance(it, If):
                states = run(it.then, states) + run(it.orelse, states)
            elif isinstance(it, While):
                raise LoopError("path enumeration needs a loop-free program")
        return states

    at[EXIT_POINT] = run(p.items, [start])
    return values, at


class PathOracle:
    def __init__(self, p: Program):
        self.values, self.at = path_states(p)
        ids = self.values.ids
        self._const_id = {k[1]: v for k, v in ids.items() if k[0] == "c"}
        self._base = len(ids) + 1
        apps = [(k, v) for k, v in ids.items() if k[0] == "a"]
        codes = np.array([self._code(OPERATORS.index(k[1]), k[2], k[3]) for k, _ in apps], dtype=np.int64)
        order = np.argsort(codes)
        self._app_codes = codes[order]
        self._app_ids = np.array([v for _, v in apps], dtype=np.int64)[order]

    def _code(self, op, left, right):
        m = self._modulus
        return (op * m + left) * m + right

    _modulus = 1 << 20

    def evaluate(self, point: str, universe: TermUniverse) -> tuple[np.ndarray, np.ndarray]:
        """For each universe term: a key shared exactly by the terms that have
        the same value on every path to ``point``, and whether its value was
        computed on every such path."""
        lay = universe.layout
        states = self.at[point]
        n_paths = len(states)
        if self._base + n_paths * lay.n >= self._modulus:
            raise ValueError("program too large for the path oracle")
        nv, na = len(lay.var_names), lay.n_atoms
        vals = np.empty((n_paths, lay.n), dtype=np.int64)
        for k, st in enumerate(states):
            env = dict(st.env)
            vals[k, :nv] = [env[v] for v in lay.var_names]
        # constants absent from the program never occur on a path: give them local ids
        fresh = self._base
        for j, c in enumerate(lay.const_values):
            if c in self._const_id:
                vals[:, nv + j] = self._const_id[c]
            else:
                vals[:, nv + j] = fresh
                fresh += 1
        for s in range(1, len(lay.starts)):
            idx = slice(lay.starts[s], lay.starts[s] + lay.counts[s])
            codes = self._code(lay.op[idx][None, :], vals[:, lay.left[idx]], vals[:, lay.right[idx]]).reshape(-1)
            out = np.full(len(codes), -1, dtype=np.int64)
            if len(self._app_codes):
                pos = np.minimum(np.searchsorted(self._app_codes, codes), len(self._app_codes) - 1)
                hit = self._app_codes[pos] == codes
                out[hit] = self._app_ids[pos[hit]]
            miss = out < 0
            if miss.any():
                # values no path computed; ids only need to be consistent within this call
                uniq, inv = np.unique(codes[miss], return_inverse=True)
                out[miss] = fresh + inv.reshape(-1)
                fresh += len(uniq)
            vals[:, idx] = out.reshape(n_paths, -1)
        computed = np.ones(lay.n, dtype=bool)
        for k, st in enumerate(states):
            computed &= np.isin(vals[k], np.fromiter(st.computed, dtype=np.int64))
        keys = np.zeros(lay.n, dtype=np.int64)
        for k in range(n_paths):
            _, keys = np.unique(keys * self._modulus + vals[k], return_inverse=True)
            keys = keys.reshape(-1)
        return keys, computed
