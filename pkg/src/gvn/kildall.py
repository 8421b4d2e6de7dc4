"""Kildall's structured partitions over a bounded term universe.

A pool assigns every universe term a class id (a congruence: equal-valued
terms share an id) and marks which classes are *present*, i.e. hold a
variable or a value that has already been computed on every path. Only
present classes are part of the pool proper; absent classes are still
tracked so that congruence (``x+y`` ~ ``1+y`` once ``x := 1``) is available
the moment one of their members gets computed.

Transfer of ``x := e`` first marks the classes of ``e`` and its subterms as
computed, then pulls the pool back through the substitution ``[x -> e]``:
a term ``t`` lands in the old class of ``t[x -> e]``. Terms whose
substituted form leaves the universe are classified by their operator
signature, so congruence survives the trip.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .lang import Assign
from .terms import Term, TermUniverse, sort_key, subterms


class UnknownTermError(KeyError):
    """A queried term is outside the bounded universe."""


@dataclass(frozen=True)
class _Tables:
    n: int
    var_index: dict[str, int]
    const_index: dict[int, int]
    is_var: np.ndarray
    atoms: np.ndarray
    # one (term idx, op, left, right) tuple of arrays per application size
    levels: tuple[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray], ...]
    app_idx: np.ndarray
    app_op: np.ndarray
    app_left: np.ndarray
    app_right: np.ndarray
    # per variable: which terms mention it
    mentions: dict[str, np.ndarray]


@lru_cache(maxsize=32)
def _tables(u: TermUniverse) -> _Tables:
    lay = u.layout
    n, na = lay.n, lay.n_atoms
    is_var = np.zeros(n, dtype=bool)
    is_var[: len(lay.var_names)] = True
    levels = []
    for s in range(1, len(lay.starts)):
        idx = np.arange(lay.starts[s], lay.starts[s] + lay.counts[s], dtype=np.int64)
        levels.append((idx, lay.op[idx], lay.left[idx], lay.right[idx]))
    apps = np.arange(na, n, dtype=np.int64)
    mentions = {}
    for vi, v in enumerate(lay.var_names):
        m = np.zeros(n, dtype=bool)
        m[vi] = True
        for idx, _, left, right in levels:
            m[idx] = m[left] | m[right]
        mentions[v] = m
    return _Tables(
        n,
        {v: i for i, v in enumerate(lay.var_names)},
        {c: len(lay.var_names) + i for i, c in enumerate(lay.const_values)},
        is_var, np.arange(na, dtype=np.int64), tuple(levels),
        apps, lay.op[apps], lay.left[apps], lay.right[apps], mentions,
    )


def _canonical(keys: np.ndarray) -> np.ndarray:
    """Relabel ``keys`` so each class is named by the index of its first member."""
    n = len(keys)
    if n and keys.max() < 4 * n:
        first = np.full(int(keys.max()) + 1, n, dtype=np.int64)
        np.minimum.at(first, keys, np.arange(n, dtype=np.int64))
        return first[keys]
    _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    return first[inverse.reshape(-1)].astype(np.int64)


@dataclass(frozen=True, eq=False)
class StructuredPartition:
    universe: TermUniverse
    cls: np.ndarray
    present: np.ndarray
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        self.cls.flags.writeable = False
        self.present.flags.writeable = False

    def __eq__(self, other) -> bool:
        if not isinstance(other, StructuredPartition):
            return NotImplemented
        return (
            self.universe == other.universe
            and np.array_equal(self.cls, other.cls)
            and np.array_equal(self.present, other.present)
        )

    def __hash__(self):
        return hash((self.universe, self.cls.tobytes(), self.present.tobytes()))

    def index_of(self, t: Term) -> int:
        i = self.universe.position(t)
        if i is None:
            raise UnknownTermError(f"term {t} is outside the bounded universe")
        return i

    def classes(self) -> list[list[Term]]:
        """Present classes, members and classes in canonical order."""
        groups: dict[int, list[Term]] = {}
        term = self.universe.layout.term
        for i in np.flatnonzero(self.present).tolist():
            groups.setdefault(int(self.cls[i]), []).append(term(i))
        return _sorted_classes(groups.values())

    def class_of(self, t: Term) -> list[Term] | None:
        i = self.index_of(t)
        if not self.present[i]:
            return None
        members = np.flatnonzero(self.cls == self.cls[i])
        term = self.universe.layout.term
        return sorted((term(j) for j in members.tolist()), key=sort_key)

    def restricted(self, keep) -> list[list[Term]]:
        """Present classes intersected with the term set ``keep``; empty ones dropped."""
        keep = set(keep)
        out = [[t for t in c if t in keep] for c in self.classes()]
        return _sorted_classes(c for c in out if c)

    def render(self) -> str:
        return render_classes(self.classes())

    def to_json(self) -> str:
        return json.dumps([[str(t) for t in c] for c in self.classes()])


def _sorted_classes(groups) -> list[list[Term]]:
    out = [sorted(g, key=sort_key) for g in groups]
    out.sort(key=lambda c: (len(c), [sort_key(t) for t in c]))
    return out


def render_classes(classes) -> str:
    inner = ", ".join("[" + ", ".join(str(t) for t in c) + "]" for c in classes)
    return "{ " + inner + " }" if inner else "{ }"


def kildall_initial(u: TermUniverse) -> StructuredPartition:
    """Entry pool: every term in its own class, only variables present."""
    tb = _tables(u)
    return StructuredPartition(u, np.arange(tb.n, dtype=np.int64), tb.is_var.copy())


def kildall_transfer(p: StructuredPartition, s: Assign, u: TermUniverse | None = None) -> StructuredPartition:
    u = p.universe if u is None else u
    if u != p.universe:
        raise ValueError("partition and universe disagree")
    tb = _tables(u)
    if s.target not in tb.var_index:
        raise UnknownTermError(f"variable {s.target} is outside the bounded universe")
    cls = p.cls
    n_classes = int(cls.max()) + 1 if tb.n else 0
    present_cls = np.zeros(n_classes + 1, dtype=bool)
    present_cls[cls[p.present]] = True

    warnings = list(p.warnings)
    for sub in subterms(s.rhs):
        i = u.position(sub)
        if i is not None:
            present_cls[cls[i]] = True
    rhs_idx = u.position(s.rhs)
    if rhs_idx is None:
        warnings.append(f"rhs of '{s}' exceeds the universe bound; {s.target} gets a fresh class")
        rhs_key = n_classes
    else:
        rhs_key = int(cls[rhs_idx])

    # signature table of the old pool: (op, left class, right class) -> class
    m = np.int64(2 * tb.n + 2)
    old_codes = (tb.app_op * m + cls[tb.app_left]) * m + cls[tb.app_right]
    order = np.argsort(old_codes)
    sig_codes = old_codes[order]
    sig_vals = cls[tb.app_idx][order]

    # terms without x are their own substitution instance and keep their class
    newkey = cls.copy()
    x = tb.var_index[s.target]
    mentions = tb.mentions[s.target]
    newkey[x] = rhs_key
    fresh = n_classes + 1
    # signatures that missed, shared across levels so equal signatures stay congruent
    miss_codes = np.zeros(0, dtype=np.int64)
    miss_vals = np.zeros(0, dtype=np.int64)
    for idx, op, left, right in tb.levels:
        sel = mentions[idx]
        idx, op, left, right = idx[sel], op[sel], left[sel], right[sel]
        codes = (op * m + newkey[left]) * m + newkey[right]
        keys = np.full(len(codes), -1, dtype=np.int64)
        for table_codes, table_vals in ((sig_codes, sig_vals), (miss_codes, miss_vals)):
            if not len(table_codes):
                continue
            pos = np.minimum(np.searchsorted(table_codes, codes), len(table_codes) - 1)
            hit = (keys < 0) & (table_codes[pos] == codes)
            keys[hit] = table_vals[pos[hit]]
        miss = keys < 0
        if miss.any():
            uniq, inv = np.unique(codes[miss], return_inverse=True)
            keys[miss] = fresh + inv.reshape(-1)
            new_vals = fresh + np.arange(len(uniq), dtype=np.int64)
            fresh += len(uniq)
            miss_codes = np.concatenate([miss_codes, uniq])
            miss_vals = np.concatenate([miss_vals, new_vals])
            order = np.argsort(miss_codes)
            miss_codes, miss_vals = miss_codes[order], miss_vals[order]
        newkey[idx] = keys

    present = np.zeros(tb.n, dtype=bool)
    known = newkey <= n_classes
    present[known] = present_cls[newkey[known]]
    present[x] = True
    return StructuredPartition(u, _canonical(newkey), present, tuple(warnings))


def kildall_meet(p1: StructuredPartition, p2: StructuredPartition) -> StructuredPartition:
    """Pairwise intersection of classes; a class is present iff present on both sides."""
    if p1.universe != p2.universe:
        raise ValueError("cannot meet pools over different universes")
    n = np.int64(len(p1.cls) + 1)
    keys = p1.cls * n + p2.cls
    warnings = tuple(dict.fromkeys(p1.warnings + p2.warnings))
    return StructuredPartition(p1.universe, _canonical(keys), p1.present & p2.present, warnings)


def kildall_equiv(p: StructuredPartition, t1: Term, t2: Term) -> bool:
    i, j = p.index_of(t1), p.index_of(t2)
    if i == j:
        return True
    return bool(p.present[i] and p.present[j] and p.cls[i] == p.cls[j])


def relation_key(p: StructuredPartition) -> np.ndarray:
    """Class id per universe term, or -1 where the term is not in the pool."""
    return np.where(p.present, p.cls, -1)
