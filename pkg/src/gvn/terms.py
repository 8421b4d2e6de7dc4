"""Herbrand terms and the bounded term universe.

Terms are variables, integer constants, or an uninterpreted binary operator
applied to two terms. Nothing is interpreted: ``1+2`` is not ``3`` and
``x+y`` is not ``y+x``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Union

import numpy as np

OPERATORS = ("+", "-", "*", "/")
DEFAULT_CAPACITY = 10**6


class CapacityError(ValueError):
    """The bounded universe would exceed the configured term cap."""


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class App:
    op: str
    left: "Term"
    right: "Term"

    def __post_init__(self):
        if self.op not in OPERATORS:
            raise ValueError(f"unknown operator {self.op!r}")
        object.__setattr__(self, "_hash", hash((self.op, self.left, self.right)))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return f"{_operand(self.left)}{self.op}{_operand(self.right)}"


Term = Union[Var, Const, App]


def _operand(t: Term) -> str:
    return f"({t})" if isinstance(t, App) else str(t)


def size(t: Term) -> int:
    """Number of operator applications in ``t``."""
    if isinstance(t, App):
        return 1 + size(t.left) + size(t.right)
    return 0


def subterms(t: Term) -> Iterator[Term]:
    """Post-order walk over ``t`` and all of its subterms."""
    if isinstance(t, App):
        yield from subterms(t.left)
        yield from subterms(t.right)
    yield t


def variables(t: Term) -> set[str]:
    return {s.name for s in subterms(t) if isinstance(s, Var)}


def constants(t: Term) -> set[int]:
    return {s.value for s in subterms(t) if isinstance(s, Const)}


def operators(t: Term) -> set[str]:
    return {s.op for s in subterms(t) if isinstance(s, App)}


def substitute(t: Term, name: str, replacement: Term) -> Term:
    if isinstance(t, Var):
        return replacement if t.name == name else t
    if isinstance(t, App):
        return App(t.op, substitute(t.left, name, replacement), substitute(t.right, name, replacement))
    return t


def sort_key(t: Term) -> tuple:
    """Canonical order: by size, then variables before constants before
    applications, then structurally (operator, left, right)."""
    if isinstance(t, Var):
        return (0, 0, t.name)
    if isinstance(t, Const):
        return (0, 1, t.value)
    return (size(t), 2, OPERATORS.index(t.op), sort_key(t.left), sort_key(t.right))


@dataclass(frozen=True)
class TermUniverse:
    """All terms over the given symbols with at most ``bound`` applications."""

    bound: int
    variables: frozenset[str] = field(default_factory=frozenset)
    constants: frozenset[int] = field(default_factory=frozenset)
    operators: frozenset[str] = field(default_factory=frozenset)
    capacity: int = DEFAULT_CAPACITY

    def __post_init__(self):
        if self.bound < 0:
            raise ValueError("universe bound must be non-negative")
        unknown = set(self.operators) - set(OPERATORS)
        if unknown:
            raise ValueError(f"unknown operators {sorted(unknown)}")

    @classmethod
    def of(cls, bound: int, variables: Iterable[str] = (), constants: Iterable[int] = (),
           operators: Iterable[str] = (), capacity: int = DEFAULT_CAPACITY) -> "TermUniverse":
        return cls(bound, frozenset(variables), frozenset(constants), frozenset(operators), capacity)

    def atoms(self) -> list[Term]:
        return [Var(v) for v in sorted(self.variables)] + [Const(c) for c in sorted(self.constants)]

    def count(self) -> int:
        """Size of the universe, computed without enumerating it."""
        per_size = [len(self.variables) + len(self.constants)]
        n_ops = len(self.operators)
        for s in range(1, self.bound + 1):
            per_size.append(n_ops * sum(per_size[i] * per_size[s - 1 - i] for i in range(s)))
        return sum(per_size)

    def __contains__(self, t: Term) -> bool:
        return (
            size(t) <= self.bound
            and variables(t) <= self.variables
            and constants(t) <= self.constants
            and operators(t) <= self.operators
        )

    @cached_property
    def layout(self) -> "Layout":
        return Layout.build(self)

    def position(self, t: Term) -> int | None:
        """Index of ``t`` in canonical order, or None if ``t`` is outside the universe."""
        return self.layout.position(t)

    @cached_property
    def terms(self) -> tuple[Term, ...]:
        return tuple(enumerate_universe(self))

    @cached_property
    def index(self) -> dict[Term, int]:
        return {t: i for i, t in enumerate(self.terms)}

    @cached_property
    def structure(self) -> tuple[tuple, ...]:
        """Per term: ``("v", name)``, ``("c", value)`` or ``("a", op, left index, right index)``.
        Children always precede their parents."""
        lay = self.layout
        out = [("v", v) for v in lay.var_names] + [("c", c) for c in lay.const_values]
        na = len(out)
        ops, lefts, rights = lay.op[na:].tolist(), lay.left[na:].tolist(), lay.right[na:].tolist()
        out += [("a", OPERATORS[o], l, r) for o, l, r in zip(ops, lefts, rights)]
        return tuple(out)


@dataclass(frozen=True, eq=False)
class Layout:
    """Index-only description of a universe in canonical order.

    ``op``, ``left`` and ``right`` hold the operator rank and child indices of
    every application (-1 for atoms). Level ``s`` (terms with ``s``
    applications) occupies ``starts[s]:starts[s] + counts[s]``.
    """

    var_names: tuple[str, ...]
    const_values: tuple[int, ...]
    op_ranks: tuple[int, ...]
    starts: tuple[int, ...]
    counts: tuple[int, ...]
    op: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def n(self) -> int:
        return len(self.op)

    @property
    def n_atoms(self) -> int:
        return len(self.var_names) + len(self.const_values)

    @classmethod
    def build(cls, u: TermUniverse) -> "Layout":
        total = u.count()
        if total > u.capacity:
            raise CapacityError(
                f"universe of {total} terms exceeds the cap of {u.capacity}; lower the term-size bound"
            )
        var_names = tuple(sorted(u.variables))
        const_values = tuple(sorted(u.constants))
        op_ranks = tuple(sorted(OPERATORS.index(o) for o in u.operators))
        n_atoms = len(var_names) + len(const_values)
        starts, counts = [0], [n_atoms]
        ops, lefts, rights = [np.full(n_atoms, -1, np.int64)], [np.full(n_atoms, -1, np.int64)], [np.full(n_atoms, -1, np.int64)]
        for s in range(1, u.bound + 1):
            starts.append(starts[-1] + counts[-1])
            counts.append(0)
            for o in op_ranks:
                for ls in range(s):
                    rs = s - 1 - ls
                    li = np.arange(starts[ls], starts[ls] + counts[ls], dtype=np.int64)
                    ri = np.arange(starts[rs], starts[rs] + counts[rs], dtype=np.int64)
                    lg, rg = np.meshgrid(li, ri, indexing="ij")
                    lefts.append(lg.reshape(-1))
                    rights.append(rg.reshape(-1))
                    ops.append(np.full(lg.size, o, np.int64))
                    counts[-1] += lg.size
        return cls(var_names, const_values, op_ranks, tuple(starts), tuple(counts),
                   np.concatenate(ops), np.concatenate(lefts), np.concatenate(rights))

    def _locate(self, t: Term) -> tuple[int, int] | None:
        """(level, offset within level) of ``t``."""
        if isinstance(t, Var):
            try:
                return 0, self.var_names.index(t.name)
            except ValueError:
                return None
        if isinstance(t, Const):
            try:
                return 0, len(self.var_names) + self.const_values.index(t.value)
            except ValueError:
                return None
        rank = OPERATORS.index(t.op)
        if rank not in self.op_ranks:
            return None
        lpos, rpos = self._locate(t.left), self._locate(t.right)
        if lpos is None or rpos is None:
            return None
        s = lpos[0] + rpos[0] + 1
        if s >= len(self.counts):
            return None
        # within a level: operator, then left size, then left, then right
        per_op = self.counts[s] // len(self.op_ranks)
        offset = self.op_ranks.index(rank) * per_op
        offset += sum(self.counts[ls] * self.counts[s - 1 - ls] for ls in range(lpos[0]))
        offset += lpos[1] * self.counts[rpos[0]] + rpos[1]
        return s, offset

    def term(self, i: int) -> Term:
        """The term at canonical index ``i``."""
        nv = len(self.var_names)
        if i < nv:
            return Var(self.var_names[i])
        if i < self.n_atoms:
            return Const(self.const_values[i - nv])
        return App(OPERATORS[int(self.op[i])], self.term(int(self.left[i])), self.term(int(self.right[i])))

    def position(self, t: Term) -> int | None:
        loc = self._locate(t)
        return None if loc is None else self.starts[loc[0]] + loc[1]


def enumerate_universe(u: TermUniverse) -> list[Term]:
    """Every term of ``u`` in canonical order; raises CapacityError past the cap."""
    total = u.count()
    if total > u.capacity:
        raise CapacityError(
            f"universe of {total} terms exceeds the cap of {u.capacity}; lower the term-size bound"
        )
    by_size: list[list[Term]] = [u.atoms()]
    ops = sorted(u.operators, key=OPERATORS.index)
    for s in range(1, u.bound + 1):
        level = []
        for op in ops:
            for ls in range(s):
                for left in by_size[ls]:
                    for right in by_size[s - 1 - ls]:
                        level.append(App(op, left, right))
        by_size.append(level)
    # built level by level in (op, left, right) order, which is already canonical
    return [t for level in by_size for t in level]
