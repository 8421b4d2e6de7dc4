"""Control-flow graph with explicit program points.

A program point is a position inside a basic block: position ``k`` of a
block with ``n`` statements sits before statement ``k`` (``k == n`` is the
block exit). User labels name such positions; every position also has a
generated name ``__bB.K`` so any point can be queried.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .lang import Assign, If, Label, Program, While

ENTRY_POINT = "__entry"
EXIT_POINT = "__exit"


@dataclass
class Block:
    id: int
    statements: list[Assign] = field(default_factory=list)


@dataclass
class CFG:
    blocks: list[Block]
    edges: list[tuple[int, int]]
    entry: int
    exit: int
    labels: dict[str, tuple[int, int]]

    def preds(self, b: int) -> list[int]:
        return [u for u, v in self.edges if v == b]

    def succs(self, b: int) -> list[int]:
        return [v for u, v in self.edges if u == b]

    @property
    def joins(self) -> list[int]:
        return [b.id for b in self.blocks if len(self.preds(b.id)) >= 2]

    def points(self) -> dict[str, tuple[int, int]]:
        """Every program point: user labels, ``__entry``/``__exit`` and the generated ``__bB.K`` names."""
        out = dict(self.labels)
        out[ENTRY_POINT] = (self.entry, 0)
        out[EXIT_POINT] = (self.exit, len(self.blocks[self.exit].statements))
        for b in self.blocks:
            for k in range(len(b.statements) + 1):
                out[f"__b{b.id}.{k}"] = (b.id, k)
        return out

    def point_count(self) -> int:
        return sum(len(b.statements) + 1 for b in self.blocks)

    def reverse_postorder(self) -> list[int]:
        seen, order = set(), []

        def visit(b):
            seen.add(b)
            for s in self.succs(b):
                if s not in seen:
                    visit(s)
            order.append(b)

        visit(self.entry)
        return order[::-1]

    def back_edges(self) -> list[tuple[int, int]]:
        rank = {b: i for i, b in enumerate(self.reverse_postorder())}
        return [(u, v) for u, v in self.edges if rank[v] <= rank[u]]


class _Builder:
    def __init__(self):
        self.blocks: list[Block] = []
        self.edges: list[tuple[int, int]] = []
        self.labels: dict[str, tuple[int, int]] = {}

    def new_block(self) -> int:
        b = Block(len(self.blocks))
        self.blocks.append(b)
        return b.id

    def edge(self, u: int, v: int):
        self.edges.append((u, v))

    def emit(self, items, cur: int) -> int:
        for it in items:
            if isinstance(it, Assign):
                self.blocks[cur].statements.append(it)
            elif isinstance(it, Label):
                self.labels[it.name] = (cur, len(self.blocks[cur].statements))
            elif isinstance(it, If):
                then_b, else_b = self.new_block(), self.new_block()
                self.edge(cur, then_b)
                self.edge(cur, else_b)
                then_end = self.emit(it.then, then_b)
                else_end = self.emit(it.orelse, else_b)
                cur = self.new_block()
                self.edge(then_end, cur)
                self.edge(else_end, cur)
            else:
                head, body = self.new_block(), self.new_block()
                self.edge(cur, head)
                self.edge(head, body)
                body_end = self.emit(it.body, body)
                self.edge(body_end, head)
                cur = self.new_block()
                self.edge(head, cur)
        return cur


def build_cfg(p: Program) -> CFG:
    """Diamonds for ``if (*)``, a loop head with a back edge for ``while (*)``.

    A new block starts only at control flow, so a straight-line program is a
    single block.
    """
    b = _Builder()
    entry = b.new_block()
    exit_ = b.emit(p.items, entry)
    return CFG(b.blocks, b.edges, entry, exit_, b.labels)
