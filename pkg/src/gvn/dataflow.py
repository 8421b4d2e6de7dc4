"""Forward worklist fixpoint over a CFG, generic in the abstract state."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Any, Protocol

from .cfg import CFG
from .lang import Assign

DEFAULT_MAX_VISITS = 10_000


class DivergenceError(RuntimeError):
    def __init__(self, point: str, visits: int):
        self.point = point
        self.visits = visits
        super().__init__(f"no fixpoint after {visits} block visits (still changing at {point})")


class Analysis(Protocol):
    name: str

    def initial(self) -> Any: ...

    def transfer(self, state: Any, s: Assign) -> Any: ...

    def join(self, a: Any, b: Any) -> Any: ...

    def equal(self, a: Any, b: Any) -> bool: ...


@dataclass
class FixpointResult:
    cfg: CFG
    states: dict[str, Any]
    block_in: dict[int, Any]
    iterations: int
    warnings: list[str] = field(default_factory=list)

    def at(self, point: str) -> Any:
        try:
            return self.states[point]
        except KeyError:
            raise KeyError(f"unknown program point {point!r}") from None


def run_fixpoint(cfg: CFG, a: Analysis, max_visits: int = DEFAULT_MAX_VISITS) -> FixpointResult:
    """Iterate block transfer functions until no block input changes.

    Blocks are taken from the worklist in reverse post-order; a block with
    several predecessors folds ``join`` over their outputs in edge order.
    """
    rank = {b: i for i, b in enumerate(cfg.reverse_postorder())}
    preds = {b.id: cfg.preds(b.id) for b in cfg.blocks}
    succs = {b.id: cfg.succs(b.id) for b in cfg.blocks}
    block_in: dict[int, Any] = {}
    positions: dict[int, list[Any]] = {}  # state before each statement, plus the block output
    block_out: dict[int, Any] = {}
    worklist = [(rank[cfg.entry], cfg.entry)]
    queued = {cfg.entry}
    visits = 0

    while worklist:
        _, b = heapq.heappop(worklist)
        queued.discard(b)
        visits += 1
        if visits > max_visits:
            raise DivergenceError(_point_name(cfg, b), max_visits)
        if b == cfg.entry:
            incoming = [a.initial()]
        else:
            incoming = [block_out[p] for p in preds[b] if p in block_out]
        state = incoming[0]
        for other in incoming[1:]:
            state = a.join(state, other)
        if b in block_in and a.equal(block_in[b], state):
            continue
        block_in[b] = state
        seen = [state]
        for s in cfg.blocks[b].statements:
            state = a.transfer(state, s)
            seen.append(state)
        positions[b] = seen
        if b in block_out and a.equal(block_out[b], state):
            continue
        block_out[b] = state
        for s in succs[b]:
            if s not in queued:
                queued.add(s)
                heapq.heappush(worklist, (rank[s], s))

    states = {}
    for name, (b, k) in cfg.points().items():
        if b in positions:  # otherwise unreachable
            states[name] = positions[b][k]
    warnings = []
    for st in states.values():
        for w in getattr(st, "warnings", ()):
            if w not in warnings:
                warnings.append(w)
    return FixpointResult(cfg, states, block_in, visits, warnings)


def _point_name(cfg: CFG, b: int) -> str:
    for name, (blk, k) in cfg.labels.items():
        if blk == b:
            return name
    return f"__b{b}.0"
