"""Joining SEDs at control-flow merge points.

``sed_join_original`` intersects only the node pairs that hold a common
variable and prunes what no variable reaches. ``sed_join_modified``
intersects every pair of nodes and keeps anonymous results, so values
computed on both incoming paths survive even when no variable holds them.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .sed import SED, IntersectStats, SEDBuilder, canonicalize, intersect, prune_unnecessary


class InstrumentationDisabled(RuntimeError):
    pass


@dataclass(frozen=True)
class JoinRecord:
    variant: str
    left_nodes: int
    right_nodes: int
    intersect_calls: int
    distinct_pairs: int
    recursion_depth_max: int
    truncations: int
    result_nodes: int
    s_prime: int


class Instrumentation:
    """Collects one record per join while enabled."""

    def __init__(self, enabled: bool = True, keep: int | None = None):
        self.enabled = enabled
        self.records: deque[JoinRecord] = deque(maxlen=keep)

    def record(self, variant: str, g1: SED, g2: SED, st: IntersectStats, result: SED, s_prime: int):
        if self.enabled:
            self.records.append(JoinRecord(
                variant, len(g1), len(g2), st.calls, st.distinct, st.max_depth,
                st.truncations, len(result), s_prime,
            ))

    @property
    def last(self) -> JoinRecord:
        if not self.enabled:
            raise InstrumentationDisabled("join instrumentation is disabled")
        if not self.records:
            raise LookupError("no join has run yet")
        return self.records[-1]


_default = Instrumentation(enabled=True, keep=1)


def instrumentation() -> Instrumentation:
    return _default


def intersect_call_count(inst: Instrumentation | None = None) -> int:
    """Distinct node pairs evaluated by the most recent instrumented join."""
    inst = inst or _default
    if not inst.enabled:
        raise InstrumentationDisabled("join instrumentation is disabled")
    if not inst.records:
        return 0
    return inst.last.distinct_pairs


def _check(g1: SED, g2: SED, s_prime: int):
    if g1.variables != g2.variables:
        raise ValueError("joined SEDs must track the same variables")
    if s_prime < 1:
        raise ValueError("s_prime must be at least 1")


def sed_join_original(g1: SED, g2: SED, s_prime: int, inst: Instrumentation | None = None) -> SED:
    _check(g1, g2, s_prime)
    out = SEDBuilder()
    var_node = {}
    for v in sorted(g1.var_node):
        var_node[v] = intersect(g1, g1.var_node[v], g2, g2.var_node[v], s_prime, out)
    result = prune_unnecessary(canonicalize(out.raw, var_node, var_node.values()))
    (inst or _default).record("original", g1, g2, out.stats, result, s_prime)
    return result


def sed_join_modified(g1: SED, g2: SED, s_prime: int, inst: Instrumentation | None = None) -> SED:
    _check(g1, g2, s_prime)
    out = SEDBuilder()
    for n1 in g1.nodes:
        for n2 in g2.nodes:
            intersect(g1, n1, g2, n2, s_prime, out)
    var_node = {v: out.memo[(g1.var_node[v], g2.var_node[v])] for v in sorted(g1.var_node)}
    result = canonicalize(out.raw, var_node, out.memo.values())
    (inst or _default).record("modified", g1, g2, out.stats, result, s_prime)
    return result
