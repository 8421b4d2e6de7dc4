"""Strong equivalence DAGs.

An SED node carries a (possibly empty) set of variables and a type: bottom
(an unknown value), an integer constant, or an operator applied to two child
nodes. A node stands for its variables plus every term its type can build,
so ``<c, +>`` over ``<x, 1>`` and ``<y, 2>`` stands for ``c, x+y, x+2, 1+y,
1+2``. Nodes without variables are *anonymous*.

SED values are immutable and always canonical: no node represents zero
terms, no two nodes are congruent, and node ids are assigned in a
deterministic order, so isomorphic SEDs compare equal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Union

from .lang import Assign
from .terms import OPERATORS, App, Const, Term, Var, size


@dataclass(frozen=True)
class Bottom:
    def __str__(self) -> str:
        return "⊥"


@dataclass(frozen=True)
class ConstType:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class AppType:
    op: str
    left: int
    right: int

    def __str__(self) -> str:
        return self.op


NodeType = Union[Bottom, ConstType, AppType]
BOTTOM = Bottom()


@dataclass(frozen=True)
class SEDNode:
    id: int
    vars: frozenset[str]
    ntype: NodeType

    @property
    def anonymous(self) -> bool:
        return not self.vars

    @property
    def children(self) -> tuple[int, ...]:
        if isinstance(self.ntype, AppType):
            return (self.ntype.left, self.ntype.right)
        return ()

    def label(self) -> str:
        return f"⟨{','.join(sorted(self.vars))} | {self.ntype}⟩"


@dataclass(frozen=True, eq=False)
class SED:
    nodes: Mapping[int, SEDNode]
    var_node: Mapping[str, int]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SED):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @cached_property
    def key(self) -> tuple:
        """Isomorphism-invariant fingerprint (ids are canonical already)."""
        return tuple((n.id, tuple(sorted(n.vars)), n.ntype) for n in self.nodes.values())

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(self.var_node)

    def node(self, var: str) -> SEDNode:
        return self.nodes[self.var_node[var]]

    @cached_property
    def _const_index(self) -> dict[int, int]:
        return {n.ntype.value: n.id for n in self.nodes.values() if isinstance(n.ntype, ConstType)}

    @cached_property
    def _app_index(self) -> dict[tuple[str, int, int], int]:
        return {
            (n.ntype.op, n.ntype.left, n.ntype.right): n.id
            for n in self.nodes.values()
            if isinstance(n.ntype, AppType)
        }

    @cached_property
    def parents(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {i: [] for i in self.nodes}
        for n in self.nodes.values():
            for c in n.children:
                out[c].append(n.id)
        return out

    def node_of(self, t: Term) -> int | None:
        """The node representing ``t``, or None when no node does."""
        if isinstance(t, Var):
            return self.var_node.get(t.name)
        if isinstance(t, Const):
            return self._const_index.get(t.value)
        left = self.node_of(t.left)
        if left is None:
            return None
        right = self.node_of(t.right)
        if right is None:
            return None
        return self._app_index.get((t.op, left, right))

    def node_vector(self, structure) -> list[int]:
        """``node_of`` for every term of a universe ``structure``; -1 where unrepresented."""
        consts, apps, var_node = self._const_index, self._app_index, self.var_node
        out: list[int] = []
        for entry in structure:
            tag = entry[0]
            if tag == "v":
                out.append(var_node.get(entry[1], -1))
            elif tag == "c":
                out.append(consts.get(entry[1], -1))
            else:
                left, right = out[entry[2]], out[entry[3]]
                out.append(-1 if left < 0 or right < 0 else apps.get((entry[1], left, right), -1))
        return out

    def depth(self) -> int:
        """Longest chain of nodes from a root to a leaf."""
        heights = _heights(self.nodes)
        return max(heights.values(), default=0)

    def render(self) -> str:
        lines = []
        for n in self.nodes.values():
            kids = " -> " + ", ".join(f"n{c}" for c in n.children) if n.children else ""
            lines.append(f"n{n.id} {n.label()}{kids}")
        return "\n".join(lines)

    def to_json(self) -> list[dict]:
        return [
            {"id": n.id, "vars": sorted(n.vars), "type": str(n.ntype), "children": list(n.children)}
            for n in self.nodes.values()
        ]

    def to_dot(self, name: str = "SED") -> str:
        lines = [f"digraph {name} {{", "  node [shape=record];"]
        for n in self.nodes.values():
            label = n.label().replace("|", "\\|")
            lines.append(f'  n{n.id} [label="{label}"];')
        for n in self.nodes.values():
            for side, c in zip("LR", n.children):
                lines.append(f'  n{n.id} -> n{c} [label="{side}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _heights(nodes: Mapping[int, object]) -> dict[int, int]:
    """Height of each node (leaves are 1). ``nodes`` maps id -> object with .children
    or a (vars, ntype) pair."""
    heights: dict[int, int] = {}

    def kids(i):
        n = nodes[i]
        ntype = n.ntype if isinstance(n, SEDNode) else n[1]
        return (ntype.left, ntype.right) if isinstance(ntype, AppType) else ()

    for start in nodes:
        if start in heights:
            continue
        stack = [(start, False)]
        while stack:
            i, done = stack.pop()
            if i in heights:
                continue
            ks = kids(i)
            if done or not ks:
                heights[i] = 1 + max((heights[k] for k in ks), default=0)
            else:
                stack.append((i, True))
                stack.extend((k, False) for k in ks if k not in heights)
    return heights


def canonicalize(raw: Mapping[int, tuple[frozenset, NodeType]], var_node: Mapping[str, int],
                 roots: Iterable[int] | None = None) -> SED:
    """Build a canonical SED from raw ``id -> (vars, type)`` entries.

    Keeps only nodes reachable from ``roots`` (default: all), turns nodes with
    an empty child into bottom, drops nodes that represent no term, merges
    congruent nodes and renumbers deterministically.
    """
    if roots is None:
        keep = set(raw)
    else:
        keep, stack = set(), list(roots)
        while stack:
            i = stack.pop()
            if i in keep:
                continue
            keep.add(i)
            t = raw[i][1]
            if isinstance(t, AppType):
                stack += [t.left, t.right]
    raw = {i: raw[i] for i in keep}
    heights = _heights(raw)
    order = sorted(raw, key=lambda i: (heights[i], i))

    vacuous: set[int] = set()
    fixed: dict[int, tuple[frozenset, NodeType]] = {}
    for i in order:
        vs, t = raw[i]
        if isinstance(t, AppType) and (t.left in vacuous or t.right in vacuous):
            t = BOTTOM
        if not vs and isinstance(t, Bottom):
            vacuous.add(i)
            continue
        fixed[i] = (vs, t)

    # merge congruent nodes bottom-up
    rep: dict[int, int] = {}
    merged: dict[int, list] = {}
    seen: dict[NodeType, int] = {}
    for i in order:
        if i not in fixed:
            continue
        vs, t = fixed[i]
        if isinstance(t, AppType):
            t = AppType(t.op, rep[t.left], rep[t.right])
        if not isinstance(t, Bottom) and t in seen:
            r = seen[t]
            rep[i] = r
            merged[r][0] = merged[r][0] | vs
            continue
        if not isinstance(t, Bottom):
            seen[t] = i
        rep[i] = i
        merged[i] = [vs, t]

    # canonical numbering: by height, then variables, then type; heights are
    # recomputed because bottoming and merging change them
    heights = _heights(merged)
    new_id: dict[int, int] = {}
    final: dict[int, SEDNode] = {}
    by_height: dict[int, list[int]] = {}
    for i in merged:
        by_height.setdefault(heights[i], []).append(i)
    for h in sorted(by_height):
        def sort_key(i):
            vs, t = merged[i]
            if isinstance(t, Bottom):
                tk = (0,)
            elif isinstance(t, ConstType):
                tk = (1, t.value)
            else:
                tk = (2, OPERATORS.index(t.op), new_id[t.left], new_id[t.right])
            return (tuple(sorted(vs)), tk)

        for i in sorted(by_height[h], key=sort_key):
            vs, t = merged[i]
            if isinstance(t, AppType):
                t = AppType(t.op, new_id[t.left], new_id[t.right])
            nid = len(final)
            new_id[i] = nid
            final[nid] = SEDNode(nid, frozenset(vs), t)

    vmap = {}
    for v, i in var_node.items():
        r = rep.get(i)
        if r is None:
            raise AssertionError(f"variable {v} lost its node")
        vmap[v] = new_id[r]
    return SED(final, dict(sorted(vmap.items())))


def _raw(g: SED) -> dict[int, tuple[frozenset, NodeType]]:
    return {i: (n.vars, n.ntype) for i, n in g.nodes.items()}


def sed_initial(variables: Iterable[str]) -> SED:
    """One bottom node per variable."""
    raw = {}
    var_node = {}
    for i, v in enumerate(sorted(set(variables))):
        raw[i] = (frozenset([v]), BOTTOM)
        var_node[v] = i
    return canonicalize(raw, var_node)


def sed_transfer(g: SED, s: Assign) -> SED:
    """Assignment ``x := e``: build ``e`` over the current nodes (reusing
    congruent ones), then move ``x`` onto it. The node ``x`` leaves keeps
    standing for whatever else it represents."""
    raw = _raw(g)
    var_node = dict(g.var_node)
    const_idx = dict(g._const_index)
    app_idx = dict(g._app_index)
    next_id = max(raw, default=-1) + 1

    def materialize(t: Term) -> int:
        nonlocal next_id
        if isinstance(t, Var):
            if t.name not in var_node:
                raise KeyError(f"variable {t.name} is not tracked by this SED")
            return var_node[t.name]
        if isinstance(t, Const):
            key = t.value
            if key in const_idx:
                return const_idx[key]
            ntype: NodeType = ConstType(t.value)
            const_idx[key] = next_id
        else:
            left, right = materialize(t.left), materialize(t.right)
            k = (t.op, left, right)
            if k in app_idx:
                return app_idx[k]
            ntype = AppType(t.op, left, right)
            app_idx[k] = next_id
        raw[next_id] = (frozenset(), ntype)
        next_id += 1
        return next_id - 1

    target = materialize(s.rhs)
    old = var_node.get(s.target)
    if old != target:
        if old is not None:
            vs, t = raw[old]
            raw[old] = (vs - {s.target}, t)
        vs, t = raw[target]
        raw[target] = (vs | {s.target}, t)
        var_node[s.target] = target
    return canonicalize(raw, var_node)


@dataclass
class IntersectStats:
    calls: int = 0
    pairs: set = field(default_factory=set)
    max_depth: int = 0
    truncations: int = 0

    @property
    def distinct(self) -> int:
        return len(self.pairs)


class SEDBuilder:
    """Output SED under construction for one join: raw nodes plus the pair memo."""

    def __init__(self):
        self.raw: dict[int, tuple[frozenset, NodeType]] = {}
        self.memo: dict[tuple[int, int], int] = {}
        self.stats = IntersectStats()

    def add(self, vs: frozenset, ntype: NodeType) -> int:
        nid = len(self.raw)
        self.raw[nid] = (vs, ntype)
        return nid

    def is_vacuous(self, nid: int) -> bool:
        vs, t = self.raw[nid]
        return not vs and isinstance(t, Bottom)


def intersect(g1: SED, n1: int, g2: SED, n2: int, counter: int, out: SEDBuilder,
              _depth: int = 1) -> int | None:
    """Node of ``out`` standing for what ``n1`` (in g1) and ``n2`` (in g2) share.

    Each nested call spends one unit of ``counter``; a call with nothing left
    returns None and its caller falls back to bottom. Results are memoized per
    node pair, except results cut short by the budget below the top level,
    which a later call with more budget may still improve.
    """
    key = (n1, n2)
    hit = out.memo.get(key)
    if hit is not None:
        return hit
    if counter <= 0:
        out.stats.truncations += 1
        return None
    st = out.stats
    st.calls += 1
    st.pairs.add(key)
    st.max_depth = max(st.max_depth, _depth)

    a, b = g1.nodes[n1], g2.nodes[n2]
    vs = a.vars & b.vars
    ta, tb = a.ntype, b.ntype
    cut = False
    ntype: NodeType = BOTTOM
    if isinstance(ta, ConstType) and ta == tb:
        ntype = ta
    elif isinstance(ta, AppType) and isinstance(tb, AppType) and ta.op == tb.op:
        left = intersect(g1, ta.left, g2, tb.left, counter - 1, out, _depth + 1)
        right = intersect(g1, ta.right, g2, tb.right, counter - 1, out, _depth + 1) if left is not None else None
        if left is None or right is None:
            cut = True
        elif not (out.is_vacuous(left) or out.is_vacuous(right)):
            ntype = AppType(ta.op, left, right)
    nid = out.add(vs, ntype)
    if not cut or _depth == 1:
        out.memo[key] = nid
    return nid


def prune_unnecessary(g: SED) -> SED:
    """Drop anonymous nodes whose ancestors are all anonymous.

    The other half of the criterion (all descendants anonymous) can only
    remove a node no kept parent points at, which the first half already
    covers, so what survives is exactly what variable-bearing nodes reach.
    """
    roots = [n.id for n in g.nodes.values() if n.vars]
    return canonicalize(_raw(g), g.var_node, roots)


def terms_of(g: SED, n: int, max_size: int) -> set[Term]:
    """Every term of size at most ``max_size`` that node ``n`` represents."""
    memo: dict[tuple[int, int], set[Term]] = {}

    def go(i: int, budget: int) -> set[Term]:
        k = (i, budget)
        if k in memo:
            return memo[k]
        node = g.nodes[i]
        out: set[Term] = {Var(v) for v in node.vars}
        t = node.ntype
        if isinstance(t, ConstType):
            out.add(Const(t.value))
        elif isinstance(t, AppType) and budget >= 1:
            lefts = go(t.left, budget - 1)
            for tl in lefts:
                rest = budget - 1 - size(tl)
                for tr in go(t.right, rest):
                    out.add(App(t.op, tl, tr))
        memo[k] = out
        return out

    return go(n, max_size)


def sed_equiv(g: SED, t1: Term, t2: Term, max_size: int | None = None) -> bool:
    """True iff one node represents both terms (each within ``max_size``)."""
    if max_size is not None and (size(t1) > max_size or size(t2) > max_size):
        return False
    n1 = g.node_of(t1)
    return n1 is not None and n1 == g.node_of(t2)
