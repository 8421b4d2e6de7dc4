"""Random program generation and the three-way differential check."""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field

import numpy as np

from .analyses import analyze, canonical_relation, default_s_prime, default_universe, is_subrelation, relation
from .cfg import EXIT_POINT, build_cfg
from .dataflow import DivergenceError
from .herbrand import PathOracle
from .join import Instrumentation
from .lang import Assign, If, Label, Program, While
from .terms import OPERATORS, App, Const, Term, TermUniverse, Var, size


@dataclass(frozen=True)
class Shape:
    n_vars: int = 4
    n_stmts: int = 12
    n_joins: int = 3
    max_term_size: int = 3
    loops: bool = False
    constants: tuple[int, ...] = (1, 2)
    operators: tuple[str, ...] = ("+", "*")
    window: int = 2  # term size of the universe the relations are compared on
    kildall_margin: int = 1  # extra term size the partition analysis tracks beyond the window

    def __post_init__(self):
        if not 1 <= self.n_vars <= 26:
            raise ValueError("n_vars must be in 1..26")
        if self.n_stmts < 0 or self.n_joins < 0 or self.max_term_size < 0:
            raise ValueError("shape parameters must be non-negative")
        if not set(self.operators) <= set(OPERATORS):
            raise ValueError(f"operators must come from {OPERATORS}")


def _random_term(rng: random.Random, shape: Shape, names: list[str], budget: int) -> Term:
    if budget == 0 or rng.random() < 0.3:
        if shape.constants and rng.random() < 0.3:
            return Const(rng.choice(shape.constants))
        return Var(rng.choice(names))
    left_budget = rng.randint(0, budget - 1)
    return App(
        rng.choice(shape.operators),
        _random_term(rng, shape, names, left_budget),
        _random_term(rng, shape, names, budget - 1 - left_budget),
    )


def generate_program(rng: random.Random, shape: Shape) -> Program:
    """A random program with exactly ``n_stmts`` assignments and at most
    ``n_joins`` if/else (or while) constructs; labels ``L0, L1, ...`` are
    sprinkled between items."""
    names = [chr(ord("a") + i) for i in range(shape.n_vars)]
    stmts_left = [shape.n_stmts]
    joins_left = [shape.n_joins]
    labels = [0]

    def stmt() -> Assign:
        stmts_left[0] -= 1
        rhs = _random_term(rng, shape, names, rng.randint(0, shape.max_term_size))
        return Assign(rng.choice(names), rhs)

    def label() -> Label:
        labels[0] += 1
        return Label(f"L{labels[0] - 1}")

    def items(depth: int, quota: int) -> tuple:
        out = []
        while quota > 0 and stmts_left[0] > 0:
            r = rng.random()
            if joins_left[0] > 0 and depth < 2 and r < 0.25 and quota >= 2:
                joins_left[0] -= 1
                if shape.loops and rng.random() < 0.4:
                    body_q = rng.randint(1, quota - 1)
                    out.append(While(items(depth + 1, body_q)))
                    quota -= body_q
                else:
                    q1 = rng.randint(0, quota - 1)
                    q2 = rng.randint(0, quota - 1 - q1)
                    out.append(If(items(depth + 1, q1) + (label(),), items(depth + 1, q2) + (label(),)))
                    quota -= q1 + q2
                out.append(label())
            else:
                out.append(stmt())
                quota -= 1
                if rng.random() < 0.2:
                    out.append(label())
        return tuple(out)

    body = items(0, shape.n_stmts)
    # statements the nested quotas never spent
    tail = tuple(stmt() for _ in range(stmts_left[0]))
    return Program(body + tail)


@dataclass
class Finding:
    kind: str
    point: str
    source: str

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ProgramCheck:
    findings: list[Finding] = field(default_factory=list)
    strict_gain: bool = False  # sed-modified detected something sed-original missed
    joins: int = 0
    intersect_max: int = 0
    e_squared: int = 0
    depth_max: int = 0
    s_prime: int = 0
    bound_violations: int = 0
    depth_violations: int = 0
    node_bound_violations: int = 0
    diverged: list[str] = field(default_factory=list)


def check_program(p: Program, shape: Shape) -> ProgramCheck:
    """Run all three analyses and compare their relations at every labelled
    point and at the exit, over the universe of terms of size <= window."""
    out = ProgramCheck()
    cfg = build_cfg(p)
    window = TermUniverse.of(shape.window, p.variables(), p.constants(), p.operators())
    kildall_universe = default_universe(p, max(p.max_term_size(), shape.window + shape.kildall_margin))
    inst = Instrumentation()
    runs = {}
    for algo in ("kildall", "sed-original", "sed-modified"):
        try:
            runs[algo] = analyze(p, algo, kildall_universe, inst=inst)
        except DivergenceError as exc:
            out.diverged.append(f"{algo}: {exc}")
    loop_free = not p.has_loops()
    e = len(p.expressions())
    out.e_squared = e * e
    out.s_prime = default_s_prime(cfg)
    for rec in inst.records:
        out.joins += 1
        out.intersect_max = max(out.intersect_max, rec.distinct_pairs)
        out.depth_max = max(out.depth_max, rec.recursion_depth_max)
        if rec.distinct_pairs > e * e:
            out.bound_violations += 1
        if rec.recursion_depth_max > rec.s_prime:
            out.depth_violations += 1
        if rec.variant == "modified" and rec.result_nodes > e:
            out.node_bound_violations += 1
    if len(runs) < 3:
        return out

    points = [pt for pt in cfg.labels] + [EXIT_POINT]
    source = str(p)
    oracle = PathOracle(p) if loop_free else None
    for pt in points:
        rel = {a: relation(r.result.states[pt], window) for a, r in runs.items() if pt in r.result.states}
        if len(rel) < 3:
            continue
        orig, mod, kil = rel["sed-original"], rel["sed-modified"], rel["kildall"]
        if not is_subrelation(orig, mod):
            out.findings.append(Finding("original-not-subset-of-modified", pt, source))
        if not is_subrelation(mod, kil):
            out.findings.append(Finding("modified-not-subset-of-kildall", pt, source))
        if loop_free:
            if (mod != kil).any():
                out.findings.append(Finding("modified-differs-from-kildall", pt, source))
            if not agrees_with_paths(kil, *oracle.evaluate(pt, window)):
                out.findings.append(Finding("kildall-disagrees-with-paths", pt, source))
        if (orig != mod).any():
            out.strict_gain = True
    return out


def agrees_with_paths(rel: np.ndarray, value_keys, computed) -> bool:
    """Path check for one point: every represented term was computed on all
    paths, and represented terms share a class iff their values agree on all
    paths. (Values computed on every path, but by statements after a merge
    on some of them, are legitimately invisible to a merge-based analysis, so
    presence is only checked one way.)"""
    present = rel >= 0
    if not np.asarray(computed)[present].all():
        return False
    expected = canonical_relation(np.where(present, np.asarray(value_keys), -1))
    return bool((expected == rel).all())


def minimize(p: Program, shape: Shape, kind: str) -> Program:
    """Greedy one-item-at-a-time deletion while a finding of ``kind`` persists."""

    def still_fails(q: Program) -> bool:
        try:
            return any(f.kind == kind for f in check_program(q, shape).findings)
        except Exception:
            return False

    items = list(p.items)
    changed = True
    while changed:
        changed = False
        for candidate in _deletions(tuple(items)):
            if still_fails(Program(candidate)):
                items = list(candidate)
                changed = True
                break
    return Program(tuple(items))


def _deletions(items: tuple):
    for i, it in enumerate(items):
        yield items[:i] + items[i + 1:]
        if isinstance(it, If):
            for t in _deletions(it.then):
                yield items[:i] + (If(t, it.orelse),) + items[i + 1:]
            for e in _deletions(it.orelse):
                yield items[:i] + (If(it.then, e),) + items[i + 1:]
        elif isinstance(it, While):
            for b in _deletions(it.body):
                yield items[:i] + (While(b),) + items[i + 1:]


@dataclass
class FuzzSummary:
    seed: int
    count: int
    shape: dict
    programs_with_joins: int = 0
    strict_gain_programs: int = 0
    joins_checked: int = 0
    intersect_bound_violations: int = 0
    recursion_depth_violations: int = 0
    node_bound_violations: int = 0
    max_intersect_calls: int = 0
    max_recursion_depth: int = 0
    findings: dict = field(default_factory=dict)
    reproducers: list = field(default_factory=list)
    diverged: list = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(self.findings.values())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["violations"] = self.violations
        return d


def run_fuzz(seed: int, count: int, shape: Shape = Shape(), minimize_findings: bool = True,
             max_reproducers: int = 5) -> FuzzSummary:
    rng = random.Random(seed)
    summary = FuzzSummary(seed, count, asdict(shape))
    for _ in range(count):
        p = generate_program(rng, shape)
        res = check_program(p, shape)
        if build_cfg(p).joins:
            summary.programs_with_joins += 1
        summary.strict_gain_programs += res.strict_gain
        summary.joins_checked += res.joins
        summary.intersect_bound_violations += res.bound_violations
        summary.recursion_depth_violations += res.depth_violations
        summary.node_bound_violations += res.node_bound_violations
        summary.max_intersect_calls = max(summary.max_intersect_calls, res.intersect_max)
        summary.max_recursion_depth = max(summary.max_recursion_depth, res.depth_max)
        summary.diverged += res.diverged
        for f in res.findings:
            summary.findings[f.kind] = summary.findings.get(f.kind, 0) + 1
        kinds_seen = {r["kind"] for r in summary.reproducers}
        for f in res.findings:
            if f.kind in kinds_seen or len(summary.reproducers) >= max_reproducers:
                continue
            kinds_seen.add(f.kind)
            src = str(minimize(p, shape, f.kind)) if minimize_findings else f.source
            summary.reproducers.append({"kind": f.kind, "point": f.point, "source": src})
    summary.findings = dict(sorted(summary.findings.items()))
    return summary
