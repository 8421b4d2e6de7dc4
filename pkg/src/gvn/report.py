"""Per-point reports, availability queries and analysis diffs."""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .analyses import ALGOS, Run, analyze, default_universe, equivalent_pairs, relation
from .cfg import ENTRY_POINT, EXIT_POINT
from .join import Instrumentation
from .kildall import StructuredPartition, kildall_equiv, render_classes
from .lang import Program, parse
from .sed import SED, sed_equiv, terms_of
from .terms import Term, TermUniverse, Var, size, sort_key


class UnknownPointError(KeyError):
    def __init__(self, point: str, known):
        self.point = point
        self.known = list(known)
        super().__init__(point)

    def __str__(self) -> str:
        return f"unknown program point {self.point!r}; known points: {', '.join(self.known)}"


FIXTURES = ("fig1.gvn", "fig3.gvn")


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("gvn") / "fixtures" / name))


def load_program(path: str) -> Program:
    """Parse ``path``; bare fixture names (``fig1.gvn``) resolve to the bundled copies."""
    p = Path(path)
    if not p.exists() and path in FIXTURES:
        p = fixture_path(path)
    return parse(p.read_text())


def default_points(run: Run) -> list[str]:
    labels = list(run.cfg.labels)
    if not run.program.statements():
        return [ENTRY_POINT] + labels
    return [ENTRY_POINT] + labels + [EXIT_POINT]


def state_at(run: Run, point: str):
    try:
        return run.result.at(point)
    except KeyError:
        raise UnknownPointError(point, run.result.states) from None


def sort_classes(groups) -> list[list[Term]]:
    out = [sorted(g, key=sort_key) for g in groups]
    out.sort(key=lambda c: (len(c), [sort_key(t) for t in c]))
    return out


def classes_over(state, universe: TermUniverse) -> list[list[Term]]:
    """Classes of represented universe terms."""
    if isinstance(state, StructuredPartition) and state.universe == universe:
        return state.classes()
    rel = relation(state, universe)
    groups: dict[int, list[Term]] = {}
    term = universe.layout.term
    for i, k in enumerate(rel.tolist()):
        if k >= 0:
            groups.setdefault(k, []).append(term(i))
    return sort_classes(groups.values())


@dataclass
class RunReport:
    algo: str
    universe: TermUniverse
    run: Run
    inst: Instrumentation
    e_squared: int

    def instrumentation(self) -> dict:
        recs = list(self.inst.records)
        return {
            "intersect_calls": sum(r.distinct_pairs for r in recs),
            "bound_e_squared": self.e_squared,
            "recursion_depth_max": max((r.recursion_depth_max for r in recs), default=0),
        }

    def point(self, point: str) -> dict:
        state = state_at(self.run, point)
        out = {
            "point": point,
            "algo": self.algo,
            "classes": [[str(t) for t in c] for c in classes_over(state, self.universe)],
        }
        if isinstance(state, SED):
            out["nodes"] = [
                {"vars": sorted(n.vars), "type": str(n.ntype), "children": list(n.children)}
                for n in state.nodes.values()
            ]
        out["instrumentation"] = self.instrumentation()
        return out

    def render_point(self, point: str) -> str:
        state = state_at(self.run, point)
        lines = [f"{point} [{self.algo}]"]
        if isinstance(state, SED):
            lines += ["  " + ln for ln in state.render().splitlines()]
            lines.append("  classes: " + render_classes(classes_over(state, self.universe)))
        else:
            lines.append("  " + render_classes(classes_over(state, self.universe)))
        return "\n".join(lines)


def run_report(p: Program, algo: str, max_term_size: int | None = None,
               extra: tuple[Term, ...] = ()) -> RunReport:
    if algo not in ALGOS:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGOS)}")
    universe = default_universe(p, max_term_size, extra)
    inst = Instrumentation()
    run = analyze(p, algo, universe, inst=inst)
    e = len(p.expressions())
    return RunReport(algo, universe, run, inst, e * e)


@dataclass
class AvailabilityAnswer:
    point: str
    term: Term
    available: bool
    witness: list[Term] | None = None

    def to_dict(self) -> dict:
        return {
            "point": self.point,
            "term": str(self.term),
            "available": self.available,
            "witness": None if self.witness is None else [str(t) for t in self.witness],
        }

    def render(self) -> str:
        verdict = "available" if self.available else "not available"
        out = f"{self.term} at {self.point}: {verdict}"
        if self.witness is not None:
            out += " " + render_classes([self.witness])
        return out


def available(rep: RunReport, point: str, t: Term) -> AvailabilityAnswer:
    """``t`` is available when the state puts it in one class with a variable
    or with some other term; the witness is that class (bounded)."""
    state = state_at(rep.run, point)
    bound = max(rep.universe.bound, size(t))
    if isinstance(state, SED):
        n = state.node_of(t)
        members = None if n is None else sort_classes([terms_of(state, n, bound)])[0]
    else:
        members = state.class_of(t)
    if members is None:
        return AvailabilityAnswer(point, t, False)
    ok = any(isinstance(m, Var) for m in members) or any(m != t for m in members)
    if ok:
        # re-verify with the analysis' own equivalence query
        other = next(m for m in members if m != t) if len(members) > 1 else t
        ok = _equiv(state, t, other)
    return AvailabilityAnswer(point, t, ok, members if ok else None)


def _equiv(state, t1: Term, t2: Term) -> bool:
    if isinstance(state, SED):
        return sed_equiv(state, t1, t2)
    return kildall_equiv(state, t1, t2)


@dataclass
class DiffReport:
    point: str
    algo_a: str
    algo_b: str
    only_in_a: list[tuple[Term, Term]] = field(default_factory=list)
    only_in_b: list[tuple[Term, Term]] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.only_in_a and not self.only_in_b

    def to_dict(self) -> dict:
        return {
            "point": self.point,
            "algoA": self.algo_a,
            "algoB": self.algo_b,
            "pairs_only_in_A": [[str(a), str(b)] for a, b in self.only_in_a],
            "pairs_only_in_B": [[str(a), str(b)] for a, b in self.only_in_b],
        }

    def render(self) -> str:
        lines = [f"{self.point}: {self.algo_a} vs {self.algo_b}"]
        for name, pairs in ((self.algo_a, self.only_in_a), (self.algo_b, self.only_in_b)):
            lines.append(f"  only in {name}: {len(pairs)}")
            lines += [f"    {a} == {b}" for a, b in pairs]
        return "\n".join(lines)


def diff(p: Program, algo_a: str, algo_b: str, point: str, max_term_size: int | None = None) -> DiffReport:
    ra, rb = run_report(p, algo_a, max_term_size), run_report(p, algo_b, max_term_size)
    universe = ra.universe
    sa, sb = state_at(ra.run, point), state_at(rb.run, point)
    terms = [universe.layout.term(i) for i in range(universe.layout.n)]
    pa = equivalent_pairs(relation(sa, universe), terms)
    pb = equivalent_pairs(relation(sb, universe), terms)
    key = lambda pr: (sort_key(pr[0]), sort_key(pr[1]))  # noqa: E731
    only_a = sorted((pr for pr in pa - pb if _equiv(sa, *pr) and not _equiv(sb, *pr)), key=key)
    only_b = sorted((pr for pr in pb - pa if _equiv(sb, *pr) and not _equiv(sa, *pr)), key=key)
    return DiffReport(point, algo_a, algo_b, only_a, only_b)
