import pytest

from gvn.report import load_program
from gvn.sed import SED

ACCEPTANCE: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(ACCEPTANCE[n])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])


def shape(g: SED, ignore=frozenset()) -> set:
    """Isomorphism-invariant description: each node by its label and its children's labels.
    Nodes whose only variables are in ``ignore`` and that have no parents are dropped."""
    def label(i):
        n = g.nodes[i]
        return (tuple(sorted(n.vars - ignore)), str(n.ntype))

    out = set()
    for n in g.nodes.values():
        if n.vars and n.vars <= ignore and not g.parents[n.id]:
            continue
        out.add((label(n.id), tuple(label(c) for c in n.children)))
    return out


@pytest.fixture(scope="session")
def fig1():
    return load_program("fig1.gvn")


@pytest.fixture(scope="session")
def fig3():
    return load_program("fig3.gvn")
