import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synthgraph.edgegen import GenerationConfig, generate  # noqa: E402
from synthgraph.graph import Graph  # noqa: E402
from synthgraph.model import extract_model  # noqa: E402
from synthgraph.refgraphs import erdos_renyi, two_class, watts_strogatz  # noqa: E402

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def complete(n):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star(leaves):
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def disjoint(*gs):
    edges, off = [], 0
    for g in gs:
        edges += [(u + off, v + off) for u, v in g.edges()]
        off += g.vertex_count
    return Graph.from_edges(off, edges)


def random_tree(n, seed):
    rng = np.random.default_rng(seed)
    return Graph.from_edges(n, [(i, int(rng.integers(i))) for i in range(1, n)])


def k4_minus_edge():
    g = complete(4)
    edges = [e for e in g.edges() if e != (2, 3)]
    return Graph.from_edges(4, edges)


def small_corpus():
    """Graphs with at most 200 vertices used by the oracle checks."""
    gs = [
        ("empty0", Graph(0)), ("empty5", Graph(5)), ("K1", complete(1)), ("K2", complete(2)),
        ("K3", complete(3)), ("K4", complete(4)), ("K4-e", k4_minus_edge()), ("K12", complete(12)),
        ("S4", star(4)), ("P5", path(5)), ("C5", cycle(5)), ("C6", cycle(6)),
        ("2xK3", disjoint(complete(3), complete(3))), ("K3+iso", disjoint(complete(3), Graph(1))),
        ("K4+leaf", Graph.from_edges(5, list(complete(4).edges()) + [(0, 4)])),
    ]
    for s in range(4):
        gs.append((f"tree{s}", random_tree(60 + 20 * s, s)))
    for n, p, s in [(30, 0.2, 1), (80, 0.05, 2), (120, 0.1, 3), (200, 0.03, 4), (200, 0.15, 5), (50, 0.5, 6)]:
        gs.append((f"er{n}-{p}", erdos_renyi(n, p, seed=s)))
    for n, k, b, s in [(40, 4, 0.0, 1), (100, 6, 0.2, 2), (200, 10, 0.1, 3), (150, 8, 1.0, 4)]:
        gs.append((f"ws{n}-{k}-{b}", watts_strogatz(n, k, b, seed=s)))
    gs.append(("twoclass200", two_class(200, 3, 20, 0.3, seed=7, high_fraction=0.05)))
    m = extract_model(watts_strogatz(300, 8, 0.1, seed=9))
    for s in range(3):
        gs.append((f"gen{s}", generate(m, 150, GenerationConfig(seed=s), threads=1)))
    gs.append(("gen+er", disjoint(generate(m, 100, GenerationConfig(seed=5), threads=1), erdos_renyi(90, 0.05, seed=8))))
    return gs


@pytest.fixture(scope="session")
def corpus():
    return small_corpus()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
