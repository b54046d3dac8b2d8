"""Validation metrics and source-vs-generated comparison."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.sparse import csgraph

from .graph import Graph
from .model import GraphModel, expected_cc_by_degree, local_clustering

CC_HIST_BINS = 100
DEFAULT_PROBES = (5, 32, 500)
DEFAULT_COVERAGE = 0.95


def degree_distribution(g: Graph) -> dict[int, int]:
    d, c = np.unique(g.degrees(), return_counts=True)
    return {int(k): int(v) for k, v in zip(d, c)}


def avg_cc_by_degree(g: Graph) -> dict[int, float]:
    """Mean local clustering per degree, for degrees >= 2."""
    deg = g.degrees()
    cc = local_clustering(g)
    mask = deg >= 2
    if not mask.any():
        return {}
    ds, inv = np.unique(deg[mask], return_inverse=True)
    sums = np.bincount(inv, weights=cc[mask])
    counts = np.bincount(inv)
    return {int(k): float(s / c) for k, s, c in zip(ds, sums, counts)}


def cc_histogram(g: Graph, bins: int = CC_HIST_BINS) -> list[int]:
    """Histogram of local clustering over vertices of degree >= 2."""
    deg = g.degrees()
    cc = local_clustering(g)[deg >= 2]
    idx = np.minimum((cc * bins).astype(np.int64), bins - 1)
    return np.bincount(idx, minlength=bins).tolist()


def joint_degree_distribution(g: Graph, d: int) -> dict[int, int]:
    """Degrees of the neighbours of all degree-``d`` vertices, as a histogram."""
    deg = g.degrees()
    out: Counter[int] = Counter()
    for v in np.flatnonzero(deg == d).tolist():
        out.update(deg[g.adj[v]].tolist())
    return dict(sorted(out.items()))


def kl_divergence(p: Mapping, q: Mapping) -> float:
    """KL(p || q) in nats between two histograms (counts or weights).

    If ``p`` has mass where ``q`` has none, ``q`` is smoothed: every bin of
    the union support gets ``1 / (2 * total_q)`` extra probability and ``q``
    is renormalized.  Otherwise no smoothing is applied.
    """
    tp = float(sum(p.values()))
    tq = float(sum(q.values()))
    if tp <= 0 or tq <= 0:
        raise ValueError("empty histogram")
    support = sorted(set(p) | set(q))
    pv = np.array([p.get(x, 0) for x in support], dtype=np.float64) / tp
    qv = np.array([q.get(x, 0) for x in support], dtype=np.float64) / tq
    if np.any((pv > 0) & (qv <= 0)):
        qv = qv + 1.0 / (2.0 * tq)
        qv /= qv.sum()
    m = pv > 0
    return float(max(0.0, np.sum(pv[m] * np.log(pv[m] / qv[m]))))


def kl_needs_smoothing(p: Mapping, q: Mapping) -> bool:
    return any(v > 0 and q.get(x, 0) <= 0 for x, v in p.items())


def connected_components(g: Graph) -> list[int]:
    """Component sizes, largest first."""
    if g.vertex_count == 0:
        return []
    _, labels = csgraph.connected_components(g.to_csr(), directed=False)
    return sorted(np.bincount(labels).tolist(), reverse=True)


def core_numbers(g: Graph) -> np.ndarray:
    """Core number of every vertex (bucket-queue peeling, linear time)."""
    n = g.vertex_count
    deg = g.degrees().tolist()
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    md = max(deg)
    bin_start = [0] * (md + 2)
    for d in deg:
        bin_start[d + 1] += 1
    for d in range(1, md + 2):
        bin_start[d] += bin_start[d - 1]
    pos = [0] * n
    order = [0] * n
    nxt = bin_start[:]
    for v in range(n):
        pos[v] = nxt[deg[v]]
        order[pos[v]] = v
        nxt[deg[v]] += 1
    adj = g.adj
    for i in range(n):
        v = order[i]
        dv = deg[v]
        for u in adj[v]:
            du = deg[u]
            if du > dv:
                # swap u to the front of its bin, then shrink the bin
                pu, pw = pos[u], bin_start[du]
                w = order[pw]
                if u != w:
                    order[pu], order[pw] = w, u
                    pos[u], pos[w] = pw, pu
                bin_start[du] += 1
                deg[u] = du - 1
    return np.asarray(deg, dtype=np.int64)


def kcore_decomposition(g: Graph) -> dict[int, int]:
    """Shell sizes: number of vertices per core number."""
    c, n = np.unique(core_numbers(g), return_counts=True)
    return {int(k): int(v) for k, v in zip(c, n)}


def pagerank(g: Graph, damping: float = 0.85, iters: int = 200, tol: float = 1e-13) -> np.ndarray:
    """Power-iteration PageRank with each edge used in both directions.

    Mass on isolated vertices is spread uniformly.  Stops early once the L1
    change drops below ``tol``.
    """
    n = g.vertex_count
    if n == 0:
        return np.zeros(0)
    a = g.to_csr()
    deg = np.asarray(a.sum(axis=1)).ravel()
    dangling = deg == 0
    inv = np.zeros(n)
    inv[~dangling] = 1.0 / deg[~dangling]
    x = np.full(n, 1.0 / n)
    for _ in range(iters):
        nx_ = damping * (a.T @ (x * inv)) + (damping * x[dangling].sum() + 1.0 - damping) / n
        nx_ /= nx_.sum()
        delta = np.abs(nx_ - x).sum()
        x = nx_
        if delta < tol:
            break
    return x


@dataclass
class MetricsReport:
    vertex_count: int
    edge_count: int
    degree_hist: dict[int, int]
    avg_cc_by_degree: dict[int, float]
    cc_hist: list[int]
    joint_degree: dict[int, dict[int, int]]
    component_sizes: list[int]
    kcore_shell_sizes: dict[int, int]
    pagerank: np.ndarray = field(repr=False)

    def tables(self) -> list[tuple[str, list[str], list[list]]]:
        pr = self.pagerank
        pr_rows = []
        if len(pr):
            q = np.quantile(pr, [0.0, 0.5, 0.9, 0.99, 1.0])
            pr_rows = [[name, f"{v:.6e}"] for name, v in zip(("min", "median", "p90", "p99", "max"), q)]
            pr_rows.append(["sum", f"{pr.sum():.12f}"])
        return [
            ("summary", ["metric", "value"], [["vertices", self.vertex_count], ["edges", self.edge_count]]),
            ("degree", ["degree", "count"], [[d, c] for d, c in sorted(self.degree_hist.items())]),
            ("cc_by_degree", ["degree", "avg_cc"],
             [[d, f"{c:.6f}"] for d, c in sorted(self.avg_cc_by_degree.items())]),
            ("components", ["rank", "size"], [[i, s] for i, s in enumerate(self.component_sizes)]),
            ("kcore", ["shell", "count"], [[k, c] for k, c in sorted(self.kcore_shell_sizes.items())]),
            ("pagerank", ["stat", "value"], pr_rows),
        ]

    def to_tsv(self) -> str:
        return format_tables(self.tables())


def format_tables(tables) -> str:
    out = []
    for name, header, rows in tables:
        out.append(f"## {name}")
        out.append("\t".join(header))
        out.extend("\t".join(str(x) for x in row) for row in rows)
        out.append("")
    return "\n".join(out)


def compute_report(g: Graph, probe_degrees=DEFAULT_PROBES) -> MetricsReport:
    deg = g.degrees()
    present = set(deg.tolist())
    return MetricsReport(
        vertex_count=g.vertex_count,
        edge_count=g.edge_count,
        degree_hist=degree_distribution(g),
        avg_cc_by_degree=avg_cc_by_degree(g),
        cc_hist=cc_histogram(g),
        joint_degree={d: joint_degree_distribution(g, d) for d in probe_degrees if d in present},
        component_sizes=connected_components(g),
        kcore_shell_sizes=kcore_decomposition(g),
        pagerank=pagerank(g),
    )


def cc_mae(source_cc: Mapping[int, float], generated_cc: Mapping[int, float],
           source_degree_hist: Mapping[int, int], coverage: float = DEFAULT_COVERAGE) -> float:
    """Vertex-mass-weighted mean absolute error of per-degree mean CC.

    Only degrees >= 2 are considered.  Degrees are taken in decreasing order
    of source vertex count until ``coverage`` of that mass is reached; a
    degree missing from the generated graph counts with generated CC 0.
    """
    mass = {d: c for d, c in source_degree_hist.items() if d >= 2 and c > 0 and d in source_cc}
    total = sum(mass.values())
    if total == 0:
        return 0.0
    chosen, acc = [], 0
    for d in sorted(mass, key=lambda k: (-mass[k], k)):
        if acc >= coverage * total:
            break
        chosen.append(d)
        acc += mass[d]
    err = sum(mass[d] * abs(source_cc[d] - generated_cc.get(d, 0.0)) for d in chosen)
    return err / acc


@dataclass
class ComparisonReport:
    degree_kl: float
    degree_kl_smoothed: bool
    cc_mae: float
    cc_coverage: float
    joint_degree_kl: dict[int, float | None]
    source_components: list[int] | None
    generated_components: list[int]
    source_kcore: dict[int, int] | None
    generated_kcore: dict[int, int]

    def tables(self):
        def comp(c):
            if c is None:
                return ["absent", "absent"]
            return [len(c), c[0] / sum(c) if c else 0.0]

        shells = sorted(set(self.source_kcore or {}) | set(self.generated_kcore))
        return [
            ("divergence", ["metric", "value", "note"], [
                ["degree_kl_nats", f"{self.degree_kl:.6f}", "smoothed" if self.degree_kl_smoothed else "exact"],
                ["cc_by_degree_mae", f"{self.cc_mae:.6f}", f"mass-weighted, coverage={self.cc_coverage}"],
            ]),
            ("joint_degree_kl", ["probe_degree", "kl_nats"],
             [[d, "absent" if v is None else f"{v:.6f}"] for d, v in self.joint_degree_kl.items()]),
            ("components", ["graph", "count", "giant_fraction"],
             [["source", *comp(self.source_components)], ["generated", *comp(self.generated_components)]]),
            ("kcore", ["shell", "source", "generated"],
             [[k, "absent" if self.source_kcore is None else self.source_kcore.get(k, 0),
               self.generated_kcore.get(k, 0)] for k in shells]),
        ]

    def to_tsv(self) -> str:
        return format_tables(self.tables())


def compare(source: Graph | GraphModel, generated: Graph, degrees_probe=DEFAULT_PROBES,
            coverage: float = DEFAULT_COVERAGE) -> ComparisonReport:
    """Compare a generated graph against a source graph or model.

    With a model as source, per-degree CC comes from bin midpoints and the
    joint-degree, component and k-core rows are reported as absent.
    """
    gen_deg = degree_distribution(generated)
    gen_cc = avg_cc_by_degree(generated)
    if isinstance(source, GraphModel):
        src_deg = {d: c for d, c in source.degree_hist.items() if c > 0}
        src_cc = expected_cc_by_degree(source)
        joint = {d: None for d in degrees_probe}
        src_comp = src_core = None
    else:
        src_deg = degree_distribution(source)
        src_cc = avg_cc_by_degree(source)
        joint = {}
        for d in degrees_probe:
            p = joint_degree_distribution(source, d)
            q = joint_degree_distribution(generated, d)
            joint[d] = kl_divergence(p, q) if p and q else None
        src_comp = connected_components(source)
        src_core = kcore_decomposition(source)
    return ComparisonReport(
        degree_kl=kl_divergence(src_deg, gen_deg),
        degree_kl_smoothed=kl_needs_smoothing(src_deg, gen_deg),
        cc_mae=cc_mae(src_cc, gen_cc, src_deg, coverage),
        cc_coverage=coverage,
        joint_degree_kl=joint,
        source_components=src_comp,
        generated_components=connected_components(generated),
        source_kcore=src_core,
        generated_kcore=kcore_decomposition(generated),
    )


def intra_community_fraction(g: Graph, community: np.ndarray) -> float:
    e = g.edge_array()
    if len(e) == 0:
        return math.nan
    return float(np.mean(community[e[:, 0]] == community[e[:, 1]]))
