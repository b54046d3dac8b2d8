"""Empirical degree / clustering model and per-vertex target sampling."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import _rng
from .graph import Graph

log = logging.getLogger(__name__)

DEFAULT_CC_BINS = 100
MODEL_HEADER = "# synthgraph-model v1"


class ModelFormatError(ValueError):
    pass


def local_cc(g: Graph, v: int) -> float:
    """Local clustering coefficient of ``v``; 0 when its degree is below 2."""
    nb = g.adj[v]
    d = len(nb)
    if d < 2:
        return 0.0
    nbset = set(nb)
    links = 0
    for u in nb:
        # each neighbor-neighbor edge is seen from both ends
        links += len(nbset.intersection(g.adj[u]))
    return links / (d * (d - 1))


def triangle_counts(g: Graph) -> np.ndarray:
    """Number of triangles through each vertex."""
    a = g.to_csr()
    if a.nnz == 0:
        return np.zeros(g.vertex_count, dtype=np.int64)
    closed = (a @ a).multiply(a)
    t = np.asarray(closed.sum(axis=1)).ravel()
    return np.rint(t).astype(np.int64) // 2


def local_clustering(g: Graph) -> np.ndarray:
    """Local clustering coefficients of all vertices."""
    deg = g.degrees()
    tri = triangle_counts(g)
    cc = np.zeros(len(deg), dtype=np.float64)
    ok = deg >= 2
    cc[ok] = 2 * tri[ok] / (deg[ok] * (deg[ok] - 1))
    return cc


def cc_bin(cc, bins: int):
    """Bin index of a clustering value in ``bins`` uniform bins over [0, 1]."""
    return np.minimum((np.asarray(cc) * bins).astype(np.int64), bins - 1)


@dataclass
class GraphModel:
    """Degree histogram plus per-degree histogram of clustering coefficients."""

    degree_hist: dict[int, int] = field(default_factory=dict)
    cc_hist: dict[int, list[int]] = field(default_factory=dict)
    cc_bins: int = DEFAULT_CC_BINS
    source_vertex_count: int = 0
    source_edge_count: int = 0

    @property
    def total_mass(self) -> int:
        return sum(self.degree_hist.values())

    def cc_degree_for(self, d: int) -> int | None:
        """Degree whose CC histogram is used for ``d`` (nearest, ties to lower)."""
        if sum(self.cc_hist.get(d, ())) > 0:
            return d
        best = None
        for k, counts in self.cc_hist.items():
            if sum(counts) <= 0:
                continue
            if best is None or (abs(k - d), k) < (abs(best - d), best):
                best = k
        return best


def extract_model(g: Graph, cc_bins: int = DEFAULT_CC_BINS) -> GraphModel:
    if cc_bins < 1:
        raise ValueError("cc_bins must be >= 1")
    deg = g.degrees()
    cc = local_clustering(g)
    degree_hist = {int(d): int(c) for d, c in zip(*np.unique(deg, return_counts=True))}
    cc_hist: dict[int, list[int]] = {}
    mask = deg >= 2
    if mask.any():
        b = cc_bin(cc[mask], cc_bins)
        dm = deg[mask]
        for d in np.unique(dm):
            cc_hist[int(d)] = np.bincount(b[dm == d], minlength=cc_bins).tolist()
    return GraphModel(degree_hist, cc_hist, cc_bins, g.vertex_count, g.edge_count)


@dataclass(frozen=True)
class VertexTarget:
    id: int
    degree: int
    cc: float
    ce: float


class Targets:
    """Per-vertex targets stored column-wise.

    ``ce`` is ``cc * degree * (degree - 1)`` and is zero for degrees below 2.
    Iterating yields :class:`VertexTarget` records.
    """

    def __init__(self, degree, cc):
        self.degree = np.asarray(degree, dtype=np.int64)
        self.cc = np.asarray(cc, dtype=np.float64)
        if self.degree.shape != self.cc.shape:
            raise ValueError("degree and cc lengths differ")
        self.cc = np.where(self.degree < 2, 0.0, self.cc)
        self.ce = self.cc * self.degree * (self.degree - 1)

    @classmethod
    def from_records(cls, records: Sequence[VertexTarget]) -> "Targets":
        recs = sorted(records, key=lambda r: r.id)
        if [r.id for r in recs] != list(range(len(recs))):
            raise ValueError("target ids must be dense 0..n-1")
        return cls([r.degree for r in recs], [r.cc for r in recs])

    def __len__(self) -> int:
        return len(self.degree)

    def __getitem__(self, i: int) -> VertexTarget:
        return VertexTarget(i, int(self.degree[i]), float(self.cc[i]), float(self.ce[i]))

    def __iter__(self) -> Iterator[VertexTarget]:
        return (self[i] for i in range(len(self)))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Targets)
            and np.array_equal(self.degree, other.degree)
            and np.array_equal(self.cc, other.cc)
        )


def as_targets(targets) -> Targets:
    return targets if isinstance(targets, Targets) else Targets.from_records(list(targets))


def sample_cc(model: GraphModel, degree: np.ndarray, ids: np.ndarray, seed: int,
              tags=(_rng.TAG_CC_BIN, _rng.TAG_CC_VALUE), domain: int = 0) -> np.ndarray:
    """Draw a clustering target for each vertex from its degree's CC histogram.

    A bin is chosen proportionally to its count, then the value is uniform
    inside the bin.  Degrees without a histogram borrow the nearest one.
    """
    cc = np.zeros(len(degree), dtype=np.float64)
    need = degree >= 2
    if not need.any():
        return cc
    if not any(sum(c) > 0 for c in model.cc_hist.values()):
        return cc
    bins = model.cc_bins
    key_bin = _rng.stream_key(seed, tags[0], domain)
    key_val = _rng.stream_key(seed, tags[1], domain)
    for d in np.unique(degree[need]):
        sel = np.flatnonzero(degree == d)
        src = model.cc_degree_for(int(d))
        counts = np.asarray(model.cc_hist[src], dtype=np.float64)
        cum = np.cumsum(counts)
        u = _rng.uniform(key_bin, ids[sel])
        b = np.searchsorted(cum, u * cum[-1], side="right")
        b = np.minimum(b, bins - 1)
        w = _rng.uniform(key_val, ids[sel])
        cc[sel] = np.minimum((b + w) / bins, 1.0)
    return cc


def assign_targets(model: GraphModel, n_out: int, seed: int) -> Targets:
    """Draw a target degree and clustering coefficient for each output vertex.

    Vertex ``i`` uses its own random substream, so the result does not depend
    on evaluation order.  Degrees that cannot fit in ``n_out`` vertices are
    clamped to ``n_out - 1``.
    """
    if n_out < 1:
        raise ValueError("n_out must be >= 1")
    total = model.total_mass
    if total <= 0:
        raise ValueError("model has no degree mass")
    degs = np.array(sorted(model.degree_hist), dtype=np.int64)
    cum = np.cumsum([model.degree_hist[d] for d in degs]).astype(np.float64)
    ids = np.arange(n_out, dtype=np.int64)
    u = _rng.uniform(_rng.stream_key(seed, _rng.TAG_DEGREE, 0), ids)
    degree = degs[np.searchsorted(cum, u * total, side="right")]
    over = degree >= n_out
    if over.any():
        log.warning("clamping %d target degrees to %d", int(over.sum()), n_out - 1)
        degree = np.where(over, n_out - 1, degree)
    return Targets(degree, sample_cc(model, degree, ids, seed))


def save_model(m: GraphModel, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(f"{MODEL_HEADER}\n")
        fh.write(f"# cc_bins {m.cc_bins}\n")
        fh.write(f"# vertices {m.source_vertex_count}\n")
        fh.write(f"# edges {m.source_edge_count}\n")
        for d in sorted(m.degree_hist):
            fh.write(f"{d} {m.degree_hist[d]}\n")
        for d in sorted(m.cc_hist):
            for b, c in enumerate(m.cc_hist[d]):
                if c:
                    fh.write(f"{d} {b} {c}\n")


def load_model(path: str | os.PathLike) -> GraphModel:
    meta: dict[str, int] = {}
    deg_rows: dict[int, int] = {}
    cc_rows: list[tuple[int, int, int, int]] = []
    with open(path) as fh:
        first = fh.readline().rstrip("\n")
        if first != MODEL_HEADER:
            raise ModelFormatError(f"{path}:1: unsupported model header {first!r}")
        for lineno, line in enumerate(fh, 2):
            s = line.strip()
            if not s:
                continue
            tok = s.split()
            try:
                if tok[0] == "#":
                    if len(tok) != 3 or tok[1] not in ("cc_bins", "vertices", "edges"):
                        raise ModelFormatError(f"{path}:{lineno}: unknown header {s!r}")
                    meta[tok[1]] = int(tok[2])
                    continue
                vals = [int(t) for t in tok]
            except ValueError:
                raise ModelFormatError(f"{path}:{lineno}: malformed row {s!r}") from None
            if any(v < 0 for v in vals):
                raise ModelFormatError(f"{path}:{lineno}: negative value")
            if len(vals) == 2:
                deg_rows[vals[0]] = vals[1]
            elif len(vals) == 3:
                cc_rows.append((lineno, *vals))
            else:
                raise ModelFormatError(f"{path}:{lineno}: malformed row {s!r}")
    if "cc_bins" not in meta or meta["cc_bins"] < 1:
        raise ModelFormatError(f"{path}: missing cc_bins header")
    bins = meta["cc_bins"]
    cc_hist: dict[int, list[int]] = {}
    for lineno, d, b, c in cc_rows:
        if b >= bins:
            raise ModelFormatError(f"{path}:{lineno}: bin index {b} >= {bins}")
        cc_hist.setdefault(d, [0] * bins)[b] = c
    return GraphModel(deg_rows, cc_hist, bins, meta.get("vertices", 0), meta.get("edges", 0))


def expected_cc_by_degree(m: GraphModel) -> dict[int, float]:
    """Mean CC per degree implied by the binned histograms (bin midpoints)."""
    out = {}
    for d, counts in m.cc_hist.items():
        tot = sum(counts)
        if tot:
            out[d] = sum((b + 0.5) / m.cc_bins * c for b, c in enumerate(counts)) / tot
    return out
