"""Memory-bounded generation through super-communities.

Targets are split into equal communities.  Each community is generated on
its own against the intra-community share of every vertex's degree and
spilled to disk; the remaining share is then filled with inter-community
edges using only per-vertex stubs (community, residual, target degree).
"""

from __future__ import annotations

import heapq
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .edgegen import STUB_TAGS, GenerationConfig, GenerationState, build_from_targets, interconnect, resolve_threads
from .graph import Graph, VERTICES_HEADER, format_edge_lines
from .model import GraphModel, Targets, assign_targets

MANIFEST_HEADER = "# synthgraph-spill v1"
STUB_DOMAIN = 1 << 20


class SpillError(OSError):
    pass


@dataclass(frozen=True)
class ShardedPlan:
    sizes: tuple[int, ...]
    intra_fraction: float = 1.0

    @property
    def n_out(self) -> int:
        return sum(self.sizes)

    @property
    def starts(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.sizes)[:-1]]).astype(np.int64)

    def community_of(self) -> np.ndarray:
        return np.repeat(np.arange(len(self.sizes), dtype=np.int64), self.sizes)


def plan_shards(n_out: int, num_communities: int = 1, intra_fraction: float = 1.0) -> ShardedPlan:
    """Equal-size partition; the remainder goes to the first communities."""
    if num_communities < 1:
        raise ValueError("num_communities must be >= 1")
    if not 0.0 < intra_fraction <= 1.0:
        raise ValueError("intra_fraction must be in (0, 1]")
    if n_out < num_communities:
        raise ValueError("n_out must be >= num_communities")
    q, r = divmod(n_out, num_communities)
    return ShardedPlan(tuple(q + (k < r) for k in range(num_communities)), intra_fraction)


def split_degrees(degree, intra_fraction: float) -> np.ndarray:
    """Intra-community share of each degree.

    Rounds the running total ``f * cumsum(d)`` rather than each vertex on its
    own, so per-vertex values stay within one of ``f * d`` while the overall
    intra share is exact.
    """
    d = np.asarray(degree, dtype=np.int64)
    if intra_fraction >= 1.0:
        return d.copy()
    cum = np.floor(np.cumsum(d) * intra_fraction + 0.5).astype(np.int64)
    intra = np.diff(np.concatenate([[0], cum]))
    return np.clip(intra, 0, d)


class ResidencyMeter:
    """Counts vertices currently held in memory and remembers the peak."""

    def __init__(self):
        self.current = 0
        self.peak = 0

    def load(self, n: int) -> None:
        self.current += n
        self.peak = max(self.peak, self.current)

    def release(self, n: int) -> None:
        self.current -= n


def _write(path: Path, text: str) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as e:
        raise SpillError(f"cannot write spill file {path}: {e}") from e


def _read_edges(path: Path) -> Iterator[tuple[int, int]]:
    try:
        with open(path) as fh:
            for line in fh:
                if line.startswith("#") or not line.strip():
                    continue
                u, v = line.split()
                yield int(u), int(v)
    except OSError as e:
        raise SpillError(f"cannot read spill file {path}: {e}") from e


def write_stubs(path: Path, community, residual, target) -> None:
    rows = (f"{i}\t{c}\t{r}\t{t}" for i, (c, r, t) in enumerate(zip(community, residual, target)))
    _write(path, "id\tcommunity\tresidual\ttarget\n" + "\n".join(rows) + "\n")


def read_stubs(path: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    try:
        data = np.loadtxt(path, dtype=np.int64, skiprows=1, ndmin=2)
    except (OSError, ValueError) as e:
        raise SpillError(f"cannot read stub table {path}: {e}") from e
    if data.size and not np.array_equal(data[:, 0], np.arange(len(data))):
        raise SpillError(f"{path}: stub ids are not dense")
    return data[:, 1], data[:, 2], data[:, 3]


def community_targets(targets: Targets, intra: np.ndarray, lo: int, hi: int) -> Targets:
    """Targets of one community.

    The degree is the intra share.  The CC target is rescaled so the vertex
    still aims for the triangle count implied by its full degree and CC
    (``c * d * (d - 1)`` is kept, capped at CC 1): triangles are built
    inside communities only.
    """
    full = targets.degree[lo:hi]
    deg = np.minimum(intra[lo:hi], max(hi - lo - 1, 0))
    ce = targets.ce[lo:hi]
    room = (deg * (deg - 1)).astype(np.float64)
    cc = np.divide(ce, room, out=np.zeros(len(deg)), where=room > 0)
    cc = np.where(deg == full, targets.cc[lo:hi], np.minimum(cc, 1.0))
    return Targets(deg, cc)


def generate_sharded(model: GraphModel, n_out: int, plan: ShardedPlan, cfg: GenerationConfig,
                     spill_dir: str | os.PathLike | None = None, threads: int | None = None,
                     meter: ResidencyMeter | None = None, out_path: str | os.PathLike | None = None,
                     ) -> Graph | None:
    """Generate community by community, then interconnect over stubs.

    Returns the merged graph, or streams it to ``out_path`` (canonical edge
    list) and returns None.
    """
    if plan.n_out != n_out:
        raise ValueError(f"plan covers {plan.n_out} vertices, expected {n_out}")
    meter = meter or ResidencyMeter()
    threads = resolve_threads(threads)
    if spill_dir is None:
        with tempfile.TemporaryDirectory(prefix="synthgraph-") as tmp:
            return generate_sharded(model, n_out, plan, cfg, tmp, threads, meter, out_path)
    spill = Path(spill_dir)
    spill.mkdir(parents=True, exist_ok=True)

    targets = assign_targets(model, n_out, cfg.seed)
    intra = split_degrees(targets.degree, plan.intra_fraction)
    community = plan.community_of()
    meter.load(n_out)  # stub arrays: community, residual, target
    residual = np.zeros(n_out, dtype=np.int64)
    for k, (lo, size) in enumerate(zip(plan.starts.tolist(), plan.sizes)):
        hi = lo + size
        local = community_targets(targets, intra, lo, hi)
        meter.load(size)
        state = build_from_targets(local, cfg, threads, domain=k)
        e = state.graph.edge_array() + lo
        _write(spill / f"community_{k}.edges", format_edge_lines(e))
        # inter share only; unmet intra degree is not moved across communities
        residual[lo:hi] = targets.degree[lo:hi] - local.degree
        del state, local
        meter.release(size)
    write_stubs(spill / "stubs.tsv", community, residual, targets.degree)
    _write(spill / "manifest.txt", "\n".join([
        MANIFEST_HEADER,
        f"seed\t{cfg.seed}",
        f"vertices\t{n_out}",
        f"intra_fraction\t{plan.intra_fraction!r}",
        *(f"community\t{k}\t{s}\tdomain={k}" for k, s in enumerate(plan.sizes)),
    ]) + "\n")

    comm, res, tgt = read_stubs(spill / "stubs.tsv")
    stub_targets = Targets(tgt, np.zeros(n_out))
    state = GenerationState(Graph(n_out), stub_targets, res.copy(), res.copy(), domain=STUB_DOMAIN,
                            community=comm, tags=STUB_TAGS, threads=threads)
    if len(plan.sizes) > 1:
        interconnect(state, cfg)
    _write(spill / "inter.edges", format_edge_lines(state.graph.edge_array()))
    del state

    streams = [_read_edges(spill / f"community_{k}.edges") for k in range(len(plan.sizes))]
    streams.append(_read_edges(spill / "inter.edges"))
    merged = heapq.merge(*streams)
    if out_path is not None:
        _stream_out(merged, n_out, out_path)
        meter.release(n_out)
        return None
    g = Graph.from_edges(n_out, np.array(list(merged), dtype=np.int64).reshape(-1, 2))
    meter.release(n_out)
    return g


def _stream_out(edges: Iterator[tuple[int, int]], n: int, path) -> None:
    # the vertex header precedes the edges but isolation is only known after
    # the merge, so the edges go through a temporary file
    tmp = Path(str(path) + ".part")
    deg = np.zeros(n, dtype=np.int64)
    with open(tmp, "w") as fh:
        for u, v in edges:
            deg[u] += 1
            deg[v] += 1
            fh.write(f"{u} {v}\n")
    with open(path, "w") as out:
        if np.any(deg == 0):
            out.write(f"{VERTICES_HEADER} {n}\n")
        with open(tmp) as fh:
            for line in fh:
                out.write(line)
    os.unlink(tmp)
