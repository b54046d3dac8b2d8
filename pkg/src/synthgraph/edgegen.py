"""Edge creation: bucket wiring and the alternating interconnection passes.

All random draws come from counter-based streams keyed by
``(seed, phase, domain, iteration, entity)``; workers only *propose* edges
and the calling thread applies them in bucket/group order, so the output is
the same for any thread count.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _rng
from .bucketing import BucketPlan, plan_buckets
from .graph import Graph
from .model import GraphModel, Targets, as_targets, assign_targets

log = logging.getLogger(__name__)

NORMAL_TAGS = (_rng.TAG_CROSS, _rng.TAG_SHUFFLE, _rng.TAG_GROUP_PAIR)
STUB_TAGS = (_rng.TAG_STUB_CROSS, _rng.TAG_STUB_SHUFFLE, _rng.TAG_STUB_GROUP_PAIR)


class InvariantViolation(RuntimeError):
    """Raised when a generation phase breaks the degree bookkeeping."""


@dataclass(frozen=True)
class GenerationConfig:
    seed: int = 0
    max_iters: int = 20
    satisfied_fraction_stop: float = 0.999
    cross_pass_per_iter: int = 1
    # "unsatisfied" draws cross-pass candidates among vertices that still
    # need edges; a different (still deterministic) stream layout
    cross_candidates: str = "all"

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0 < self.satisfied_fraction_stop <= 1:
            raise ValueError("satisfied_fraction_stop must be in (0, 1]")
        if self.cross_pass_per_iter < 0:
            raise ValueError("cross_pass_per_iter must be >= 0")
        if self.cross_candidates not in ("all", "unsatisfied"):
            raise ValueError("cross_candidates must be 'all' or 'unsatisfied'")


@dataclass
class GenerationState:
    """Graph under construction plus residual-degree bookkeeping.

    ``capacity`` is the number of edges each vertex may still receive in
    ``graph`` in total; it equals the target degree except when ``graph``
    holds only part of a vertex's edges (sharded interconnection).
    """

    graph: Graph
    targets: Targets
    residual: np.ndarray
    capacity: np.ndarray
    iter: int = 0
    domain: int = 0
    community: np.ndarray | None = None
    tags: tuple[int, int, int] = NORMAL_TAGS
    threads: int = 1
    history: list[tuple[str, int, int]] = field(default_factory=list)

    @classmethod
    def start(cls, targets, graph: Graph | None = None, capacity=None, **kw) -> "GenerationState":
        t = as_targets(targets)
        g = graph if graph is not None else Graph(len(t))
        cap = t.degree.copy() if capacity is None else np.asarray(capacity, dtype=np.int64)
        return cls(g, t, cap - g.degrees(), cap, **kw)

    @property
    def n_group(self) -> int:
        return max(2, self.graph.vertex_count >> self.iter)

    def satisfied_fraction(self) -> float:
        n = len(self.residual)
        return 1.0 if n == 0 else float(np.count_nonzero(self.residual == 0)) / n

    def total_residual(self) -> int:
        return int(self.residual.sum())

    def check(self, phase: str = "") -> None:
        deg = self.graph.degrees()
        if np.any(self.residual != self.capacity - deg):
            raise InvariantViolation(f"residual bookkeeping out of sync after {phase}")
        if np.any(self.residual < 0):
            v = int(np.flatnonzero(self.residual < 0)[0])
            raise InvariantViolation(f"vertex {v} exceeds its target degree after {phase}")
        self.history.append((phase, self.iter, self.total_residual()))


def _pool_map(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _chunks(seq, parts: int):
    k = max(1, -(-len(seq) // max(1, parts)))
    return [seq[i:i + k] for i in range(0, len(seq), k)]


@lru_cache(maxsize=256)
def _pairs(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    iu, ju = np.triu_indices(n, 1)
    return iu, ju, iu.astype(np.int64) * n + ju


def bucket_edge_prob(b: BucketPlan, targets: Targets) -> float:
    """Cube root of the clustering target of the lowest-degree member."""
    m = np.asarray(b.members, dtype=np.int64)
    k = m[np.lexsort((m, targets.degree[m]))[0]]
    return float(np.cbrt(targets.cc[k]))


def _bucket_pairs(b: BucketPlan, targets: Targets, key: int) -> tuple[np.ndarray, np.ndarray]:
    m = np.asarray(b.members, dtype=np.int64)
    n = len(m)
    if n < 2:
        return m[:0], m[:0]
    p = bucket_edge_prob(b, targets)
    b.edge_prob = p
    iu, ju, counter = _pairs(n)
    hit = _rng.uniform(key, b.bucket_id, counter) < p
    return m[iu[hit]], m[ju[hit]]


def intra_bucket_edges(b: BucketPlan, targets, seed: int, domain: int = 0) -> set[tuple[int, int]]:
    """Erdős–Rényi edges inside one bucket, ``(u, v)`` with ``u < v``."""
    t = as_targets(targets)
    u, v = _bucket_pairs(b, t, _rng.stream_key(seed, _rng.TAG_INTRA, domain))
    return {(min(a, c), max(a, c)) for a, c in zip(u.tolist(), v.tolist())}


def wire_buckets(state: GenerationState, buckets: list[BucketPlan], seed: int) -> None:
    key = _rng.stream_key(seed, _rng.TAG_INTRA, state.domain)

    def work(chunk):
        return [_bucket_pairs(b, state.targets, key) for b in chunk]

    g = state.graph
    res = state.residual
    for part in _pool_map(work, _chunks(buckets, state.threads * 4), state.threads):
        for u, v in part:
            for a, c in zip(u.tolist(), v.tolist()):
                g.add_edge(a, c)
            np.subtract.at(res, u, 1)
            np.subtract.at(res, v, 1)


def cross_bucket_pass(state: GenerationState, seed: int, pass_index: int = 0,
                      candidates: str = "all") -> GenerationState:
    """One attempt per unsatisfied vertex to link with a uniformly random vertex.

    Vertices are visited in ascending id order; the edge is added only if
    the candidate is another vertex that still has residual degree (and, in
    sharded mode, lives in a different community) and the edge is new.
    """
    active = np.flatnonzero(state.residual > 0)
    if len(active) == 0:
        return state
    n = state.graph.vertex_count
    key = _rng.stream_key(seed, state.tags[0], state.domain, state.iter, pass_index)
    if candidates == "unsatisfied":
        cand = active[_rng.below(key, len(active), active)]
    else:
        cand = _rng.below(key, n, active)
    res = state.residual.tolist()
    comm = state.community.tolist() if state.community is not None else None
    g = state.graph
    for i, j in zip(active.tolist(), cand.tolist()):
        if res[i] <= 0 or i == j or res[j] <= 0:
            continue
        if comm is not None and comm[i] == comm[j]:
            continue
        if g.add_edge(i, j):
            res[i] -= 1
            res[j] -= 1
    state.residual[:] = res
    return state


def _group_edges(members: np.ndarray, residual: np.ndarray, degree: np.ndarray,
                 graph: Graph, community, key: int, group_index: int,
                 similarity_bias: bool) -> tuple[list[tuple[int, int]], np.ndarray]:
    """Link candidate pairs inside one group.

    Row ``a`` considers every later position ``b > a`` exactly once, starting
    from a random rotation so that neighbouring rows do not pick the same
    partners (which would close triangles).  Works on a private copy of the
    members' residuals and only reads the graph, so groups can be evaluated
    concurrently.
    """
    n = len(members)
    r = residual[members].copy()
    live = r > 0
    d = degree[members].astype(np.float64)
    comm = community[members] if community is not None else None
    added: list[tuple[int, int]] = []
    mlist = members.tolist()
    rows = np.arange(n, dtype=np.int64)
    # the diagonal counter a*n + a is never used by a pair draw
    offsets = (_rng.uniform(key, group_index, rows * n + rows) * (n - 1 - rows)).astype(np.int64)
    for a in range(n - 1):
        if r[a] <= 0:
            continue
        i = mlist[a]
        span = n - 1 - a
        t, width = 0, 32
        while r[a] > 0 and t < span:
            stop = min(span, t + width)
            pos = a + 1 + (offsets[a] + np.arange(t, stop)) % span
            t, width = stop, width * 2
            pos = pos[live[pos]]
            if comm is not None and len(pos):
                pos = pos[comm[pos] != comm[a]]
            if len(pos) == 0:
                continue
            if similarity_bias:
                p = np.abs(d[a] - d[pos]) / (d[a] + d[pos])
                u = _rng.uniform_pos(key, group_index, a * n + pos)
                pos = pos[u > p]
            for b in pos.tolist():
                j = mlist[b]
                if graph.has_edge(i, j):
                    continue
                added.append((i, j) if i < j else (j, i))
                r[a] -= 1
                r[b] -= 1
                if r[b] == 0:
                    live[b] = False
                if r[a] == 0:
                    live[a] = False
                    break
    return added, r


def high_degree_pass(state: GenerationState, seed: int, similarity_bias: bool = True,
                     record: list | None = None) -> GenerationState:
    """Shuffle unsatisfied vertices into groups of ``n_group`` and link pairs.

    A pair with target degrees ``di, dj`` is linked when a uniform draw in
    (0, 1] exceeds ``|di - dj| / (di + dj)``, favouring similar degrees.
    Residuals are re-checked before each link.  ``similarity_bias=False``
    accepts every pair (control mode).
    """
    if state.iter < 1:
        raise ValueError("high_degree_pass needs state.iter >= 1")
    active = np.flatnonzero(state.residual > 0)
    if len(active) < 2:
        return state
    shuffle_key = _rng.stream_key(seed, state.tags[1], state.domain, state.iter)
    order = active[np.argsort(_rng.bits(shuffle_key, active), kind="stable")]
    size = state.n_group
    deg = state.targets.degree
    # rows are scanned highest target degree first so that low-degree
    # vertices do not use up each other's residual before the hubs get a turn
    groups = [g[np.argsort(-deg[g], kind="stable")]
              for g in (order[s:s + size] for s in range(0, len(order), size))]
    pair_key = _rng.stream_key(seed, state.tags[2], state.domain, state.iter)

    def work(item):
        gi, members = item
        return _group_edges(members, state.residual, state.targets.degree, state.graph,
                            state.community, pair_key, gi, similarity_bias)

    results = _pool_map(work, list(enumerate(groups)), state.threads)
    g = state.graph
    for members, (added, r) in zip(groups, results):
        for u, v in added:
            if not g.add_edge(u, v):
                raise InvariantViolation(f"group pass proposed existing edge {(u, v)}")
        state.residual[members] = r
        if record is not None:
            record.extend(added)
    return state


def interconnect(state: GenerationState, cfg: GenerationConfig, seed: int | None = None) -> GenerationState:
    """Alternate cross-bucket and high-degree passes until the stop rule."""
    seed = cfg.seed if seed is None else seed
    for it in range(1, cfg.max_iters + 1):
        if state.satisfied_fraction() >= cfg.satisfied_fraction_stop:
            break
        state.iter = it
        for k in range(cfg.cross_pass_per_iter):
            cross_bucket_pass(state, seed, k, cfg.cross_candidates)
            state.check("cross")
        high_degree_pass(state, seed)
        state.check("high-degree")
    return state


def build_from_targets(targets, cfg: GenerationConfig, threads: int | None = None,
                       domain: int = 0) -> GenerationState:
    t = as_targets(targets)
    state = GenerationState.start(t, domain=domain, threads=resolve_threads(threads))
    buckets = plan_buckets(t) if len(t) else []
    wire_buckets(state, buckets, cfg.seed)
    state.check("buckets")
    return interconnect(state, cfg)


def build(model: GraphModel, n_out: int, cfg: GenerationConfig,
          threads: int | None = None) -> GenerationState:
    """Full pipeline, returning the final state (graph, targets, residuals)."""
    if n_out < 1:
        raise ValueError("n_out must be >= 1")
    targets = assign_targets(model, n_out, cfg.seed)
    return build_from_targets(targets, cfg, threads)


def generate(model: GraphModel, n_out: int, cfg: GenerationConfig | None = None,
             threads: int | None = None) -> Graph:
    return build(model, n_out, cfg or GenerationConfig(), threads).graph


def resolve_threads(threads: int | None) -> int:
    if threads is None or threads <= 0:
        return os.cpu_count() or 1
    return threads
