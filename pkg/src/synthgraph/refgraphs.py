"""Reference source graphs: Erdős–Rényi, Watts–Strogatz and a two-class
configuration model.  All are deterministic per seed."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph


@dataclass(frozen=True)
class RefGraphSpec:
    kind: str
    params: dict = field(default_factory=dict)

    KINDS = ("erdos-renyi", "watts-strogatz", "two-class")

    def build(self, seed: int = 0) -> Graph:
        if self.kind == "erdos-renyi":
            return erdos_renyi(seed=seed, **self.params)
        if self.kind == "watts-strogatz":
            return watts_strogatz(seed=seed, **self.params)
        if self.kind == "two-class":
            return two_class(seed=seed, **self.params)
        raise ValueError(f"unknown kind {self.kind!r}; expected one of {self.KINDS}")


def _decode_pairs(idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Invert the row-major numbering of pairs ``(i, j)``, ``i < j``."""
    def row_start(i):
        return i * (2 * n - i - 1) // 2

    b = 2 * n - 1
    i = np.floor((b - np.sqrt(b * b - 8.0 * idx)) / 2).astype(np.int64)
    i = np.clip(i, 0, n - 2)
    # float sqrt can be off by one near row boundaries
    i -= row_start(i) > idx
    i += row_start(i + 1) <= idx
    j = idx - row_start(i) + i + 1
    return i, j


def erdos_renyi(n: int, p: float, seed: int = 0) -> Graph:
    """G(n, p): a Binomial(n(n-1)/2, p) edge count, then a uniform edge subset."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    total = n * (n - 1) // 2
    if total == 0 or p == 0.0:
        return Graph(n)
    rng = np.random.default_rng(seed)
    if p == 1.0:
        idx = np.arange(total, dtype=np.int64)
    else:
        m = int(rng.binomial(total, p))
        idx = np.sort(rng.choice(total, size=m, replace=False)).astype(np.int64)
    i, j = _decode_pairs(idx, n)
    return Graph.from_edges(n, np.column_stack([i, j]))


def ring_lattice(n: int, k: int) -> Graph:
    ids = np.arange(n, dtype=np.int64)
    e = [np.column_stack([ids, (ids + j) % n]) for j in range(1, k // 2 + 1)]
    return Graph.from_edges(n, np.concatenate(e) if e else np.empty((0, 2), dtype=np.int64))


def watts_strogatz(n: int, k: int, beta: float, seed: int = 0) -> Graph:
    """Ring lattice with ``k`` neighbours, each lattice edge rewired w.p. ``beta``.

    The far endpoint of a rewired edge is replaced by a uniform vertex that is
    neither the near endpoint nor already adjacent to it.
    """
    if k % 2 or not 0 <= k < n:
        raise ValueError("k must be even and 0 <= k < n")
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must be in [0, 1]")
    rng = np.random.default_rng(seed)
    adj = [set() for _ in range(n)]
    for j in range(1, k // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            adj[u].add(v)
            adj[v].add(u)
    for j in range(1, k // 2 + 1):
        flips = rng.random(n) < beta
        for u in np.flatnonzero(flips).tolist():
            v = (u + j) % n
            if v not in adj[u] or len(adj[u]) >= n - 1:
                continue
            w = int(rng.integers(n))
            while w == u or w in adj[u]:
                w = int(rng.integers(n))
            adj[u].discard(v)
            adj[v].discard(u)
            adj[u].add(w)
            adj[w].add(u)
    g = Graph(n)
    g.adj = [sorted(a) for a in adj]
    g._edge_count = sum(len(a) for a in adj) // 2
    return g


def _pair_stubs(stubs: np.ndarray, other: np.ndarray | None, n: int, existing: set,
                rng: np.random.Generator, rounds: int) -> list[np.ndarray]:
    """Randomly pair stubs (within ``stubs`` or across to ``other``).

    Self-loops and duplicates are rejected and their stubs re-paired for up
    to ``rounds`` rounds; whatever is still unpaired is dropped.
    """
    out = []
    a, b = stubs, other
    for _ in range(rounds):
        if b is None:
            a = rng.permutation(a)
            if len(a) % 2:
                a = a[:-1]
            u, v = a[0::2], a[1::2]
        else:
            m = min(len(a), len(b))
            a, b = rng.permutation(a)[:m], rng.permutation(b)[:m]
            u, v = a, b
        if len(u) == 0:
            break
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        key = lo * n + hi
        ok = lo != hi
        _, first = np.unique(key, return_index=True)
        uniq = np.zeros(len(key), dtype=bool)
        uniq[first] = True
        ok &= uniq
        if existing:
            ok &= ~np.isin(key, np.fromiter(existing, dtype=np.int64, count=len(existing)))
        existing.update(key[ok].tolist())
        out.append(np.column_stack([lo[ok], hi[ok]]))
        bad = ~ok
        if not bad.any():
            break
        if b is None:
            a = np.concatenate([u[bad], v[bad]])
        else:
            a, b = u[bad], v[bad]
    return out


def two_class(n: int, d_low: int, d_high: int, mix: float, seed: int = 0,
              high_fraction: float = 0.01, rounds: int = 100) -> Graph:
    """Configuration model with two degree classes.

    The first ``round(n * high_fraction)`` vertices form the high class.
    ``mix`` is the fraction of the smaller class's stubs that are paired
    across classes (the same number is drawn from the other class); the
    remaining stubs pair within their own class.
    """
    if not 0.0 <= mix <= 1.0:
        raise ValueError("mix must be in [0, 1]")
    if not 0.0 <= high_fraction <= 1.0:
        raise ValueError("high_fraction must be in [0, 1]")
    if min(d_low, d_high) < 0 or max(d_low, d_high) >= max(n, 1):
        raise ValueError("degrees must be in [0, n)")
    rng = np.random.default_rng(seed)
    n_high = int(round(n * high_fraction))
    high_stubs = rng.permutation(np.repeat(np.arange(n_high, dtype=np.int64), d_high))
    low_stubs = rng.permutation(np.repeat(np.arange(n_high, n, dtype=np.int64), d_low))
    x = int(round(mix * min(len(high_stubs), len(low_stubs))))
    existing: set[int] = set()
    parts = _pair_stubs(high_stubs[:x], low_stubs[:x], n, existing, rng, rounds)
    parts += _pair_stubs(high_stubs[x:], None, n, existing, rng, rounds)
    parts += _pair_stubs(low_stubs[x:], None, n, existing, rng, rounds)
    edges = np.concatenate(parts) if parts else np.empty((0, 2), dtype=np.int64)
    return Graph.from_edges(n, edges)


def class_of(n: int, high_fraction: float = 0.01) -> np.ndarray:
    """1 for high-class vertices of :func:`two_class`, 0 otherwise."""
    c = np.zeros(n, dtype=np.int64)
    c[: int(round(n * high_fraction))] = 1
    return c
