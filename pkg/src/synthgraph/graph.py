"""Undirected simple graph with sorted adjacency lists and edge-list I/O."""

from __future__ import annotations

import os
from bisect import bisect_left, insort
from typing import Iterable, Iterator

import numpy as np
import scipy.sparse as sp

VERTICES_HEADER = "# vertices"


class EdgeListError(ValueError):
    """Malformed edge-list file."""

    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


class Graph:
    """Undirected simple graph on dense vertex ids ``0..vertex_count-1``.

    Each adjacency list is kept sorted so membership tests are a bisection
    and serialization is canonical without an extra sort.
    """

    __slots__ = ("adj", "_edge_count")

    def __init__(self, vertex_count: int = 0):
        if vertex_count < 0:
            raise ValueError("vertex_count must be >= 0")
        self.adj: list[list[int]] = [[] for _ in range(vertex_count)]
        self._edge_count = 0

    @property
    def vertex_count(self) -> int:
        return len(self.adj)

    @property
    def edge_count(self) -> int:
        return self._edge_count

    def _check(self, v: int) -> None:
        if not 0 <= v < len(self.adj):
            raise IndexError(f"vertex {v} out of range [0, {len(self.adj)})")

    def has_edge(self, u: int, v: int) -> bool:
        a = self.adj[u]
        i = bisect_left(a, v)
        return i < len(a) and a[i] == v

    def add_edge(self, u: int, v: int) -> bool:
        """Insert ``{u, v}``; False (and no change) for self-loops and duplicates."""
        self._check(u)
        self._check(v)
        if u == v:
            return False
        a = self.adj[u]
        i = bisect_left(a, v)
        if i < len(a) and a[i] == v:
            return False
        a.insert(i, v)
        insort(self.adj[v], u)
        self._edge_count += 1
        return True

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.adj), dtype=np.int64, count=len(self.adj))

    def neighbors(self, v: int) -> list[int]:
        return self.adj[v]

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges ``(u, v)`` with ``u < v`` in ascending lexicographic order."""
        for u, a in enumerate(self.adj):
            for v in a[bisect_left(a, u + 1):]:
                yield u, v

    def edge_array(self) -> np.ndarray:
        """Canonical ``(m, 2)`` int64 array of edges, sorted."""
        deg = self.degrees()
        if deg.sum() == 0:
            return np.empty((0, 2), dtype=np.int64)
        src = np.repeat(np.arange(len(self.adj), dtype=np.int64), deg)
        dst = np.fromiter((v for a in self.adj for v in a), dtype=np.int64, count=int(deg.sum()))
        keep = src < dst
        return np.column_stack([src[keep], dst[keep]])

    def to_csr(self) -> sp.csr_matrix:
        n = len(self.adj)
        deg = self.degrees()
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        indices = np.fromiter((v for a in self.adj for v in a), dtype=np.int64, count=int(indptr[-1]))
        data = np.ones(len(indices), dtype=np.float64)
        return sp.csr_matrix((data, indices, indptr), shape=(n, n))

    def copy(self) -> "Graph":
        g = Graph(0)
        g.adj = [list(a) for a in self.adj]
        g._edge_count = self._edge_count
        return g

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.adj == other.adj

    def __repr__(self) -> str:
        return f"Graph(vertex_count={self.vertex_count}, edge_count={self.edge_count})"

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[tuple[int, int]] | np.ndarray) -> "Graph":
        """Bulk constructor; drops self-loops and duplicate edges."""
        arr = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64)
        g = cls(vertex_count)
        if arr.size == 0:
            return g
        arr = arr.reshape(-1, 2)
        if arr.min() < 0 or arr.max() >= vertex_count:
            raise IndexError("edge endpoint out of range")
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        keep = lo != hi
        keys = np.unique(lo[keep] * vertex_count + hi[keep])
        lo, hi = keys // vertex_count, keys % vertex_count
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        counts = np.bincount(src, minlength=vertex_count)
        bounds = np.cumsum(counts)[:-1]
        g.adj = [chunk.tolist() for chunk in np.split(dst, bounds)]
        g._edge_count = len(keys)
        return g


def check_invariants(g: Graph) -> None:
    """Full scan for self-loops, duplicates, asymmetry and unsorted lists."""
    total = 0
    for v, a in enumerate(g.adj):
        total += len(a)
        for i, u in enumerate(a):
            if u == v:
                raise AssertionError(f"self-loop at {v}")
            if i and a[i - 1] >= u:
                raise AssertionError(f"adjacency of {v} not strictly sorted")
            if not g.has_edge(u, v):
                raise AssertionError(f"asymmetric edge {v}->{u}")
    if total != 2 * g.edge_count:
        raise AssertionError("degree sum != 2 * edge_count")


def load_edge_list(path: str | os.PathLike) -> Graph:
    """Read a whitespace-separated edge list.

    Either orientation and repeated lines are accepted.  A ``# vertices N``
    header fixes the vertex count; without it, ids are remapped to a dense
    range in ascending order.
    """
    declared = None
    pairs: list[tuple[int, int]] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                if s.startswith(VERTICES_HEADER):
                    try:
                        declared = int(s[len(VERTICES_HEADER):])
                    except ValueError:
                        raise EdgeListError(path, lineno, f"bad vertex header {s!r}") from None
                    if declared < 0:
                        raise EdgeListError(path, lineno, "negative vertex count")
                continue
            tok = s.split()
            if len(tok) != 2:
                raise EdgeListError(path, lineno, f"expected 2 fields, got {len(tok)}")
            try:
                u, v = int(tok[0]), int(tok[1])
            except ValueError:
                raise EdgeListError(path, lineno, f"non-numeric token in {s!r}") from None
            if u < 0 or v < 0:
                raise EdgeListError(path, lineno, "negative vertex id")
            if declared is not None and (u >= declared or v >= declared):
                raise EdgeListError(path, lineno, f"vertex id exceeds declared count {declared}")
            pairs.append((u, v))
    arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    if declared is not None:
        return Graph.from_edges(declared, arr)
    if arr.size == 0:
        return Graph(0)
    ids, inverse = np.unique(arr, return_inverse=True)
    return Graph.from_edges(len(ids), inverse.reshape(-1, 2))


def format_edge_lines(edges: np.ndarray) -> str:
    if len(edges) == 0:
        return ""
    return "\n".join(f"{u} {v}" for u, v in edges.tolist()) + "\n"


def save_edge_list(g: Graph, path: str | os.PathLike) -> None:
    """Write the canonical form: ``u v`` with ``u < v``, sorted, one per line.

    The vertex header is emitted only when some vertex is isolated, since
    only then would the plain edge list lose information.
    """
    with open(path, "w") as fh:
        if any(not a for a in g.adj):
            fh.write(f"{VERTICES_HEADER} {g.vertex_count}\n")
        fh.write(format_edge_lines(g.edge_array()))
