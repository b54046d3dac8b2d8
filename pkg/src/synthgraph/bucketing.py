"""Grouping of output vertices into triangle buckets.

Vertices that must end up in about the same number of triangles (same
rounded ``ce = cc * d * (d - 1)``) are packed greedily into buckets that
never hold more than ``min(d) + 1`` members.  Buckets too small to host their
triangles are then merged in ``ce`` order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import as_targets


def quantize_ce(ce: float) -> int:
    """Grouping key for a ``ce`` value: nearest integer, halves rounded up."""
    if ce < 0:
        raise ValueError("ce must be >= 0")
    return int(math.floor(ce + 0.5))


def min_bucket_size(ce: float) -> int:
    """Smallest size that can host ``ce / 2`` triangles per vertex."""
    return math.ceil(math.sqrt(ce))


@dataclass
class BucketPlan:
    bucket_id: int
    members: list[int]
    ce_key: int
    n_min: int
    n_max: int
    edge_prob: float | None = None
    full: bool = False
    residual: bool = False

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass
class _Open:
    members: list[int] = field(default_factory=list)
    min_d: int = 0
    max_ce: float = 0.0


def _plan(bucket_id: int, b: _Open, key: int, full: bool) -> BucketPlan:
    return BucketPlan(bucket_id, b.members, key, min_bucket_size(b.max_ce), b.min_d + 1, full=full)


def group_into_buckets(targets) -> list[BucketPlan]:
    """Greedy sequential fill, one open bucket per ``ce`` key.

    A vertex joins the open bucket of its key unless that would push the
    bucket past ``min(d) + 1`` members (its own degree included); then the
    bucket is retired as full and a new one is opened.  A bucket that reaches
    its size bound is retired immediately.  Vertices with ``ce == 0`` get no
    bucket.
    """
    t = as_targets(targets)
    if len(t) == 0:
        raise ValueError("targets must be non-empty")
    open_by_key: dict[int, tuple[int, _Open]] = {}
    done: dict[int, BucketPlan] = {}
    next_id = 0
    degree = t.degree.tolist()
    ce = t.ce.tolist()
    for i in np.flatnonzero((t.degree >= 2) & (t.ce > 0)).tolist():
        d, c = degree[i], ce[i]
        key = quantize_ce(c)
        slot = open_by_key.get(key)
        if slot is not None:
            bid, b = slot
            if len(b.members) + 1 > min(b.min_d, d) + 1:
                done[bid] = _plan(bid, b, key, full=True)
                slot = None
        if slot is None:
            bid, b = next_id, _Open(min_d=d)
            next_id += 1
            open_by_key[key] = (bid, b)
        b.members.append(i)
        b.min_d = min(b.min_d, d)
        b.max_ce = max(b.max_ce, c)
        if len(b.members) >= b.min_d + 1:
            done[bid] = _plan(bid, b, key, full=True)
            del open_by_key[key]
    for key, (bid, b) in open_by_key.items():
        done[bid] = _plan(bid, b, key, full=False)
    return [done[k] for k in sorted(done)]


def merge_incomplete_buckets(buckets: list[BucketPlan], targets) -> list[BucketPlan]:
    """Concatenate undersized buckets in ascending ``ce_key`` order.

    Adequate buckets pass through unchanged and keep their order.  A forming
    bucket is closed when adding the next undersized bucket would exceed
    ``min(d) + 1``.  Merged buckets that still cannot host their triangles
    are kept and flagged ``residual``.
    """
    t = as_targets(targets)
    keep = [b for b in buckets if b.size >= b.n_min]
    small = sorted((b for b in buckets if b.size < b.n_min), key=lambda b: (b.ce_key, b.bucket_id))
    if not small:
        return list(buckets)
    next_id = max(b.bucket_id for b in buckets) + 1
    merged: list[BucketPlan] = []
    cur: BucketPlan | None = None
    for b in small:
        bmin = int(t.degree[b.members].min())
        if cur is not None and cur.size + b.size > min(cur.n_max - 1, bmin) + 1:
            cur.full = True
            merged.append(cur)
            cur = None
        if cur is None:
            cur = BucketPlan(next_id, list(b.members), b.ce_key, b.n_min, bmin + 1)
            next_id += 1
        else:
            cur.members.extend(b.members)
            cur.n_min = max(cur.n_min, b.n_min)
            cur.n_max = min(cur.n_max, bmin + 1)
    cur.full = True
    merged.append(cur)
    for m in merged:
        m.residual = m.size < m.n_min
    return keep + merged


def plan_buckets(targets) -> list[BucketPlan]:
    t = as_targets(targets)
    return merge_incomplete_buckets(group_into_buckets(t), t)
