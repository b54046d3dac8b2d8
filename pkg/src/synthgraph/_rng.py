"""Counter-based random streams.

Every random number used during generation is a pure function of
``(seed, tag, domain, ..., entity, counter)``.  Draws therefore do not depend
on the order in which entities are visited or on how work is split between
threads, which is what makes parallel and sequential runs byte-identical.

The mixing function is the SplitMix64 finalizer applied over numpy
``uint64`` arrays (wrapping arithmetic).
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_COUNTER_MULT = 0xD1B54A32D192ED03

# Phase tags. Values are part of the stream layout; never renumber.
TAG_DEGREE = 1
TAG_CC_BIN = 2
TAG_CC_VALUE = 3
TAG_INTRA = 4
TAG_CROSS = 5
TAG_SHUFFLE = 6
TAG_GROUP_PAIR = 7
TAG_STUB_CROSS = 10
TAG_STUB_SHUFFLE = 11
TAG_STUB_GROUP_PAIR = 12


def _mix_int(x: int) -> int:
    z = (x + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def stream_key(seed: int, *parts: int) -> int:
    """Fold a seed and any number of integer parts into a 64-bit key."""
    h = _mix_int(seed & _MASK)
    for p in parts:
        h = _mix_int(h ^ (p & _MASK))
    return h


def _mix(z: np.ndarray) -> np.ndarray:
    z = z + np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def bits(key: int, entity, counter=0) -> np.ndarray:
    """64 random bits per (entity, counter) element, broadcasting the two."""
    with np.errstate(over="ignore"):
        e = np.asarray(entity, dtype=np.int64).astype(np.uint64)
        c = np.asarray(counter, dtype=np.int64).astype(np.uint64)
        h = _mix(np.uint64(key) ^ _mix(e))
        return _mix(h ^ (c * np.uint64(_COUNTER_MULT)))


def uniform(key: int, entity, counter=0) -> np.ndarray:
    """Uniform doubles in [0, 1)."""
    return (bits(key, entity, counter) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def uniform_pos(key: int, entity, counter=0) -> np.ndarray:
    """Uniform doubles in (0, 1]; never exactly zero."""
    b = (bits(key, entity, counter) >> np.uint64(11)).astype(np.float64)
    return (b + 1.0) * 2.0**-53


def below(key: int, n: int, entity, counter=0) -> np.ndarray:
    """Uniform integers in [0, n)."""
    u = uniform(key, entity, counter)
    return np.minimum((u * n).astype(np.int64), n - 1)
