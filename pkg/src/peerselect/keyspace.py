"""Bit-level key arithmetic and the per-source bucket decomposition of the keyspace.

Keys are plain integers in ``[0, n)`` with ``n`` a power of two.  Seen from a
source key ``s``, the remaining ``n - 1`` keys split into ``m = log2(n)``
buckets: bucket ``j`` holds exactly the keys at XOR distance ``[2^j, 2^(j+1))``
from ``s``, i.e. the keys that agree with ``s`` on all bits above ``j`` and
differ at bit ``j``.  Bucket 0 is the single XOR-successor ``s ^ 1``; bucket
``m - 1`` covers half the keyspace.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class KeySpace:
    """A keyspace of ``n = 2^m`` keys, addressed by ``m``-bit integers."""

    n: int

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1) != 0:
            raise ValueError(f"node count must be a power of two >= 2, got {self.n}")

    @property
    def m(self) -> int:
        """Bits per key, equal to the number of buckets per source."""
        return self.n.bit_length() - 1

    def check_key(self, k: int) -> int:
        if not 0 <= k < self.n:
            raise ValueError(f"key {k} outside [0, {self.n})")
        return k


@dataclass(frozen=True)
class Bucket:
    """Contiguous key range ``[start, end]`` forming bucket ``index`` of some source."""

    index: int
    start: int
    end: int

    def __contains__(self, key: int) -> bool:
        return self.start <= key <= self.end

    def __len__(self) -> int:
        return self.end - self.start + 1

    def keys(self) -> range:
        return range(self.start, self.end + 1)


def xor_distance(a: int, b: int) -> int:
    """XOR distance between two keys."""
    return a ^ b


def ring_distance(i: int, j: int, ks: KeySpace) -> int:
    """Unidirectional clockwise distance from ``i`` to ``j`` on the ring."""
    return (j - i) % ks.n


def bucket_range(source: int, j: int, ks: KeySpace) -> Bucket:
    """Key range of bucket ``j`` as seen from ``source``.

    The range is the set of keys whose XOR distance from ``source`` lies in
    ``[2^j, 2^(j+1))``; it is always an aligned block of ``2^j`` keys.
    """
    if not 0 <= j < ks.m:
        raise ValueError(f"bucket index {j} outside [0, {ks.m})")
    ks.check_key(source)
    start = ((source ^ (1 << j)) >> j) << j
    return Bucket(index=j, start=start, end=start + (1 << j) - 1)


def bucket_of(source: int, k: int) -> int:
    """Index of the bucket of ``source`` that contains key ``k``.

    Inverse of :func:`bucket_range`: ``k in bucket_range(s, bucket_of(s, k))``.
    """
    if k == source:
        raise ValueError("a key has no bucket relative to itself")
    return (source ^ k).bit_length() - 1
