"""Directed overlay topologies: a ring plus up to ``log n`` selected peers per node.

Two families are represented.  Bucket-based topologies (``chord``,
``bsb-half``, ``bsb-max``) keep exactly one peer per bucket per node, stored
as an ``(n, m)`` table.  The ``permutations`` topology is a circulant graph:
all nodes share one set of ring-offset "coins", and node ``i`` links to
``(i + p) mod n`` for every coin ``p``.  The ring successor edge
``i -> (i+1) mod n`` is always part of the edge set; for bucket-based kinds it
coincides with the bucket-0 peer on even keys and is an explicit extra edge
otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .keyspace import KeySpace, bucket_of, bucket_range

BUCKET_KINDS = ("chord", "bsb-half", "bsb-max")
KINDS = BUCKET_KINDS + ("permutations",)


@dataclass(frozen=True)
class CoinSet:
    """Shared ring-offset jump set of a permutations topology.

    Always contains 1 (the ring, which guarantees connectivity) plus at most
    ``budget`` further offsets in ``[1, n-1]``.
    """

    coins: tuple[int, ...]
    budget: int

    def __post_init__(self):
        if 1 not in self.coins:
            raise ValueError("coin set must contain 1")
        if len(set(self.coins)) != len(self.coins):
            raise ValueError("coins must be distinct")
        if len(self.coins) > self.budget + 1:
            raise ValueError(f"{len(self.coins)} coins exceed budget {self.budget} + ring coin")
        if min(self.coins) < 1:
            raise ValueError("coins must be positive")

    def __iter__(self):
        return iter(self.coins)

    def __len__(self) -> int:
        return len(self.coins)


@dataclass(frozen=True)
class Topology:
    """Overlay graph of one selection algorithm over a keyspace.

    ``bucket_peers[i][j]`` is node ``i``'s selected peer in bucket ``j``
    (bucket kinds only); ``coins`` is the shared offset set (permutations
    only).
    """

    ks: KeySpace
    kind: str
    bucket_peers: np.ndarray | None = None
    coins: CoinSet | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown topology kind {self.kind!r}")
        if self.kind in BUCKET_KINDS:
            if self.bucket_peers is None:
                raise ValueError(f"{self.kind} topology requires a bucket-peer table")
            if self.bucket_peers.shape != (self.ks.n, self.ks.m):
                raise ValueError(
                    f"bucket-peer table shape {self.bucket_peers.shape} does not match "
                    f"(n, m) = ({self.ks.n}, {self.ks.m})"
                )
        elif self.coins is None:
            raise ValueError("permutations topology requires a coin set")
        if self.coins is not None and max(self.coins) >= self.ks.n:
            raise ValueError("coins must lie in [1, n-1]")

    def successor(self, i: int) -> int:
        return (i + 1) % self.ks.n

    def neighbors(self, i: int) -> tuple[int, ...]:
        """All out-neighbors of ``i`` (selected peers plus the ring successor), ascending."""
        self.ks.check_key(i)
        if self.kind == "permutations":
            assert self.coins is not None
            out = {(i + p) % self.ks.n for p in self.coins}
        else:
            assert self.bucket_peers is not None
            out = set(int(p) for p in self.bucket_peers[i])
            out.add(self.successor(i))
        return tuple(sorted(out))

    def routing_peers(self, i: int) -> tuple[int, ...]:
        """The routing-table entries of ``i``: its selected peers, ascending.

        For bucket kinds this excludes a ring successor that was not selected
        into a bucket; greedy forwarding consults only the routing table.
        """
        self.ks.check_key(i)
        if self.kind == "permutations":
            return self.neighbors(i)
        assert self.bucket_peers is not None
        return tuple(sorted(set(int(p) for p in self.bucket_peers[i])))

    def edges(self):
        """Yield all directed edges ``(src, dst)`` in canonical order."""
        for i in range(self.ks.n):
            for dst in self.neighbors(i):
                yield i, dst

    def max_out_degree(self) -> int:
        return max(len(self.neighbors(i)) for i in range(self.ks.n))

    def check_bucket_residency(self) -> None:
        """Verify that every selected peer lies inside its own bucket's key range."""
        if self.kind == "permutations":
            return
        assert self.bucket_peers is not None
        for i in range(self.ks.n):
            for j in range(self.ks.m):
                peer = int(self.bucket_peers[i, j])
                if peer not in bucket_range(i, j, self.ks):
                    raise ValueError(f"peer {peer} of node {i} escapes bucket {j}")

    def to_csv(self, path) -> None:
        """Write the edge list as ``src,dst`` lines under a ``# kind=…, n=…`` header."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# kind={self.kind}, n={self.ks.n}\n")
            for src, dst in self.edges():
                fh.write(f"{src},{dst}\n")

    @classmethod
    def from_csv(cls, path) -> "Topology":
        """Reconstruct a topology from an edge-list CSV written by :meth:`to_csv`."""
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if not header.startswith("#"):
                raise ValueError("missing '# kind=…, n=…' header line")
            meta = dict(
                part.strip().split("=", 1) for part in header.lstrip("#").split(",") if "=" in part
            )
            kind, n = meta["kind"], int(meta["n"])
            out: dict[int, set[int]] = {i: set() for i in range(n)}
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                src_s, dst_s = line.split(",")
                out[int(src_s)].add(int(dst_s))
        ks = KeySpace(n)
        if kind == "permutations":
            offsets = tuple(sorted((d - 0) % n for d in out[0]))
            for i in range(n):
                if tuple(sorted((d - i) % n for d in out[i])) != offsets:
                    raise ValueError(f"node {i} breaks the shared-offset structure")
            return cls(ks=ks, kind=kind, coins=CoinSet(coins=offsets, budget=ks.m))
        peers = np.empty((n, ks.m), dtype=np.int64)
        for i in range(n):
            succ = (i + 1) % n
            by_bucket: dict[int, list[int]] = {}
            for dst in sorted(out[i]):
                by_bucket.setdefault(bucket_of(i, dst), []).append(dst)
            for j in range(ks.m):
                cands = by_bucket.get(j, [])
                if len(cands) == 2 and succ in cands:
                    cands = [d for d in cands if d != succ]
                if len(cands) != 1:
                    raise ValueError(f"node {i} bucket {j} has {len(cands)} candidate peers")
                peers[i, j] = cands[0]
        return cls(ks=ks, kind=kind, bucket_peers=peers)
