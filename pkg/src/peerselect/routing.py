"""Hop counts between all node pairs under the three routing mechanisms.

XOR-greedy forwarding consults only the current node's routing table: the
message moves to the peer whose key shares the longest common prefix with the
destination key, and must strictly improve that prefix at every hop.  On a
bucket-complete topology the peer in the destination's bucket always improves
the prefix, so paths have at most ``log n`` hops.

Permutations topologies route by coin change: the hop count from ``i`` to
``j`` is the minimum number of coins summing (mod n) to their ring distance,
precomputed once per coin set.  Directed BFS shortest paths over the full
edge set (ring included) serve as the lower-bound benchmark mechanism.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path as _sp_shortest_path

from .keyspace import KeySpace
from .topology import BUCKET_KINDS, CoinSet, Topology

XOR_GREEDY = "xor-greedy"
COIN_CHANGE = "coin-change"
SHORTEST_PATH = "shortest-path"

# Row-block size cap keeps the vectorized all-pairs sweep under ~200 MB.
_BLOCK_CELLS = 1 << 22


class RoutingError(RuntimeError):
    """A route could not make progress; signals a malformed topology."""


@dataclass(frozen=True)
class PathLengthMatrix:
    """All-pairs hop counts ``R`` under one routing mechanism."""

    ks: KeySpace
    R: np.ndarray
    mechanism: str

    def __post_init__(self):
        if self.R.shape != (self.ks.n, self.ks.n):
            raise ValueError(f"path matrix shape {self.R.shape} does not match n={self.ks.n}")


def _bit_length(a: np.ndarray) -> np.ndarray:
    # frexp exponent equals bit_length for positive integers below 2**53.
    return np.frexp(a.astype(np.float64))[1]


def _require_bucket_kind(topology: Topology) -> None:
    if topology.kind not in BUCKET_KINDS:
        raise ValueError(f"XOR-greedy routing needs a bucket-based topology, got {topology.kind!r}")


def route_xor_greedy(topology: Topology, src: int, dst: int) -> tuple[int, list[int]]:
    """Greedy XOR route from ``src`` to ``dst``; returns (hops, node path).

    Peers are scanned in ascending key order and the first strict maximizer
    of the common prefix length wins.  Raises :class:`RoutingError` if no
    peer improves the prefix, which cannot happen on a well-formed
    bucket-complete topology.
    """
    _require_bucket_kind(topology)
    ks = topology.ks
    ks.check_key(src)
    ks.check_key(dst)
    m = ks.m
    curr, path, best_prefix = src, [src], 0
    while curr != dst:
        nxt = curr
        for peer in topology.routing_peers(curr):
            prefix = m - (peer ^ dst).bit_length()
            if prefix > best_prefix:
                best_prefix = prefix
                nxt = peer
        if nxt == curr:
            raise RoutingError(
                f"no peer of node {curr} improves the prefix toward {dst}; malformed topology"
            )
        curr = nxt
        path.append(curr)
    return len(path) - 1, path


def route_all_xor(topology: Topology) -> PathLengthMatrix:
    """All-pairs XOR-greedy hop counts.

    Vectorized over destination rows: on a bucket-complete topology the
    greedy next hop from ``u`` toward ``dst`` is always ``u``'s peer in
    bucket ``bucket_of(u, dst)``, since no peer in any other bucket can
    share a longer prefix with the destination.
    """
    _require_bucket_kind(topology)
    assert topology.bucket_peers is not None
    ks = topology.ks
    n, m = ks.n, ks.m
    peers = topology.bucket_peers
    R = np.zeros((n, n), dtype=np.int64)
    block = max(1, min(n, _BLOCK_CELLS // n))
    dst_row = np.arange(n, dtype=np.int64)[None, :]
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        dst = np.broadcast_to(dst_row, (hi - lo, n))
        curr = np.repeat(np.arange(lo, hi, dtype=np.int64)[:, None], n, axis=1)
        hops = R[lo:hi]
        x = curr ^ dst
        for _ in range(m):
            active = x != 0
            if not active.any():
                break
            j = _bit_length(x[active]) - 1
            nxt = peers[curr[active], j]
            new_x = nxt ^ dst[active]
            stalled = _bit_length(new_x) >= _bit_length(x[active])
            if stalled.any():
                s, d = curr[active][stalled][0], dst[active][stalled][0]
                raise RoutingError(
                    f"no greedy progress from node {s} toward {d}; malformed topology"
                )
            curr[active] = nxt
            x[active] = new_x
            hops[active] += 1
        if (x != 0).any():
            bad = np.argwhere(x != 0)[0]
            raise RoutingError(
                f"route from {lo + bad[0]} to {bad[1]} exceeded {m} hops; malformed topology"
            )
    return PathLengthMatrix(ks=ks, R=R, mechanism=XOR_GREEDY)


def coin_route_table(coins: CoinSet, ks: KeySpace) -> np.ndarray:
    """Minimum number of coins summing (mod n) to each ring distance.

    Breadth-first exploration over the residues ``0..n-1`` with the coin set
    as the jump set; coin 1 guarantees every distance is reachable.
    ``table[0]`` is 0.
    """
    offsets = sorted(set(int(c) for c in coins))
    if 1 not in offsets:
        raise ValueError("coin set must contain 1")
    if offsets[0] < 1 or offsets[-1] >= ks.n:
        raise ValueError(f"coins must lie in [1, {ks.n})")
    n = ks.n
    table = np.full(n, -1, dtype=np.int64)
    table[0] = 0
    frontier = [0]
    hops = 0
    while frontier:
        hops += 1
        nxt = []
        for residue in frontier:
            for c in offsets:
                target = residue + c
                if target >= n:
                    target -= n
                if table[target] < 0:
                    table[target] = hops
                    nxt.append(target)
        frontier = nxt
    return table


def route_all_coin(topology: Topology) -> PathLengthMatrix:
    """All-pairs hop counts of a permutations topology via its coin table."""
    if topology.kind != "permutations" or topology.coins is None:
        raise ValueError(f"coin-change routing needs a permutations topology, got {topology.kind!r}")
    ks = topology.ks
    table = coin_route_table(topology.coins, ks)
    nodes = np.arange(ks.n, dtype=np.int64)
    ring_dist = (nodes[None, :] - nodes[:, None]) % ks.n
    return PathLengthMatrix(ks=ks, R=table[ring_dist], mechanism=COIN_CHANGE)


def shortest_path_matrix(topology: Topology) -> PathLengthMatrix:
    """Directed BFS distances over the full edge set; the lower-bound benchmark."""
    ks = topology.ks
    src, dst = zip(*topology.edges())
    adj = csr_matrix(
        (np.ones(len(src), dtype=np.int8), (src, dst)), shape=(ks.n, ks.n)
    )
    dist = _sp_shortest_path(adj, method="D", directed=True, unweighted=True)
    if np.isinf(dist).any():
        i, j = np.argwhere(np.isinf(dist))[0]
        raise RoutingError(f"node {j} unreachable from {i}; topology is missing the ring")
    return PathLengthMatrix(ks=ks, R=dist.astype(np.int64), mechanism=SHORTEST_PATH)


def route_all(topology: Topology) -> PathLengthMatrix:
    """All-pairs hop counts under the topology's native routing mechanism."""
    if topology.kind == "permutations":
        return route_all_coin(topology)
    return route_all_xor(topology)
