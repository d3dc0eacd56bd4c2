"""Peer-selection algorithms: Chord, the two bucket-demand strategies, and permutations.

All four build a :class:`~peerselect.topology.Topology` over the same degree
budget of ``log n`` selected peers per node.  Chord is demand-oblivious.  The
two bucket strategies pick one peer per bucket from the source's demand row:
``half-split`` takes the first key (ascending) at which the cumulative bucket
demand reaches half the bucket total, ``max-demand`` takes the first key
attaining the bucket maximum.  The permutations algorithm scores every ring
offset by its total demand, then greedily keeps the highest-scoring offsets,
skipping any offset that is an integer multiple of one already kept.

The module-level functions are the core API; the ``*Selector`` classes wrap
them in the scikit-learn estimator protocol (``fit`` on a demand matrix,
``predict`` hop counts for node pairs).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .keyspace import KeySpace
from .topology import CoinSet, Topology
from .validation import check_demand_matrix, check_pairs

STRATEGIES = ("half-split", "max-demand")
_STRATEGY_KIND = {"half-split": "bsb-half", "max-demand": "bsb-max"}


def select_chord(ks: KeySpace) -> Topology:
    """Demand-oblivious baseline: node ``i``'s peer in bucket ``k`` is ``i XOR 2^k``."""
    nodes = np.arange(ks.n, dtype=np.int64)
    peers = nodes[:, None] ^ (np.int64(1) << np.arange(ks.m, dtype=np.int64))[None, :]
    return Topology(ks=ks, kind="chord", bucket_peers=peers)


def select_bsb(ks: KeySpace, demand: np.ndarray, strategy: str) -> Topology:
    """Demand-aware bucket selection, one peer per bucket per node.

    Zero-demand buckets fall back to the Chord peer so the topology stays
    bucket-complete.  Ties break to the first qualifying key in ascending
    order.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")
    demand = check_demand_matrix(demand, ks)
    n, m = ks.n, ks.m
    nodes = np.arange(n, dtype=np.int64)
    peers = np.empty((n, m), dtype=np.int64)
    for j in range(m):
        width = 1 << j
        # Bucket j of node i is the contiguous block [(i >> j) ^ 1] of its
        # demand row when that row is viewed in 2^j-wide aligned blocks.
        blocks = demand.reshape(n, n >> j, width)
        bucket_demand = blocks[nodes, (nodes >> j) ^ 1]
        if strategy == "half-split":
            cumulative = np.cumsum(bucket_demand, axis=1)
            half = cumulative[:, -1] / 2.0
            pos = (cumulative >= half[:, None]).argmax(axis=1)
            empty = cumulative[:, -1] == 0
        else:
            pos = bucket_demand.argmax(axis=1)
            empty = bucket_demand[nodes, pos] == 0
        start = (((nodes >> j) ^ 1) << j)
        peers[:, j] = np.where(empty, nodes ^ width, start + pos)
    return Topology(ks=ks, kind=_STRATEGY_KIND[strategy], bucket_peers=peers)


def offset_scores(ks: KeySpace, demand: np.ndarray) -> np.ndarray:
    """Total demand carried at each ring offset: ``w[d] = sum_i D[i][(i+d) mod n]``.

    ``w[0]`` is the (zero) diagonal and is never a candidate.
    """
    demand = check_demand_matrix(demand, ks)
    n = ks.n
    nodes = np.arange(n)
    w = np.zeros(n)
    for d in range(1, n):
        cols = nodes + d
        cols[cols >= n] -= n
        w[d] = demand[nodes, cols].sum()
    return w


def select_permutations(ks: KeySpace, demand: np.ndarray) -> tuple[CoinSet, Topology]:
    """Shared-offset selection with the multiple-of-a-coin filter.

    Candidate offsets are ranked by descending score (ties toward smaller
    offsets).  Walking the ranked list, an offset already reachable as an
    integer multiple of a kept coin is skipped; selection stops after
    ``log n`` coins beyond the mandatory ring coin 1.
    """
    w = offset_scores(ks, demand)
    candidates = np.arange(1, ks.n)
    order = candidates[np.argsort(-w[candidates], kind="stable")]
    coins = [1]
    for d in order:
        if len(coins) - 1 >= ks.m:
            break
        d = int(d)
        if d == 1 or any(c > 1 and d % c == 0 for c in coins):
            continue
        coins.append(d)
    coin_set = CoinSet(coins=tuple(sorted(coins)), budget=ks.m)
    return coin_set, Topology(ks=ks, kind="permutations", coins=coin_set)


def build_topology(kind: str, ks: KeySpace, demand: np.ndarray | None = None) -> Topology:
    """Build a topology by kind tag; demand is required for the demand-aware kinds."""
    if kind == "chord":
        return select_chord(ks)
    if demand is None:
        raise ValueError(f"{kind} selection needs a demand matrix")
    if kind == "bsb-half":
        return select_bsb(ks, demand, "half-split")
    if kind == "bsb-max":
        return select_bsb(ks, demand, "max-demand")
    if kind == "permutations":
        return select_permutations(ks, demand)[1]
    raise ValueError(f"unknown topology kind {kind!r}")


class PeerSelector(BaseEstimator):
    """Base estimator: fit on an ``n x n`` demand matrix, predict hop counts.

    After ``fit``, ``topology_`` holds the built overlay and ``keyspace_`` its
    keyspace.  ``predict`` takes an array of ``(src, dst)`` pairs and returns
    the hop count of each under the algorithm's native routing mechanism.
    """

    kind: str = ""

    def fit(self, X, y=None):
        demand = check_demand_matrix(X)
        self.keyspace_ = KeySpace(demand.shape[0])
        self.topology_ = build_topology(self.kind, self.keyspace_, demand)
        return self

    def _check_fitted(self) -> Topology:
        if not hasattr(self, "topology_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet; call fit first")
        return self.topology_

    def predict(self, X) -> np.ndarray:
        from . import routing

        topo = self._check_fitted()
        pairs = check_pairs(X, self.keyspace_)
        return np.array(
            [routing.route_xor_greedy(topo, int(s), int(d))[0] for s, d in pairs],
            dtype=np.int64,
        )

    def path_length_matrix(self) -> np.ndarray:
        """All-pairs hop counts under the native routing mechanism."""
        from . import routing

        return routing.route_all(self._check_fitted()).R


class ChordSelector(PeerSelector):
    """Demand-oblivious power-of-two peer selection.

    ``n`` may be given up front so the estimator can be fitted without a
    demand matrix; otherwise the matrix fixes the node count.
    """

    kind = "chord"

    def __init__(self, n: int | None = None):
        self.n = n

    def fit(self, X=None, y=None):
        if X is None:
            if self.n is None:
                raise ValueError("either fit with a demand matrix or set n")
            self.keyspace_ = KeySpace(self.n)
        else:
            demand = check_demand_matrix(X)
            if self.n is not None and self.n != demand.shape[0]:
                raise ValueError(f"n={self.n} conflicts with demand shape {demand.shape}")
            self.keyspace_ = KeySpace(demand.shape[0])
        self.topology_ = select_chord(self.keyspace_)
        return self


class HalfSplitSelector(PeerSelector):
    """Per bucket, link to the key where cumulative demand first reaches half."""

    kind = "bsb-half"


class MaxDemandSelector(PeerSelector):
    """Per bucket, link to the key with the highest demand from the source."""

    kind = "bsb-max"


class PermutationsSelector(PeerSelector):
    """Shared ring-offset selection routed by coin change over the offsets."""

    kind = "permutations"

    def fit(self, X, y=None):
        demand = check_demand_matrix(X)
        self.keyspace_ = KeySpace(demand.shape[0])
        self.coins_, self.topology_ = select_permutations(self.keyspace_, demand)
        return self

    def predict(self, X) -> np.ndarray:
        from . import routing

        self._check_fitted()
        pairs = check_pairs(X, self.keyspace_)
        table = routing.coin_route_table(self.coins_, self.keyspace_)
        return table[(pairs[:, 1] - pairs[:, 0]) % self.keyspace_.n]


SELECTORS = {
    "chord": ChordSelector,
    "bsb-half": HalfSplitSelector,
    "bsb-max": MaxDemandSelector,
    "permutations": PermutationsSelector,
}
