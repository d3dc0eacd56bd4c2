"""Demand-weighted communication cost and cross-algorithm comparison.

The cost of a routed overlay is the sum over all ordered node pairs of hop
count times demand.  Algorithms are compared through their cost ratio against
Chord on the same demand and the same routing-mechanism class; the
shortest-path benchmark is reported as its own mechanism class and never
mixed into native-mechanism ratios.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .keyspace import KeySpace
from .routing import PathLengthMatrix, route_all, shortest_path_matrix
from .selection import build_topology
from .topology import KINDS
from .validation import check_demand_matrix

NATIVE = "native"

RESULT_COLUMNS = ("dataset", "algorithm", "mechanism", "n", "total_cost", "ratio_vs_chord", "wall_time_ms")


@dataclass(frozen=True)
class CostReport:
    """Total demand-weighted cost of one algorithm on one demand matrix."""

    algorithm: str
    mechanism: str
    n: int
    total_cost: float
    ratio_vs_chord: float | None
    wall_time_ms: float | None = None


def total_cost(path_lengths: PathLengthMatrix | np.ndarray, demand) -> float:
    """Sum of ``hops(i, j) * demand(i, j)`` over all ordered pairs."""
    hops = path_lengths.R if isinstance(path_lengths, PathLengthMatrix) else np.asarray(path_lengths)
    d = check_demand_matrix(demand)
    if hops.shape != d.shape:
        raise ValueError(f"path matrix shape {hops.shape} does not match demand shape {d.shape}")
    return float((hops * d).sum())


def _routed_cost(kind: str, ks: KeySpace, demand: np.ndarray, mechanism: str) -> tuple[float, str, float]:
    start = time.perf_counter()
    topology = build_topology(kind, ks, demand)
    if mechanism == NATIVE:
        paths = route_all(topology)
    elif mechanism == "shortest-path":
        paths = shortest_path_matrix(topology)
    else:
        raise ValueError(f"unknown mechanism {mechanism!r}")
    cost = total_cost(paths, demand)
    elapsed_ms = (time.perf_counter() - start) * 1e3
    return cost, paths.mechanism, elapsed_ms


def compare(demand, algorithms=KINDS, mechanism: str = NATIVE) -> list[CostReport]:
    """Build, route and cost each algorithm on one demand matrix.

    Chord is always evaluated (under the same mechanism class) to anchor the
    cost ratios, even when it is not in ``algorithms``.  Deterministic given
    the demand matrix.
    """
    d = check_demand_matrix(demand)
    ks = KeySpace(d.shape[0])
    unknown = [a for a in algorithms if a not in KINDS]
    if unknown:
        raise ValueError(f"unknown algorithm tags {unknown}; expected subset of {KINDS}")

    results: dict[str, tuple[float, str, float]] = {}
    for kind in algorithms:
        results[kind] = _routed_cost(kind, ks, d, mechanism)
    if "chord" in results:
        chord_cost = results["chord"][0]
    else:
        chord_cost = _routed_cost("chord", ks, d, mechanism)[0]

    reports = []
    for kind in algorithms:
        cost, mech, elapsed_ms = results[kind]
        ratio = cost / chord_cost if chord_cost > 0 else None
        reports.append(
            CostReport(
                algorithm=kind,
                mechanism=mech,
                n=ks.n,
                total_cost=cost,
                ratio_vs_chord=ratio,
                wall_time_ms=elapsed_ms,
            )
        )
    return reports
