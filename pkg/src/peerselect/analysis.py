"""Trace complexity scoring via compression, and selection-time microbenchmarks.

The non-temporal complexity (NTC) of a trace compares how well the trace
compresses once its row order is destroyed against a same-length trace with
its pair structure destroyed as well: serialize the shuffled rows and a
uniformly random trace, DEFLATE both, and take the size ratio.  Values near 1
mean the pair frequencies are close to uniform; low values mean skewed,
spatially local demand.
"""

from __future__ import annotations

import gc
import statistics
import time
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .demand import TraceRow
from .keyspace import KeySpace
from .selection import build_topology
from .topology import KINDS
from .validation import check_demand_matrix

# Compressor is pinned so NTC values are comparable across runs of this
# artifact: a raw DEFLATE stream via zlib at maximum effort.
COMPRESSION_LEVEL = 9
COMPRESSOR = f"zlib-deflate-{COMPRESSION_LEVEL}"


@dataclass(frozen=True)
class NtcReport:
    """Compressed sizes of the three derived files and their NTC ratio."""

    original_bytes: int
    shuffled_bytes: int
    random_bytes: int
    ntc: float
    seed: int
    compressor: str = COMPRESSOR


@dataclass(frozen=True)
class BenchReport:
    """Wall-clock topology-construction times for one algorithm and size."""

    algorithm: str
    n: int
    repetitions: int
    times_ms: tuple[float, ...]
    median_ms: float
    min_ms: float


def serialize_rows(rows: Iterable[TraceRow]) -> bytes:
    """Canonical byte serialization for compression: ``src,dst\\n`` per row."""
    return b"".join(f"{r.src},{r.dst}\n".encode("ascii") for r in rows)


def _compressed_size(data: bytes) -> int:
    return len(zlib.compress(data, COMPRESSION_LEVEL))


def ntc(rows: Sequence[TraceRow], ks: KeySpace, seed: int, artifact_dir=None) -> NtcReport:
    """Non-temporal complexity of a trace over the node set ``[0, n)``.

    Three files are derived: the rows in original order, a seeded random
    permutation of them, and a same-length trace of uniformly random
    ``src != dst`` pairs.  NTC is compressed-shuffled over compressed-random.
    The original file's size is reported but does not enter the ratio.
    When ``artifact_dir`` is set the three compressed streams are written
    there.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("cannot score an empty trace")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(rows))
    src = rng.integers(0, ks.n, size=len(rows))
    dst = rng.integers(0, ks.n - 1, size=len(rows))
    dst += dst >= src

    original = serialize_rows(rows)
    shuffled = serialize_rows(rows[i] for i in order)
    random_trace = serialize_rows(
        TraceRow(int(s), int(d)) for s, d in zip(src, dst)
    )

    sizes = {}
    for name, data in (("original", original), ("shuffled", shuffled), ("random", random_trace)):
        blob = zlib.compress(data, COMPRESSION_LEVEL)
        sizes[name] = len(blob)
        if artifact_dir is not None:
            Path(artifact_dir, f"{name}.deflate").write_bytes(blob)

    return NtcReport(
        original_bytes=sizes["original"],
        shuffled_bytes=sizes["shuffled"],
        random_bytes=sizes["random"],
        ntc=sizes["shuffled"] / sizes["random"],
        seed=seed,
    )


def bench_selection(demand, algorithms=KINDS, repetitions: int = 5) -> list[BenchReport]:
    """Time topology construction (selection only, routing excluded).

    Runs are strictly sequential with garbage collection paused around each
    timed region; the report keeps the raw per-run times plus their median
    and minimum.
    """
    if repetitions < 3:
        raise ValueError(f"need at least 3 repetitions, got {repetitions}")
    d = check_demand_matrix(demand)
    ks = KeySpace(d.shape[0])
    unknown = [a for a in algorithms if a not in KINDS]
    if unknown:
        raise ValueError(f"unknown algorithm tags {unknown}")
    reports = []
    for kind in algorithms:
        times = []
        for _ in range(repetitions):
            gc_was_enabled = gc.isenabled()
            gc.disable()
            try:
                start = time.perf_counter()
                build_topology(kind, ks, d)
                times.append((time.perf_counter() - start) * 1e3)
            finally:
                if gc_was_enabled:
                    gc.enable()
        reports.append(
            BenchReport(
                algorithm=kind,
                n=ks.n,
                repetitions=repetitions,
                times_ms=tuple(times),
                median_ms=statistics.median(times),
                min_ms=min(times),
            )
        )
    return reports
