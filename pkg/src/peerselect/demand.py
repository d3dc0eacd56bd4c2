"""Demand matrices from real trace files or synthetic Zipf generation.

A trace is an ordered sequence of (src, dst) communication events, optionally
timestamped and size-weighted.  Raw traces are turned into an ``n x n`` demand
matrix in three steps: random ID assignment plus key-filtering down to a
power-of-two node count, optional non-overlapping time windowing, and
per-pair accumulation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .keyspace import KeySpace

logger = logging.getLogger(__name__)


class TraceRow(NamedTuple):
    src: int | str
    dst: int | str
    timestamp: float | None = None
    size: float = 1.0


class ParseError(ValueError):
    """Malformed trace line; carries the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class TraceFormat:
    """Column layout of a delimiter-separated trace file.

    ``delimiter=None`` treats commas and any whitespace interchangeably.
    ``timestamp_col``/``size_col`` are read only from lines long enough to
    contain them.
    """

    delimiter: str | None = None
    src_col: int = 0
    dst_col: int = 1
    timestamp_col: int | None = 2
    size_col: int | None = 3


def _tokens(line: str, delimiter: str | None) -> list[str]:
    if delimiter is None:
        return line.replace(",", " ").split()
    return [t.strip() for t in line.split(delimiter)]


def parse_trace(source: Iterable[str | bytes], fmt: TraceFormat | None = None) -> list[TraceRow]:
    """Parse a trace stream into rows, preserving file order.

    ``source`` is any iterable of lines (an open text or binary file).  Blank
    lines and ``#`` comments are skipped.  Node labels that are all integers
    are kept as integers; otherwise every label is interned to an integer in
    first-seen order.  Self-loop events are dropped with a counted warning.
    """
    fmt = fmt or TraceFormat()
    raw: list[tuple[str, str, float | None, float]] = []
    all_int = True
    for lineno, line in enumerate(source, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cols = _tokens(line, fmt.delimiter)
        if fmt.src_col >= len(cols) or not cols[fmt.src_col]:
            raise ParseError(lineno, "missing source column")
        if fmt.dst_col >= len(cols) or not cols[fmt.dst_col]:
            raise ParseError(lineno, "missing destination column")
        src, dst = cols[fmt.src_col], cols[fmt.dst_col]
        timestamp = None
        if fmt.timestamp_col is not None and fmt.timestamp_col < len(cols):
            try:
                timestamp = float(cols[fmt.timestamp_col])
            except ValueError:
                raise ParseError(lineno, f"non-numeric timestamp {cols[fmt.timestamp_col]!r}") from None
            if not math.isfinite(timestamp) or timestamp < 0:
                raise ParseError(lineno, f"timestamp must be finite and nonnegative, got {timestamp}")
        size = 1.0
        if fmt.size_col is not None and fmt.size_col < len(cols):
            try:
                size = float(cols[fmt.size_col])
            except ValueError:
                raise ParseError(lineno, f"non-numeric size {cols[fmt.size_col]!r}") from None
            if not math.isfinite(size) or size <= 0:
                raise ParseError(lineno, f"size must be finite and positive, got {size}")
        all_int = all_int and _is_int(src) and _is_int(dst)
        raw.append((src, dst, timestamp, size))

    if all_int:
        rows = [TraceRow(int(s), int(d), t, z) for s, d, t, z in raw]
    else:
        interned: dict[str, int] = {}
        for s, d, _, _ in raw:
            interned.setdefault(s, len(interned))
            interned.setdefault(d, len(interned))
        rows = [TraceRow(interned[s], interned[d], t, z) for s, d, t, z in raw]

    kept = [r for r in rows if r.src != r.dst]
    if len(kept) < len(rows):
        logger.warning("dropped %d self-loop rows", len(rows) - len(kept))
    return kept


def _is_int(token: str) -> bool:
    try:
        int(token)
    except ValueError:
        return False
    return True


def remap_filter(rows: Iterable[TraceRow], n_target: int, seed: int) -> list[TraceRow]:
    """Randomly relabel nodes and keep only events inside the first ``n_target`` IDs.

    Every distinct raw label gets a distinct identifier drawn without
    replacement from ``[0, #labels)``; rows touching an identifier at or above
    ``n_target`` are removed.  Fewer labels than ``n_target`` is fine (some
    keys simply receive no traffic).
    """
    KeySpace(n_target)  # rejects non-power-of-two targets
    rows = list(rows)
    labels: dict[int | str, int] = {}
    for r in rows:
        labels.setdefault(r.src, len(labels))
        labels.setdefault(r.dst, len(labels))
    ids = np.random.default_rng(seed).permutation(len(labels))
    assigned = {label: int(ids[pos]) for label, pos in labels.items()}
    kept = [
        TraceRow(assigned[r.src], assigned[r.dst], r.timestamp, r.size)
        for r in rows
        if assigned[r.src] < n_target and assigned[r.dst] < n_target
    ]
    if rows and not kept:
        logger.warning("remap_filter: no rows survived the key filter (n_target=%d)", n_target)
    return kept


def chunk_by_time(rows: Iterable[TraceRow], window: float) -> list[list[TraceRow]]:
    """Partition rows into consecutive half-open time windows.

    Windows are anchored at the first row's timestamp: ``[t0, t0+w)``,
    ``[t0+w, t0+2w)``, and so on.  Empty intermediate windows are kept so
    chunk indices stay aligned with wall-clock intervals.
    """
    if window <= 0:
        raise ValueError(f"window must be positive, got {window}")
    rows = list(rows)
    if not rows:
        return []
    t0 = rows[0].timestamp
    if t0 is None:
        raise ValueError("rows must carry timestamps for time chunking")
    chunks: list[list[TraceRow]] = []
    for pos, r in enumerate(rows):
        if r.timestamp is None:
            raise ValueError(f"row {pos} has no timestamp")
        if r.timestamp < t0:
            raise ValueError(f"row {pos} predates the first row's timestamp")
        idx = int((r.timestamp - t0) // window)
        while idx >= len(chunks):
            chunks.append([])
        chunks[idx].append(r)
    return chunks


def build_demand(rows: Iterable[TraceRow], ks: KeySpace) -> np.ndarray:
    """Accumulate rows into an ``n x n`` demand matrix.

    ``D[i][j]`` is the total size of events from ``i`` to ``j``; self-loop
    rows are dropped so the diagonal stays zero.
    """
    demand = np.zeros((ks.n, ks.n))
    rows = list(rows)
    if not rows:
        return demand
    src = np.empty(len(rows), dtype=np.int64)
    dst = np.empty(len(rows), dtype=np.int64)
    size = np.empty(len(rows))
    for pos, r in enumerate(rows):
        if not isinstance(r.src, (int, np.integer)) or not isinstance(r.dst, (int, np.integer)):
            raise ValueError(f"row {pos} has non-integer identifiers {(r.src, r.dst)!r}")
        src[pos], dst[pos], size[pos] = r.src, r.dst, r.size
    if src.min() < 0 or dst.min() < 0 or src.max() >= ks.n or dst.max() >= ks.n:
        raise ValueError(f"row identifiers outside [0, {ks.n})")
    keep = src != dst
    np.add.at(demand, (src[keep], dst[keep]), size[keep])
    return demand


@dataclass(frozen=True)
class ZipfSpec:
    """Synthetic trace spec: ``rows`` events over ``n`` nodes with Zipf skew ``alpha``."""

    alpha: float
    rows: int
    n: int
    seed: int

    def __post_init__(self):
        if self.alpha <= 1:
            raise ValueError(f"alpha must be greater than 1, got {self.alpha}")
        if self.n < 2:
            raise ValueError(f"need at least 2 nodes, got {self.n}")
        if self.rows < 0:
            raise ValueError(f"row count must be nonnegative, got {self.rows}")


def gen_zipf(spec: ZipfSpec) -> list[TraceRow]:
    """Generate a synthetic trace whose pair frequencies follow a bounded Zipf law.

    Ranks ``1..n(n-1)`` are drawn with probability proportional to
    ``rank**-alpha`` and mapped onto the ordered node pairs through a seeded
    random bijection, so the skew lands on arbitrary pairs rather than
    ring-adjacent ones.  Output is deterministic for a fixed seed.
    """
    n = spec.n
    n_pairs = n * (n - 1)
    rng = np.random.default_rng(spec.seed)
    pair_of_rank = rng.permutation(n_pairs)
    weights = np.arange(1, n_pairs + 1, dtype=float) ** -spec.alpha
    cum = np.cumsum(weights)
    cum /= cum[-1]
    ranks = np.searchsorted(cum, rng.random(spec.rows), side="right")
    pair_idx = pair_of_rank[ranks]
    src = pair_idx // (n - 1)
    rem = pair_idx % (n - 1)
    dst = rem + (rem >= src)
    return [TraceRow(int(s), int(d)) for s, d in zip(src, dst)]


def write_trace(rows: Iterable[TraceRow], path) -> None:
    """Write rows in the canonical trace file format (``src,dst[,ts[,size]]``)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in rows:
            fields = [str(r.src), str(r.dst)]
            if r.timestamp is not None:
                fields.append(f"{r.timestamp:.10g}")
                if r.size != 1.0:
                    fields.append(f"{r.size:.10g}")
            elif r.size != 1.0:
                raise ValueError("cannot serialize a sized row without a timestamp column")
            fh.write(",".join(fields) + "\n")


def save_matrix_csv(matrix: np.ndarray, path) -> None:
    """Persist a dense matrix as headerless CSV, one row per line."""
    np.savetxt(path, np.asarray(matrix), fmt="%.12g", delimiter=",")


def load_matrix_csv(path) -> np.ndarray:
    """Load a dense headerless CSV matrix."""
    return np.loadtxt(path, delimiter=",", ndmin=2)
