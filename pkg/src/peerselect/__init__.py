"""Demand-aware peer selection and routing-cost simulation for structured P2P overlays."""

from .analysis import BenchReport, NtcReport, bench_selection, ntc, serialize_rows
from .cost import CostReport, compare, total_cost
from .demand import (
    ParseError,
    TraceFormat,
    TraceRow,
    ZipfSpec,
    build_demand,
    chunk_by_time,
    gen_zipf,
    load_matrix_csv,
    parse_trace,
    remap_filter,
    save_matrix_csv,
    write_trace,
)
from .keyspace import Bucket, KeySpace, bucket_of, bucket_range, ring_distance, xor_distance
from .routing import (
    PathLengthMatrix,
    RoutingError,
    coin_route_table,
    route_all,
    route_all_xor,
    route_xor_greedy,
    shortest_path_matrix,
)
from .selection import (
    SELECTORS,
    ChordSelector,
    HalfSplitSelector,
    MaxDemandSelector,
    PeerSelector,
    PermutationsSelector,
    build_topology,
    select_bsb,
    select_chord,
    select_permutations,
)
from .topology import BUCKET_KINDS, KINDS, CoinSet, Topology

__version__ = "0.1.0"

__all__ = [
    "BenchReport",
    "Bucket",
    "BUCKET_KINDS",
    "ChordSelector",
    "CoinSet",
    "CostReport",
    "HalfSplitSelector",
    "KeySpace",
    "KINDS",
    "MaxDemandSelector",
    "NtcReport",
    "ParseError",
    "PathLengthMatrix",
    "PeerSelector",
    "PermutationsSelector",
    "RoutingError",
    "SELECTORS",
    "Topology",
    "TraceFormat",
    "TraceRow",
    "ZipfSpec",
    "bench_selection",
    "bucket_of",
    "bucket_range",
    "build_demand",
    "build_topology",
    "chunk_by_time",
    "coin_route_table",
    "compare",
    "gen_zipf",
    "load_matrix_csv",
    "ntc",
    "parse_trace",
    "remap_filter",
    "ring_distance",
    "route_all",
    "route_all_xor",
    "route_xor_greedy",
    "save_matrix_csv",
    "select_bsb",
    "select_chord",
    "select_permutations",
    "serialize_rows",
    "shortest_path_matrix",
    "total_cost",
    "write_trace",
    "xor_distance",
    "__version__",
]
