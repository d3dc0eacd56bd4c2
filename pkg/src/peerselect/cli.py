"""Command-line harness tying ingestion, selection, routing, cost and analysis together.

Subcommands:

* ``run``       full experiment sweep (seeds x chunks x algorithms) to CSV + SVG
* ``ntc``       non-temporal complexity of one dataset
* ``bench``     selection-time microbenchmark across network sizes
* ``gen-zipf``  synthetic Zipf trace generation
* ``topo``      dump a topology edge list
* ``route``     dump an all-pairs path-length matrix

``run`` reads an optional flat ``key = value`` config file; command-line
flags override file values.  All randomness flows from the configured seeds,
so identical configs produce identical result files.  Exit codes: 0 success,
1 config error, 2 data error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import __version__
from .analysis import COMPRESSOR, bench_selection, ntc
from .cost import NATIVE, RESULT_COLUMNS, compare
from .demand import (
    ParseError,
    TraceFormat,
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
from .keyspace import KeySpace
from .routing import RoutingError, route_all, shortest_path_matrix
from .selection import build_topology
from .topology import KINDS
from .validation import check_demand_matrix

logger = logging.getLogger("peerselect")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

MECHANISM_CHOICES = (NATIVE, "shortest-path")
COLUMN_NAMES = ("src", "dst", "timestamp", "size", "skip")


class ConfigError(Exception):
    """Invalid configuration; maps to exit code 1."""


class DataError(Exception):
    """Unreadable or malformed data; maps to exit code 2."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a ``run`` needs; see the config-file keys of the same names."""

    dataset: str | None = None
    zipf_alphas: tuple[float, ...] | None = None
    zipf_rows: int = 100_000
    n_target: int = 64
    seeds: tuple[int, ...] = (0,)
    algorithms: tuple[str, ...] = KINDS
    mechanism: str = NATIVE
    window: float | None = None
    columns: str = "src,dst,timestamp,size"
    outdir: str = "results"
    plots: bool = False

    def validate(self) -> "ExperimentConfig":
        if (self.dataset is None) == (self.zipf_alphas is None):
            raise ConfigError("exactly one of 'dataset' and 'zipf_alphas' must be set")
        if self.n_target < 2 or self.n_target & (self.n_target - 1):
            raise ConfigError(f"n_target must be a power of two >= 2, got {self.n_target}")
        if not self.seeds:
            raise ConfigError("seeds must be nonempty")
        unknown = [a for a in self.algorithms if a not in KINDS]
        if unknown:
            raise ConfigError(f"unrecognized algorithms {unknown}; valid tags are {list(KINDS)}")
        if not self.algorithms:
            raise ConfigError("algorithms must be nonempty")
        if self.mechanism not in MECHANISM_CHOICES:
            raise ConfigError(f"mechanism must be one of {MECHANISM_CHOICES}, got {self.mechanism!r}")
        if self.window is not None and self.window <= 0:
            raise ConfigError(f"window must be positive seconds, got {self.window}")
        if self.window is not None and self.dataset is None:
            raise ConfigError("window requires a dataset (synthetic traces carry no timestamps)")
        if self.zipf_alphas is not None:
            bad = [a for a in self.zipf_alphas if a <= 1]
            if bad:
                raise ConfigError(f"zipf alphas must be greater than 1, got {bad}")
            if self.zipf_rows <= 0:
                raise ConfigError(f"zipf_rows must be positive, got {self.zipf_rows}")
        _trace_format(self.columns)  # raises ConfigError on a bad column list
        return self

    def content_hash(self) -> str:
        """Hash of the result-defining fields (output location and plotting excluded)."""
        skip = {"outdir", "plots"}
        text = "\n".join(f"{f.name}={getattr(self, f.name)!r}" for f in fields(self) if f.name not in skip)
        return hashlib.sha256(text.encode()).hexdigest()[:12]


def _trace_format(columns: str) -> TraceFormat:
    names = [c.strip() for c in columns.split(",") if c.strip()]
    bad = [c for c in names if c not in COLUMN_NAMES]
    if bad:
        raise ConfigError(f"unknown column names {bad}; valid names are {list(COLUMN_NAMES)}")
    if "src" not in names or "dst" not in names:
        raise ConfigError("columns must include 'src' and 'dst'")
    if len([c for c in names if c != "skip"]) != len(set(c for c in names if c != "skip")):
        raise ConfigError("duplicate column names")
    return TraceFormat(
        src_col=names.index("src"),
        dst_col=names.index("dst"),
        timestamp_col=names.index("timestamp") if "timestamp" in names else None,
        size_col=names.index("size") if "size" in names else None,
    )


# ---------------------------------------------------------------------------
# config-file and CSV plumbing


def _parse_list(value: str, cast):
    return tuple(cast(v.strip()) for v in value.split(",") if v.strip())


_CONFIG_PARSERS = {
    "dataset": str,
    "zipf_alphas": lambda v: _parse_list(v, float),
    "zipf_rows": int,
    "n_target": int,
    "seeds": lambda v: _parse_list(v, int),
    "algorithms": lambda v: _parse_list(v, str),
    "mechanism": str,
    "window": float,
    "columns": str,
    "outdir": str,
    "plots": lambda v: v.strip().lower() in ("1", "true", "yes", "on"),
}


def load_config_file(path) -> dict:
    """Read a flat ``key = value`` config file into typed values."""
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_PARSERS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            values[key] = _CONFIG_PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _write_csv(path, header, rows, config_hash: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# peerselect {__version__} config={config_hash}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[col]) for col in header) + "\n")


def _read_trace(path, fmt: TraceFormat):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_trace(fh, fmt)
    except OSError as exc:
        raise DataError(f"cannot read dataset {path}: {exc}") from exc
    except ParseError as exc:
        raise DataError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# run


def _dataset_chunks(config: ExperimentConfig):
    """Yield (dataset_label, seed, chunk_index, demand_matrix) per combination."""
    ks = KeySpace(config.n_target)
    if config.zipf_alphas is not None:
        for alpha in config.zipf_alphas:
            label = f"zipf-a{alpha:g}"
            for seed in config.seeds:
                rows = gen_zipf(ZipfSpec(alpha=alpha, rows=config.zipf_rows, n=config.n_target, seed=seed))
                yield label, seed, 0, build_demand(rows, ks)
        return
    fmt = _trace_format(config.columns)
    all_rows = _read_trace(config.dataset, fmt)
    label = Path(config.dataset).stem
    for seed in config.seeds:
        remapped = remap_filter(all_rows, config.n_target, seed)
        if config.window is not None:
            try:
                chunks = chunk_by_time(remapped, config.window)
            except ValueError as exc:
                raise DataError(f"{config.dataset}: {exc}") from exc
        else:
            chunks = [remapped]
        for index, chunk in enumerate(chunks):
            if not chunk:
                logger.warning("%s seed=%d chunk=%d is empty; skipped", label, seed, index)
                continue
            yield label, seed, index, build_demand(chunk, ks)


def cmd_run(config: ExperimentConfig) -> int:
    config = config.validate()
    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    config_hash = config.content_hash()

    records = []
    for label, seed, chunk, demand in _dataset_chunks(config):
        for report in compare(demand, config.algorithms, config.mechanism):
            records.append(
                {
                    "dataset": label,
                    "seed": seed,
                    "chunk": chunk,
                    "algorithm": report.algorithm,
                    "mechanism": report.mechanism,
                    "n": report.n,
                    "total_cost": report.total_cost,
                    "ratio_vs_chord": report.ratio_vs_chord,
                    "wall_time_ms": report.wall_time_ms,
                }
            )
    if not records:
        raise DataError("no demand to evaluate: every (seed, chunk) combination was empty")
    records.sort(key=lambda r: (r["dataset"], r["seed"], r["chunk"], r["algorithm"]))

    results_path = outdir / "results.csv"
    _write_csv(
        results_path,
        ("dataset", "seed", "chunk", "algorithm", "mechanism", "n", "total_cost", "ratio_vs_chord"),
        records,
        config_hash,
    )
    # Wall-clock timings are non-deterministic, so they live in a separate file.
    _write_csv(outdir / "timings.csv", RESULT_COLUMNS, records, config_hash)

    if config.plots:
        from . import plots

        plots.ratio_boxplot(records, outdir / "ratios_boxplot.svg", salt=config_hash)
        if any(r["chunk"] > 0 for r in records):
            plots.chunk_lineplot(records, outdir / "chunk_ratios.svg", salt=config_hash)
    logger.info("wrote %d result rows to %s", len(records), results_path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# other subcommands


def cmd_ntc(args) -> int:
    fmt = _trace_format(args.columns)
    rows = _read_trace(args.dataset, fmt)
    remapped = remap_filter(rows, args.n_target, args.seed)
    artifact_dir = None
    if args.keep_artifacts:
        artifact_dir = Path(args.outdir)
        artifact_dir.mkdir(parents=True, exist_ok=True)
    try:
        report = ntc(remapped, KeySpace(args.n_target), args.seed, artifact_dir=artifact_dir)
    except ValueError as exc:
        raise DataError(f"{args.dataset}: {exc}") from exc
    header = ("dataset", "n", "rows", "original_bytes", "shuffled_bytes", "random_bytes", "ntc", "seed", "compressor")
    row = {
        "dataset": Path(args.dataset).stem,
        "n": args.n_target,
        "rows": len(remapped),
        "original_bytes": report.original_bytes,
        "shuffled_bytes": report.shuffled_bytes,
        "random_bytes": report.random_bytes,
        "ntc": report.ntc,
        "seed": report.seed,
        "compressor": report.compressor,
    }
    if args.output:
        _write_csv(args.output, header, [row], _args_hash(args))
    print(",".join(header))
    print(",".join(_fmt(row[c]) for c in header))
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.repetitions < 3:
        raise ConfigError(f"repetitions must be at least 3, got {args.repetitions}")
    unknown = [a for a in args.algorithms if a not in KINDS]
    if unknown:
        raise ConfigError(f"unrecognized algorithms {unknown}")
    import numpy as np

    header = ("algorithm", "n", "repetitions", "median_ms", "min_ms", "times_ms")
    rows = []
    for n in args.n:
        if n < 2 or n & (n - 1):
            raise ConfigError(f"network sizes must be powers of two, got {n}")
        rng = np.random.default_rng(args.seed)
        demand = rng.random((n, n))
        np.fill_diagonal(demand, 0.0)
        for report in bench_selection(demand, args.algorithms, args.repetitions):
            rows.append(
                {
                    "algorithm": report.algorithm,
                    "n": report.n,
                    "repetitions": report.repetitions,
                    "median_ms": report.median_ms,
                    "min_ms": report.min_ms,
                    "times_ms": ";".join(format(t, ".6g") for t in report.times_ms),
                }
            )
    if args.output:
        _write_csv(args.output, header, rows, _args_hash(args))
    print(",".join(header))
    for row in rows:
        print(",".join(_fmt(row[c]) for c in header))
    return EXIT_OK


def cmd_gen_zipf(args) -> int:
    try:
        spec = ZipfSpec(alpha=args.alpha, rows=args.rows, n=args.n, seed=args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    write_trace(gen_zipf(spec), args.output)
    logger.info("wrote %d rows to %s", args.rows, args.output)
    return EXIT_OK


def _demand_for(args):
    """Build the demand matrix requested by topo/route flags."""
    sources = [name for name in ("demand", "dataset", "zipf_alpha") if getattr(args, name) is not None]
    if len(sources) > 1:
        raise ConfigError(f"give only one of --demand, --dataset, --zipf-alpha (got {sources})")
    if args.demand is not None:
        try:
            matrix = load_matrix_csv(args.demand)
        except OSError as exc:
            raise DataError(f"cannot read demand matrix {args.demand}: {exc}") from exc
        except ValueError as exc:
            raise DataError(f"bad demand matrix {args.demand}: {exc}") from exc
        try:
            return check_demand_matrix(matrix)
        except ValueError as exc:
            raise DataError(f"bad demand matrix {args.demand}: {exc}") from exc
    if args.dataset is not None:
        rows = _read_trace(args.dataset, _trace_format(args.columns))
        remapped = remap_filter(rows, args.n_target, args.seed)
        return build_demand(remapped, KeySpace(args.n_target))
    if args.zipf_alpha is not None:
        spec = ZipfSpec(alpha=args.zipf_alpha, rows=args.rows, n=args.n_target, seed=args.seed)
        return build_demand(gen_zipf(spec), KeySpace(args.n_target))
    return None


def cmd_topo(args) -> int:
    demand = _demand_for(args)
    if demand is None:
        if args.algorithm != "chord":
            raise ConfigError(f"{args.algorithm} needs a demand source (--demand/--dataset/--zipf-alpha)")
        ks = KeySpace(args.n_target)
    else:
        ks = KeySpace(demand.shape[0])
    topology = build_topology(args.algorithm, ks, demand)
    topology.to_csv(args.output)
    logger.info("wrote %s topology (n=%d) to %s", args.algorithm, ks.n, args.output)
    return EXIT_OK


def cmd_route(args) -> int:
    demand = _demand_for(args)
    if demand is None:
        if args.algorithm != "chord":
            raise ConfigError(f"{args.algorithm} needs a demand source (--demand/--dataset/--zipf-alpha)")
        ks = KeySpace(args.n_target)
    else:
        ks = KeySpace(demand.shape[0])
    topology = build_topology(args.algorithm, ks, demand)
    paths = shortest_path_matrix(topology) if args.mechanism == "shortest-path" else route_all(topology)
    save_matrix_csv(paths.R, args.output)
    logger.info("wrote %s path lengths (n=%d) to %s", paths.mechanism, ks.n, args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; config errors are 1
        raise ConfigError(message)


def _args_hash(args) -> str:
    pairs = sorted((k, repr(v)) for k, v in vars(args).items() if k != "func")
    return hashlib.sha256(repr(pairs).encode()).hexdigest()[:12]


def _add_demand_source_flags(p):
    p.add_argument("--demand", help="dense demand-matrix CSV (headerless n x n)")
    p.add_argument("--dataset", help="trace file to ingest")
    p.add_argument("--zipf-alpha", type=float, help="generate a Zipf trace with this alpha")
    p.add_argument("--rows", type=int, default=100_000, help="rows for --zipf-alpha (default 100000)")
    p.add_argument("--n-target", type=int, default=64, help="node count, a power of two (default 64)")
    p.add_argument("--seed", type=int, default=0, help="seed for remapping / generation (default 0)")
    p.add_argument("--columns", default="src,dst,timestamp,size", help="trace column order")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="peerselect", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"peerselect {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="full experiment sweep to CSV (+ optional SVG plots)")
    p.add_argument("config", nargs="?", help="flat key = value config file")
    p.add_argument("--dataset", help="trace file to ingest")
    p.add_argument("--zipf-alphas", help="comma-separated alphas for synthetic traces")
    p.add_argument("--zipf-rows", type=int, help="rows per synthetic trace")
    p.add_argument("--n-target", type=int, help="node count, a power of two")
    p.add_argument("--seeds", help="comma-separated RNG seeds")
    p.add_argument("--algorithms", help=f"comma-separated subset of {','.join(KINDS)}")
    p.add_argument("--mechanism", choices=MECHANISM_CHOICES, help="routing mechanism class")
    p.add_argument("--window", type=float, help="time-chunk window in seconds")
    p.add_argument("--columns", help="trace column order")
    p.add_argument("--outdir", help="output directory (default results)")
    p.add_argument("--plots", action="store_true", default=None, help="emit SVG plots")
    p.set_defaults(func=_dispatch_run)

    p = sub.add_parser("ntc", help="non-temporal complexity of a dataset")
    p.add_argument("dataset", help="trace file to score")
    p.add_argument("--n-target", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--columns", default="src,dst,timestamp,size")
    p.add_argument("--output", help="also append the row to this CSV file")
    p.add_argument("--keep-artifacts", action="store_true", help=f"retain {COMPRESSOR} streams")
    p.add_argument("--outdir", default="results", help="directory for kept artifacts")
    p.set_defaults(func=cmd_ntc)

    p = sub.add_parser("bench", help="selection-time microbenchmark")
    p.add_argument("--n", type=int, nargs="+", required=True, help="network sizes (powers of two)")
    p.add_argument("--algorithms", nargs="+", default=list(KINDS))
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="also write rows to this CSV file")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen-zipf", help="generate a synthetic Zipf trace file")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--rows", type=int, default=100_000)
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_gen_zipf)

    p = sub.add_parser("topo", help="dump a topology edge list CSV")
    p.add_argument("--algorithm", choices=KINDS, required=True)
    _add_demand_source_flags(p)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_topo)

    p = sub.add_parser("route", help="dump an all-pairs path-length matrix CSV")
    p.add_argument("--algorithm", choices=KINDS, required=True)
    _add_demand_source_flags(p)
    p.add_argument("--mechanism", choices=MECHANISM_CHOICES, default=NATIVE)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_route)

    return parser


def _dispatch_run(args) -> int:
    values: dict = {}
    if args.config:
        values.update(load_config_file(args.config))
    overrides = {
        "dataset": args.dataset,
        "zipf_alphas": _parse_list(args.zipf_alphas, float) if args.zipf_alphas else None,
        "zipf_rows": args.zipf_rows,
        "n_target": args.n_target,
        "seeds": _parse_list(args.seeds, int) if args.seeds else None,
        "algorithms": _parse_list(args.algorithms, str) if args.algorithms else None,
        "mechanism": args.mechanism,
        "window": args.window,
        "columns": args.columns,
        "outdir": args.outdir,
        "plots": args.plots,
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        config = ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cmd_run(config)


def main(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(f"peerselect: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"peerselect: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"peerselect: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except RoutingError as exc:
        print(f"peerselect: internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
