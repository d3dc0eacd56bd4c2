import numpy as np
import pytest

from peerselect import KeySpace, TraceRow, load_matrix_csv, write_trace
from peerselect.cli import (
    EXIT_CONFIG,
    EXIT_DATA,
    EXIT_OK,
    ExperimentConfig,
    ConfigError,
    load_config_file,
    main,
)


@pytest.fixture
def small_trace(tmp_path):
    rng = np.random.default_rng(0)
    rows = []
    for t in range(3000):
        a, b = rng.integers(0, 40, size=2)
        if a != b:
            rows.append(TraceRow(int(a), int(b), float(t)))
    path = tmp_path / "trace.csv"
    write_trace(rows, path)
    return path


def read_lines(path):
    return path.read_text().splitlines()


class TestRun:
    def test_row_cardinality(self, small_trace, tmp_path):
        out = tmp_path / "out"
        rc = main(
            [
                "run",
                "--dataset", str(small_trace),
                "--n-target", "32",
                "--seeds", ",".join(str(s) for s in range(10)),
                "--outdir", str(out),
            ]
        )
        assert rc == EXIT_OK
        lines = read_lines(out / "results.csv")
        assert lines[0].startswith("# peerselect")
        assert lines[1] == "dataset,seed,chunk,algorithm,mechanism,n,total_cost,ratio_vs_chord"
        assert len(lines) - 2 == 10 * 4  # 1 dataset x 10 seeds x 4 algorithms

    def test_byte_identical_reruns(self, small_trace, tmp_path):
        args = [
            "run",
            "--dataset", str(small_trace),
            "--n-target", "32",
            "--seeds", "0,1,2",
            "--outdir", str(tmp_path / "a"),
        ]
        assert main(args) == EXIT_OK
        first = (tmp_path / "a" / "results.csv").read_bytes()
        args[-1] = str(tmp_path / "b")
        assert main(args) == EXIT_OK
        assert (tmp_path / "b" / "results.csv").read_bytes() == first

    def test_sixteen_alpha_sweep(self, tmp_path):
        alphas = [f"{a:.2f}" for a in np.linspace(1.1, 4.0, 16)]
        out = tmp_path / "out"
        rc = main(
            [
                "run",
                "--zipf-alphas", ",".join(alphas),
                "--zipf-rows", "2000",
                "--n-target", "16",
                "--seeds", "0",
                "--algorithms", "chord,bsb-max",
                "--outdir", str(out),
            ]
        )
        assert rc == EXIT_OK
        lines = read_lines(out / "results.csv")[2:]
        datasets = {line.split(",")[0] for line in lines}
        assert len(datasets) == 16
        assert len(lines) == 32

    def test_chunked_run(self, small_trace, tmp_path):
        out = tmp_path / "out"
        rc = main(
            [
                "run",
                "--dataset", str(small_trace),
                "--n-target", "32",
                "--seeds", "0",
                "--window", "1000",
                "--algorithms", "chord,bsb-half",
                "--outdir", str(out),
                "--plots",
            ]
        )
        assert rc == EXIT_OK
        lines = read_lines(out / "results.csv")[2:]
        chunks = {line.split(",")[2] for line in lines}
        assert chunks == {"0", "1", "2"}
        assert (out / "chunk_ratios.svg").exists()

    def test_empty_chunks_skipped(self, tmp_path):
        trace = tmp_path / "sparse.csv"
        write_trace(
            [TraceRow(0, 1, 0.0), TraceRow(1, 2, 10.0), TraceRow(2, 3, 2500.0)], trace
        )
        out = tmp_path / "out"
        rc = main(
            [
                "run",
                "--dataset", str(trace),
                "--n-target", "4",
                "--seeds", "0",
                "--window", "1200",
                "--algorithms", "chord",
                "--outdir", str(out),
            ]
        )
        assert rc == EXIT_OK
        lines = read_lines(out / "results.csv")[2:]
        assert {line.split(",")[2] for line in lines} == {"0", "2"}

    def test_plots_written(self, tmp_path):
        out = tmp_path / "out"
        rc = main(
            [
                "run",
                "--zipf-alphas", "1.5,3.0",
                "--zipf-rows", "2000",
                "--n-target", "16",
                "--seeds", "0,1",
                "--outdir", str(out),
                "--plots",
            ]
        )
        assert rc == EXIT_OK
        svg = (out / "ratios_boxplot.svg").read_text()
        assert svg.startswith("<?xml")

    def test_timings_csv_has_interface_columns(self, tmp_path):
        out = tmp_path / "out"
        main(
            [
                "run",
                "--zipf-alphas", "2.0",
                "--zipf-rows", "1000",
                "--n-target", "16",
                "--seeds", "0",
                "--outdir", str(out),
            ]
        )
        lines = read_lines(out / "timings.csv")
        assert lines[1] == "dataset,algorithm,mechanism,n,total_cost,ratio_vs_chord,wall_time_ms"

    def test_shortest_path_mechanism_class(self, tmp_path):
        out = tmp_path / "out"
        rc = main(
            [
                "run",
                "--zipf-alphas", "2.0",
                "--zipf-rows", "1000",
                "--n-target", "16",
                "--seeds", "0",
                "--mechanism", "shortest-path",
                "--outdir", str(out),
            ]
        )
        assert rc == EXIT_OK
        lines = read_lines(out / "results.csv")[2:]
        assert all(line.split(",")[4] == "shortest-path" for line in lines)

    def test_window_needs_dataset(self, tmp_path):
        rc = main(
            ["run", "--zipf-alphas", "2.0", "--window", "60", "--outdir", str(tmp_path)]
        )
        assert rc == EXIT_CONFIG

    def test_missing_dataset_is_data_error(self, tmp_path, capsys):
        rc = main(["run", "--dataset", str(tmp_path / "nope.csv"), "--outdir", str(tmp_path)])
        assert rc == EXIT_DATA
        assert "nope.csv" in capsys.readouterr().err

    def test_bad_algorithm_is_config_error(self, small_trace, tmp_path, capsys):
        rc = main(
            ["run", "--dataset", str(small_trace), "--algorithms", "chord,magic", "--outdir", str(tmp_path)]
        )
        assert rc == EXIT_CONFIG
        assert "magic" in capsys.readouterr().err

    def test_dataset_and_zipf_conflict(self, small_trace, tmp_path):
        rc = main(
            ["run", "--dataset", str(small_trace), "--zipf-alphas", "2.0", "--outdir", str(tmp_path)]
        )
        assert rc == EXIT_CONFIG

    def test_config_file_with_flag_override(self, small_trace, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(
            "\n".join(
                [
                    "# experiment",
                    f"dataset = {small_trace}",
                    "n_target = 32",
                    "seeds = 0, 1",
                    "algorithms = chord,bsb-max",
                    f"outdir = {tmp_path / 'from_file'}",
                ]
            )
        )
        rc = main(["run", str(cfg), "--seeds", "5"])
        assert rc == EXIT_OK
        lines = read_lines(tmp_path / "from_file" / "results.csv")[2:]
        assert {line.split(",")[1] for line in lines} == {"5"}

    def test_unknown_config_key(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("turbo = yes\n")
        assert main(["run", str(cfg)]) == EXIT_CONFIG


class TestConfigObjects:
    def test_validate_catches_bad_n(self):
        with pytest.raises(ConfigError, match="n_target"):
            ExperimentConfig(zipf_alphas=(2.0,), n_target=12).validate()

    def test_validate_requires_source(self):
        with pytest.raises(ConfigError, match="dataset"):
            ExperimentConfig().validate()

    def test_hash_ignores_output_location(self):
        a = ExperimentConfig(zipf_alphas=(2.0,), outdir="x")
        b = ExperimentConfig(zipf_alphas=(2.0,), outdir="y")
        assert a.content_hash() == b.content_hash()

    def test_config_file_types(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("zipf_alphas = 1.5, 2.5\nplots = true\nwindow = 60\n")
        values = load_config_file(cfg)
        assert values == {"zipf_alphas": (1.5, 2.5), "plots": True, "window": 60.0}


class TestNtcCommand:
    def test_skewed_below_uniformish(self, tmp_path, capsys):
        paths = {}
        for alpha in ("1.1", "4.0"):
            out = tmp_path / f"z{alpha}.csv"
            assert main(["gen-zipf", "--alpha", alpha, "--rows", "30000", "--n", "64", "--output", str(out)]) == EXIT_OK
            paths[alpha] = out

        def score(path):
            assert main(["ntc", str(path), "--n-target", "64", "--seed", "0"]) == EXIT_OK
            header, row = capsys.readouterr().out.strip().splitlines()
            return float(dict(zip(header.split(","), row.split(",")))["ntc"])

        assert score(paths["4.0"]) < score(paths["1.1"])

    def test_missing_file_named_error(self, tmp_path, capsys):
        rc = main(["ntc", str(tmp_path / "ghost.csv")])
        assert rc == EXIT_DATA
        assert "ghost.csv" in capsys.readouterr().err

    def test_keep_artifacts(self, tmp_path, capsys):
        trace = tmp_path / "t.csv"
        main(["gen-zipf", "--alpha", "2.0", "--rows", "5000", "--n", "16", "--output", str(trace)])
        out = tmp_path / "artifacts"
        rc = main(
            ["ntc", str(trace), "--n-target", "16", "--keep-artifacts", "--outdir", str(out),
             "--output", str(tmp_path / "ntc.csv")]
        )
        assert rc == EXIT_OK
        assert {p.name for p in out.iterdir()} == {"original.deflate", "shuffled.deflate", "random.deflate"}
        assert (tmp_path / "ntc.csv").read_text().count("\n") == 3  # comment + header + row


class TestBenchCommand:
    def test_row_cardinality(self, capsys):
        rc = main(["bench", "--n", "16", "32", "64", "--repetitions", "3"])
        assert rc == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) - 1 == 3 * 4  # header + sizes x algorithms

    def test_chord_has_smallest_median(self, capsys):
        rc = main(["bench", "--n", "64", "--repetitions", "3"])
        assert rc == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()[1:]
        medians = {line.split(",")[0]: float(line.split(",")[3]) for line in lines}
        assert medians["chord"] == min(medians.values())

    def test_too_few_repetitions(self, capsys):
        assert main(["bench", "--n", "16", "--repetitions", "2"]) == EXIT_CONFIG

    def test_non_power_of_two_size(self):
        assert main(["bench", "--n", "48", "--repetitions", "3"]) == EXIT_CONFIG


class TestTopoRouteGenZipf:
    def test_gen_zipf_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert main(["gen-zipf", "--alpha", "1.7", "--rows", "4000", "--n", "32", "--seed", "9", "--output", str(out)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_topo_chord_without_demand(self, tmp_path):
        out = tmp_path / "edges.csv"
        assert main(["topo", "--algorithm", "chord", "--n-target", "16", "--output", str(out)]) == EXIT_OK
        lines = read_lines(out)
        assert lines[0] == "# kind=chord, n=16"

    def test_topo_demand_aware_requires_source(self, tmp_path):
        rc = main(["topo", "--algorithm", "bsb-max", "--output", str(tmp_path / "e.csv")])
        assert rc == EXIT_CONFIG

    def test_topo_from_demand_csv(self, tmp_path):
        from peerselect import save_matrix_csv

        demand = np.zeros((8, 8))
        demand[0, 5] = 3.0
        dpath = tmp_path / "d.csv"
        save_matrix_csv(demand, dpath)
        out = tmp_path / "edges.csv"
        assert main(["topo", "--algorithm", "bsb-max", "--demand", str(dpath), "--output", str(out)]) == EXIT_OK
        assert "0,5" in read_lines(out)

    def test_route_dump_matches_mechanism(self, tmp_path):
        out = tmp_path / "paths.csv"
        rc = main(
            ["route", "--algorithm", "chord", "--n-target", "16", "--output", str(out)]
        )
        assert rc == EXIT_OK
        matrix = load_matrix_csv(out)
        assert matrix.shape == (16, 16)
        assert matrix.max() <= 4

    def test_route_shortest_path_override(self, tmp_path):
        native, lower = tmp_path / "n.csv", tmp_path / "l.csv"
        base = ["route", "--algorithm", "chord", "--n-target", "16"]
        assert main(base + ["--output", str(native)]) == EXIT_OK
        assert main(base + ["--mechanism", "shortest-path", "--output", str(lower)]) == EXIT_OK
        assert (load_matrix_csv(lower) <= load_matrix_csv(native)).all()

    def test_bad_demand_matrix_is_data_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("1,2\n3,4\n")  # nonzero diagonal
        rc = main(["topo", "--algorithm", "bsb-max", "--demand", str(bad), "--output", str(tmp_path / "e.csv")])
        assert rc == EXIT_DATA
