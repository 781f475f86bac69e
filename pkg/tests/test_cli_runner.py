"""
Tests for the graph generators and the command-line runner.
"""
import csv

import numpy as np
import pytest

from scripts.cli_runner import ExperimentConfig, GraphSource, format_value, main, run_experiment
from scripts.errors import GraphGenerationError
from scripts.generators import generate_graph


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


class TestGenerators:

    def test_cycle(self):
        g = generate_graph("cycle_4", seed=1, weights="unit")
        assert g.labels == ("v0", "v1", "v2", "v3")
        assert len(g.edges) == 4
        np.testing.assert_array_equal(g.degree, np.full(4, 2.0))

    def test_path_and_star(self):
        assert generate_graph("path_3", seed=0).diameter() == 2
        star = generate_graph("star_5", seed=0, weights="unit")
        assert star.n == 5
        assert star.degree[0] == 4.0

    def test_complete(self):
        assert len(generate_graph("complete_5", seed=0).edges) == 10

    def test_uniform_weights_in_range(self):
        g = generate_graph("complete_6", seed=3)
        assert np.all((g.edge_w >= 0.5) & (g.edge_w <= 2.0))

    def test_seed_determinism(self):
        first = generate_graph("random_gnp_12_0.4", seed=9)
        second = generate_graph("random_gnp_12_0.4", seed=9)
        assert first.edges == second.edges

    def test_degree_measure(self):
        g = generate_graph("cycle_5", seed=2, theta="deg")
        assert g.theta_is_degree()

    def test_disconnected_gnp(self):
        with pytest.raises(GraphGenerationError):
            generate_graph("random_gnp_5_0", seed=0)

    @pytest.mark.parametrize("spec", ["cycle_2", "star_1", "grid_3", "random_gnp_5"])
    def test_invalid_specs(self, spec):
        with pytest.raises(ValueError):
            generate_graph(spec, seed=0)

    def test_invalid_weight_mode(self):
        with pytest.raises(ValueError):
            generate_graph("path_3", weights="normal")


class TestConfig:

    def test_graph_source_needs_exactly_one(self):
        with pytest.raises(ValueError):
            GraphSource()
        with pytest.raises(ValueError):
            GraphSource(file="a.g", generate="path_3")

    def test_counts_validated(self):
        with pytest.raises(ValueError):
            ExperimentConfig(command="verify-lemma", random=0)

    def test_format_value(self):
        assert format_value(0.1) == "0.1"
        assert format_value(np.float64(1.0) / 3.0) == repr(1.0 / 3.0)
        assert format_value(True) == "true"
        assert format_value(None) == ""


@pytest.mark.integration
class TestCommands:

    def test_verify_identity(self, data_dir, tmp_path):
        code = main(["verify-identity", "--graph", str(data_dir / "graphs" / "path3.g"),
                     "--random-fields", "5", "--out", str(tmp_path)])
        assert code == 0
        rows = read_rows(tmp_path / "verify-identity.csv")
        assert len(rows) == 5
        assert {row["status"] for row in rows} == {"pass"}
        summary = (tmp_path / "summary.txt").read_text()
        assert "continuum chain rule fails" in summary

    def test_simulate(self, data_dir, tmp_path):
        code = main(["simulate", "--problem", str(data_dir / "problems" / "k2_growth.pme"),
                     "--output-points", "10", "--out", str(tmp_path)])
        assert code == 0
        rows = read_rows(tmp_path / "simulate.csv")
        assert len(rows) == 11
        assert float(rows[-1]["t"]) == 0.5
        assert float(rows[-1]["a"]) == pytest.approx(2.0, abs=1e-6)
        assert rows[-1]["hypotheses"] == "true"

    def test_identity_on_field_document(self, data_dir, tmp_path):
        code = main(["verify-identity", "--graph", str(data_dir / "graphs" / "path3.g"),
                     "--field", str(data_dir / "fields" / "path3_ramp.f"), "--out", str(tmp_path)])
        assert code == 0
        rows = read_rows(tmp_path / "verify-identity.csv")
        assert len(rows) == 1
        assert rows[0]["status"] == "pass"
        assert "field: path3_ramp.f" in (tmp_path / "summary.txt").read_text()

    @pytest.mark.parametrize("text", ["f a 1.5\nf b -2.0\nf c 0.7\n", "f a 1.5\nf b 2.0\n", "f a 1.5\nf z 1\n"])
    def test_invalid_field_document_exits_two(self, data_dir, tmp_path, text):
        field = tmp_path / "bad.f"
        field.write_text(text)
        assert main(["verify-identity", "--graph", str(data_dir / "graphs" / "path3.g"),
                     "--field", str(field), "--out", str(tmp_path / "out")]) == 2

    def test_simulate_from_field_document(self, data_dir, tmp_path):
        field = tmp_path / "half.f"
        field.write_text("f a 0.5\nf b 0.5\n")
        code = main(["simulate", "--problem", str(data_dir / "problems" / "k2_growth.pme"),
                     "--field", str(field), "--output-points", "10", "--out", str(tmp_path / "out")])
        assert code == 0
        rows = read_rows(tmp_path / "out" / "simulate.csv")
        # u(t) = 1/(1/u0 − t)
        assert float(rows[0]["a"]) == 0.5
        assert float(rows[-1]["b"]) == pytest.approx(2.0 / 3.0, abs=1e-6)

    def test_simulate_blow_up_exits_two(self, data_dir, tmp_path):
        problem = tmp_path / "blow.pme"
        problem.write_text(
            f"graph {data_dir / 'graphs' / 'k2.g'}\nm=2\ndelta all -1\npsi all 1\nu0 all 1\ntspan 0 2\n"
        )
        assert main(["simulate", "--problem", str(problem), "--scheme", "explicit-rk4",
                     "--output-points", "4", "--substeps", "2", "--out", str(tmp_path / "out")]) == 2

    def test_gradient_on_trajectory(self, data_dir, tmp_path):
        code = main(["verify-gradient-estimate", "--problem", str(data_dir / "problems" / "k2_growth.pme"),
                     "--output-points", "5", "--out", str(tmp_path)])
        assert code == 0
        rows = read_rows(tmp_path / "verify-gradient-estimate.csv")
        assert len(rows) == 2 * 2 * 6
        assert {row["check"] for row in rows} == {"t1", "t2"}

    def test_gradient_on_random_states(self, tmp_path):
        code = main(["verify-gradient-estimate", "--generate", "cycle_6", "--m", "3",
                     "--random-fields", "4", "--out", str(tmp_path)])
        rows = read_rows(tmp_path / "verify-gradient-estimate.csv")
        assert len(rows) == 2 * 6 * 4
        assert all(row["status"] == "pass" for row in rows if row["check"] == "t1")
        assert code == (1 if any(row["status"] == "fail" for row in rows) else 0)
        assert (tmp_path / "graph.g").is_file()

    def test_harnack_worked_example(self, data_dir, tmp_path):
        code = main(["verify-harnack", "--problem", str(data_dir / "problems" / "k2_growth.pme"),
                     "--x", "a", "--y", "b", "--t1", "0", "--t2", "0.5", "--c0", "1",
                     "--out", str(tmp_path)])
        assert code == 0
        rows = {row["check"]: row for row in read_rows(tmp_path / "verify-harnack.csv")}
        assert float(rows["harnack"]["rhs"]) == pytest.approx(2.0 * np.exp(2.75), rel=1e-6)
        assert float(rows["harnack_c0"]["rhs"]) == pytest.approx(36.96, abs=0.01)
        assert rows["harnack"]["path"] == "a-b"

    def test_harnack_unknown_vertex(self, data_dir, tmp_path):
        assert main(["verify-harnack", "--problem", str(data_dir / "problems" / "k2_growth.pme"),
                     "--x", "z", "--out", str(tmp_path)]) == 2

    def test_lemma(self, tmp_path):
        assert main(["verify-lemma", "--random", "20", "--seed", "4", "--out", str(tmp_path)]) == 0
        assert len(read_rows(tmp_path / "verify-lemma.csv")) == 20

    def test_kernel_k2(self, data_dir, tmp_path):
        code = main(["kernel", "--graph", str(data_dir / "graphs" / "k2.g"), "--t", "1.0",
                     "--check-bounds", "--oracle", "--out", str(tmp_path)])
        assert code == 0
        rows = read_rows(tmp_path / "kernel.csv")
        row = next(r for r in rows if (r["x"], r["y"]) == ("a", "b"))
        assert float(row["p"]) == pytest.approx(0.432332, abs=1e-6)

    def test_kernel_lower_bound_violation(self, data_dir, tmp_path):
        code = main(["kernel", "--graph", str(data_dir / "graphs" / "k2.g"), "--t", "0.5",
                     "--check-bounds", "--m", "4", "--out", str(tmp_path)])
        assert code == 1

    def test_empty_graph_file(self, tmp_path):
        empty = tmp_path / "empty.g"
        empty.write_text("")
        assert main(["verify-identity", "--graph", str(empty), "--out", str(tmp_path / "out")]) == 2

    def test_missing_input(self, tmp_path):
        assert main(["simulate", "--out", str(tmp_path)]) == 2

    @pytest.mark.parametrize("args", [
        ["verify-identity", "--generate", "random_gnp_10_0.4", "--seed", "5", "--random-fields", "3"],
        ["simulate", "--problem", "{data}/problems/k2_growth.pme", "--output-points", "10"],
        ["verify-gradient-estimate", "--generate", "cycle_6", "--m", "3", "--random-fields", "3", "--seed", "2"],
        ["verify-harnack", "--problem", "{data}/problems/k2_growth.pme", "--pairs", "random:5",
         "--output-points", "10", "--seed", "3"],
        ["verify-lemma", "--random", "10", "--seed", "4"],
        ["kernel", "--generate", "cycle_5", "--theta", "deg", "--t", "0.5", "1", "--check-bounds", "--seed", "1"],
        ["sweep", "--config", "{tmp}/sweep.yaml", "--seed", "6"],
    ], ids=lambda args: args[0])
    def test_byte_identical_reruns(self, data_dir, tmp_path, args):
        (tmp_path / "sweep.yaml").write_text(
            "experiments:\n"
            "  - name: lemma\n    command: verify-lemma\n    random: 5\n"
            f"  - name: kernel\n    command: kernel\n    graph: {{file: {data_dir / 'graphs' / 'k2.g'}}}\n"
            "  - name: identity\n    command: verify-identity\n    graph: {generate: random_gnp_8_0.5}\n"
        )
        args = [arg.format(data=data_dir, tmp=tmp_path) for arg in args]
        first = main(args + ["--out", str(tmp_path / "one")])
        second = main(args + ["--out", str(tmp_path / "two")])
        assert first == second
        assert first in (0, 1)
        one = sorted(p.relative_to(tmp_path / "one") for p in (tmp_path / "one").rglob("*") if p.is_file())
        two = sorted(p.relative_to(tmp_path / "two") for p in (tmp_path / "two").rglob("*") if p.is_file())
        assert one == two
        assert len(one) >= 2
        for name in one:
            assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()

    def test_run_experiment_directly(self, data_dir, tmp_path):
        config = ExperimentConfig(
            command="kernel",
            graph=GraphSource(file=str(data_dir / "graphs" / "cycle4.g")),
            times=[0.5, 2.0],
            out=str(tmp_path),
        )
        result = run_experiment(config)
        assert result.exit_code == 0
        assert result.counts["pass"] == 2 * 16


@pytest.mark.integration
@pytest.mark.slow
class TestSweep:

    def test_acceptance_sweep(self, data_dir, tmp_path):
        code = main(["sweep", "--config", str(data_dir / "sweeps" / "acceptance.yaml"), "--out", str(tmp_path)])
        assert code == 0
        summary = (tmp_path / "summary.txt").read_text()
        assert "exit: 0" in summary
        for name in ("identity-k2", "identity-random", "gradient-k2", "harnack-k2", "lemma", "kernel-k2"):
            assert (tmp_path / name / "summary.txt").is_file()
        assert (tmp_path / "identity-random" / "graph.g").is_file()

    def test_broken_entry_exits_two(self, tmp_path):
        config = tmp_path / "sweep.yaml"
        config.write_text("experiments:\n  - name: bad\n    command: kernel\n    graph: {file: missing.g}\n")
        assert main(["sweep", "--config", str(config), "--out", str(tmp_path / "out")]) == 2

    def test_missing_experiments(self, tmp_path):
        config = tmp_path / "sweep.yaml"
        config.write_text("seed: 1\n")
        assert main(["sweep", "--config", str(config), "--out", str(tmp_path / "out")]) == 2
