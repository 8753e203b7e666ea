import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from cli.cli import app
from verifier.suites import SuiteReport, cardinality_suite
from verifier.verifier import run_verification

ROOT = Path(__file__).parent.parent
FIXTURES = ROOT / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

runner = CliRunner()


@pytest.fixture
def config(tmp_path: Path) -> Path:
    path = tmp_path / "config.json"
    path.write_text(json.dumps({
        "debug": False,
        "log_to_file": False,
        "verify_params": {
            "trials": 3,
            "forms_trials": 5,
            "seed": 17,
            "max_order": 3,
            "dims": "2,2",
            "partition_max_cardinality": 4,
            "parallel": True
        }
    }), encoding="utf-8")
    return path


def invoke(config: Path, *args: str):
    return runner.invoke(app, ["--config", str(config), *args])


def fixture(name: str) -> str:
    return str(FIXTURES / name)


def entries(payload: dict) -> dict[tuple[int, ...], object]:
    return {tuple(entry["index"]): entry["value"] for entry in payload["entries"]}


class TestPartitions:
    def test_counts_of_worked_example(self, config):
        result = invoke(config, "partitions", "--alpha", "[2,1]", "-k", "2", "--counts-only")

        assert result.exit_code == 0, result.stderr
        assert json.loads(result.stdout) == {"distinct": 2, "cardinality": 3, "stirling2": 3}

    def test_labels_form_matches_vector_form(self, config):
        by_vector = invoke(config, "partitions", "--alpha", "[2,1]", "-k", "2")
        by_labels = invoke(config, "partitions", "--labels", "2,1,1", "-k", "2")

        assert by_vector.exit_code == by_labels.exit_code == 0
        assert by_vector.stdout == by_labels.stdout

    def test_single_partition(self, config):
        result = invoke(config, "partitions", "--alpha", "[1]", "-k", "1")

        assert json.loads(result.stdout)["entries"] == [{"blocks": [[1]], "multiplicity": "1"}]

    def test_stirling_count(self, config):
        result = invoke(config, "partitions", "--alpha", "[4]", "-k", "2", "--counts-only")

        assert json.loads(result.stdout)["cardinality"] == 7

    def test_out_of_range_k_is_empty(self, config):
        result = invoke(config, "partitions", "--alpha", "[1,1]", "-k", "5")

        assert result.exit_code == 0
        assert json.loads(result.stdout)["entries"] == []
        assert json.loads(result.stdout)["k"] == 5

    def test_negative_k_is_a_usage_error(self, config):
        result = invoke(config, "partitions", "--alpha", "[1,1]", "-k", "-1")

        assert result.exit_code == 2
        assert result.stdout == ""

    @pytest.mark.parametrize("args", [
        ["--alpha", "[2,"],
        ["--alpha", "{\"mult\": [1]}"],
        ["--alpha", "[-1]"],
        ["--labels", "1,x"],
        ["--labels", "1,3", "--dim", "2"],
        ["--alpha", "[1]", "--labels", "1"],
        [],
    ])
    def test_bad_indices_exit_with_usage_error(self, config, args):
        result = invoke(config, "partitions", *args, "-k", "1")

        assert result.exit_code == 2
        assert result.stdout == ""


class TestExpand:
    @pytest.mark.parametrize("args, golden", [
        (["--labels", "1", "-c", "1"], "expand_order1.txt"),
        (["--alpha", "[1,1]", "-c", "2"], "expand_order2.txt"),
        (["--alpha", "[1,1,1]", "-c", "3"], "expand_order3.txt"),
    ])
    def test_matches_golden_rendering(self, config, args, golden):
        result = invoke(config, "expand", *args)

        assert result.exit_code == 0, result.stderr
        assert result.stdout == (GOLDEN / golden).read_text(encoding="utf-8")

    def test_json_rendering(self, config):
        result = invoke(config, "expand", "--alpha", "[1,1]", "-c", "2", "--format", "json")
        payload = json.loads(result.stdout)

        assert payload["alpha"] == [1, 1]
        assert len(payload["terms"]) == 6

    @pytest.mark.parametrize("args", [["--alpha", "[0,0]", "-c", "1"], ["--alpha", "[1]", "-c", "0"]])
    def test_invalid_requests(self, config, args):
        assert invoke(config, "expand", *args).exit_code == 2


class TestCompose:
    def test_square_of_cube(self, config):
        result = invoke(config, "compose", fixture("f_square.json"), fixture("g_cube.json"), "-n", "2")

        assert result.exit_code == 0, result.stderr
        assert entries(json.loads(result.stdout)) == {(0,): "1", (1,): "6", (2,): "30"}

    def test_identity_echoes_f(self, config):
        result = invoke(config, "compose", fixture("f_plane.json"), fixture("g_identity.json"), "-n", "2")

        f_jet = json.loads((FIXTURES / "f_plane.json").read_text(encoding="utf-8"))
        assert entries(json.loads(result.stdout)) == entries(f_jet)

    def test_fourth_order_fixture(self, config):
        result = invoke(config, "compose", fixture("f_fourth_power.json"), fixture("g_quadratic.json"), "-n", "4")

        assert entries(json.loads(result.stdout)) == {
            (0,): "16", (1,): "96", (2,): "496", (3,): "2160", (4,): "7704"
        }

    def test_float_mode(self, config):
        result = invoke(config, "--mode", "float", "compose", fixture("f_square.json"), fixture("g_cube.json"), "-n", "2")
        payload = json.loads(result.stdout)

        assert payload["mode"] == "float"
        assert entries(payload)[(2,)] == 30.0

    @pytest.mark.parametrize("f_name, g_name, n", [
        ("f_plane.json", "g_cube.json", "1"),
        ("f_square.json", "g_cube.json", "3"),
        ("f_square.json", "g_cube.json", "0"),
        ("missing.json", "g_cube.json", "1"),
        ("g_cube.json", "g_cube.json", "1"),
    ])
    def test_inconsistent_inputs(self, config, f_name, g_name, n):
        result = invoke(config, "compose", fixture(f_name), fixture(g_name), "-n", n)

        assert result.exit_code == 2
        assert "Error:" in result.stderr


class TestFaa1d:
    def test_first_order(self, config):
        result = invoke(config, "faa1d", "1")

        assert json.loads(result.stdout) == {"n": 1, "terms": [{"k": 1, "m": [1], "coefficient": "1"}]}

    def test_fourth_order(self, config):
        terms = json.loads(invoke(config, "faa1d", "4").stdout)["terms"]

        assert len(terms) == 5
        assert sum(int(term["coefficient"]) for term in terms) == 15

    def test_text_table(self, config):
        result = invoke(config, "faa1d", "2", "--format", "text")

        assert result.stdout == "k=1  m=(0,1)  coefficient=1\nk=2  m=(2,0)  coefficient=1\n"

    @pytest.mark.parametrize("n", ["0", "13", "-1"])
    def test_order_out_of_range(self, config, n):
        assert invoke(config, "faa1d", "--", n).exit_code == 2


class TestVerify:
    def test_small_run_passes_and_is_deterministic(self, config):
        first = invoke(config, "verify")
        second = invoke(config, "verify")

        assert first.exit_code == 0, first.stdout
        assert first.stdout == second.stdout

        report = json.loads(first.stdout)
        assert report["passed"] is True
        assert report["seed"] == 17
        assert report["first_counterexample"] is None

    def test_flags_override_configuration(self, config):
        result = invoke(config, "--mode", "float", "verify", "--trials", "2", "--seed", "3", "--max-order", "2",
                        "--dims", "1,2")
        report = json.loads(result.stdout)

        assert result.exit_code == 0
        assert (report["mode"], report["seed"], report["max_order"], report["dims"]) == ("float", 3, 2, [1, 2])
        assert report["worst_float_error"] <= 1e-9

    def test_bad_flags(self, config):
        assert invoke(config, "verify", "--dims", "2").exit_code == 2
        assert invoke(config, "verify", "--trials", "0").exit_code == 2

    def test_interrupted_run_exits_with_mismatch_code(self, config, monkeypatch):
        settings = json.loads(config.read_text(encoding="utf-8"))
        settings["verify_params"]["parallel"] = False
        config.write_text(json.dumps(settings), encoding="utf-8")

        def interrupting(params, mode, stop, logger):
            if not stop.is_set():
                raise KeyboardInterrupt
            report = SuiteReport("interrupting")
            report.interrupt()
            return report

        monkeypatch.setattr(
            "cli.cli.run_verification",
            lambda params, mode: run_verification(params, mode, suites=(("cardinality", cardinality_suite),
                                                                        ("interrupting", interrupting)))
        )
        result = invoke(config, "verify")
        report = json.loads(result.stdout)

        assert result.exit_code == 1
        assert report["passed"] is False
        assert report["interrupted"] is True
        assert [suite["passed"] for suite in report["suites"]] == [True, False]


class TestGlobalFlags:
    def test_output_file(self, config, tmp_path):
        target = tmp_path / "out" / "table.json"
        result = invoke(config, "--output", str(target), "faa1d", "3")

        assert result.exit_code == 0
        assert result.stdout == ""
        assert json.loads(target.read_text(encoding="utf-8"))["n"] == 3

    def test_output_directory_is_rejected(self, config, tmp_path):
        assert invoke(config, "--output", str(tmp_path), "faa1d", "3").exit_code == 2

    def test_malformed_config(self, tmp_path):
        broken = tmp_path / "broken.json"
        broken.write_text("{not json", encoding="utf-8")

        result = runner.invoke(app, ["--config", str(broken), "faa1d", "1"])
        assert result.exit_code == 2

    def test_missing_config_uses_defaults(self, tmp_path):
        result = runner.invoke(app, ["--config", str(tmp_path / "absent.json"), "faa1d", "1"])

        assert result.exit_code == 0
        assert "not found" in result.stderr

    def test_unknown_mode(self, config):
        assert invoke(config, "--mode", "complex", "faa1d", "1").exit_code == 2
