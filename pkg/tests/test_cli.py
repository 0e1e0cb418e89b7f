import csv
import io
import json
import subprocess
import sys

import pytest

from fdrcontrol.cli import load_config, main
from fdrcontrol.exceptions import ParameterError
from fdrcontrol.metrics import exact_fdr_independent
from fdrcontrol.procedures import modified_sidak_fdr_threshold, sidak_fdr_threshold
from fdrcontrol.samplers import TruthAssignment


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestThresholdCommand:
    def test_sidak_fdr_row(self, capsys):
        code, out, _ = run_cli(capsys, "threshold", "--procedure", "sidak-fdr", "--alpha", "0.05", "--n", "100")
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 1
        assert float(rows[0]["threshold"]) == pytest.approx(sidak_fdr_threshold(0.05, 100), abs=1e-4)
        assert float(rows[0]["f0_level"]) == pytest.approx(0.9994871985837377, abs=1e-6)

    def test_modified_table_all_k(self, capsys):
        code, out, _ = run_cli(capsys, "threshold", "--procedure", "modified-sidak-fdr",
                               "--alpha", "0.05", "--n", "10")
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 11
        assert rows[-1]["threshold"] == "inf"
        assert float(rows[3]["threshold"]) == pytest.approx(modified_sidak_fdr_threshold(3, 10, 0.05, 0.0), abs=1e-4)

    def test_modified_single_k(self, capsys):
        code, out, _ = run_cli(capsys, "threshold", "--procedure", "modified-bonferroni-fdr",
                               "--alpha", "0.05", "--n", "100", "--k", "49")
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 1 and rows[0]["k"] == "49"

    def test_fnr_reference_shift(self, capsys):
        code, out, _ = run_cli(capsys, "threshold", "--procedure", "bonferroni-fnr",
                               "--beta", "0.05", "--n", "100", "--reference-shift", "2.5")
        assert code == 0
        rows = parse_csv(out)
        assert rows[0]["procedure"] == "bonferroni_fnr_f1"
        assert float(rows[0]["threshold"]) == pytest.approx(-3.2905267314918945 + 2.5, abs=1e-4)

    def test_missing_level_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "threshold", "--procedure", "sidak-fdr", "--n", "100")
        assert code == 2
        assert err.startswith("error:")

    def test_unknown_procedure(self, capsys):
        code, _, err = run_cli(capsys, "threshold", "--procedure", "holm", "--alpha", "0.05", "--n", "10")
        assert code == 2 and "holm" in err

    def test_json_format(self, capsys):
        code, out, _ = run_cli(capsys, "threshold", "--procedure", "sidak-fdr", "--alpha", "0.05",
                               "--n", "5", "--format", "json")
        assert code == 0
        assert json.loads(out)[0]["n"] == 5


class TestExactCommand:
    def test_matches_library(self, capsys):
        code, out, _ = run_cli(capsys, "exact", "--t", "2.0", "--n", "8", "--n0", "5", "--delta", "1.5")
        assert code == 0
        row = parse_csv(out)[0]
        truth = TruthAssignment.trailing_alternatives(8, 5, 1.5)
        rates = exact_fdr_independent(2.0, truth)
        assert float(row["fdr"]) == pytest.approx(rates.fdr, abs=1e-6)
        assert float(row["fnr"]) == pytest.approx(rates.fnr, abs=1e-6)


@pytest.fixture
def config_file(tmp_path):
    def write(text):
        path = tmp_path / "exp.toml"
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


class TestSimulateCommand:
    MINIMAL = "n = 30\nn0 = 20\ndelta = 0.5\nrho = 0.0\nseed = 3\niterations = 80\n"

    def test_minimal_config_fills_defaults(self, capsys, config_file):
        code, out, _ = run_cli(capsys, "simulate", "--config", config_file(self.MINIMAL))
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 16  # 4 procedures x (FDR, FNR, POWER, AVGPOWER)
        assert {r["procedure"] for r in rows} == {
            "bonferroni_fdr", "modified_bonferroni_fdr", "sidak_fdr", "modified_sidak_fdr"}

    def test_reruns_are_byte_identical(self, capsys, config_file):
        path = config_file(self.MINIMAL)
        _, out1, _ = run_cli(capsys, "simulate", "--config", path)
        _, out2, _ = run_cli(capsys, "simulate", "--config", path)
        assert out1 == out2

    def test_worker_count_invariance(self, capsys, config_file):
        path = config_file(self.MINIMAL.replace("iterations = 80", "iterations = 700"))
        _, out1, _ = run_cli(capsys, "simulate", "--config", path, "--workers", "1")
        _, out2, _ = run_cli(capsys, "simulate", "--config", path, "--workers", "2")
        assert out1 == out2

    def test_seed_flag_overrides_config(self, capsys, config_file):
        path = config_file(self.MINIMAL)
        _, out1, _ = run_cli(capsys, "simulate", "--config", path)
        _, out2, _ = run_cli(capsys, "simulate", "--config", path, "--seed", "4")
        assert out1 != out2
        assert all(row["seed"] == "4" for row in parse_csv(out2))

    def test_unknown_key_named_in_error(self, capsys, config_file):
        path = config_file(self.MINIMAL + "bogus_key = 1\n")
        code, _, err = run_cli(capsys, "simulate", "--config", path)
        assert code == 2 and "bogus_key" in err

    def test_rho_boundary_rejected(self, capsys, config_file):
        path = config_file(self.MINIMAL.replace("rho = 0.0", "rho = 1.0"))
        code, _, err = run_cli(capsys, "simulate", "--config", path)
        assert code == 2 and "rho" in err

    def test_n0_above_n_rejected(self, capsys, config_file):
        path = config_file(self.MINIMAL.replace("n0 = 20", "n0 = 31"))
        code, _, err = run_cli(capsys, "simulate", "--config", path)
        assert code == 2 and "n0" in err

    def test_seed_required_somewhere(self, capsys, config_file):
        path = config_file("n = 30\nn0 = 20\ndelta = 0.5\nrho = 0.0\n")
        code, _, err = run_cli(capsys, "simulate", "--config", path)
        assert code == 2 and "seed" in err

    def test_missing_required_key(self, capsys, config_file):
        path = config_file("n = 30\nn0 = 20\ndelta = 0.5\nseed = 1\n")
        code, _, err = run_cli(capsys, "simulate", "--config", path)
        assert code == 2 and "rho" in err

    def test_malformed_toml(self, capsys, config_file):
        path = config_file("n = = 30\n")
        code, _, err = run_cli(capsys, "simulate", "--config", path)
        assert code == 2 and "parse failure" in err

    def test_missing_file(self, capsys):
        code, _, err = run_cli(capsys, "simulate", "--config", "/nonexistent/exp.toml")
        assert code == 2

    def test_explicit_procedures_list(self, capsys, config_file):
        path = config_file(self.MINIMAL + 'procedures = ["sidak_fnr_f1", "modified_sidak_fnr"]\n')
        code, out, _ = run_cli(capsys, "simulate", "--config", path)
        assert code == 0
        assert {r["procedure"] for r in parse_csv(out)} == {"sidak_fnr_f1", "modified_sidak_fnr"}

    def test_load_config_returns_defaults(self, config_file):
        cfg = load_config(config_file(self.MINIMAL))
        assert cfg.alpha == 0.05 and cfg.tau_quantile == 0.5
        assert cfg.iterations == 80

    def test_unknown_procedure_name(self, config_file):
        with pytest.raises(ParameterError):
            load_config(config_file(self.MINIMAL + 'procedures = ["fisher"]\n'))


class TestSuiteCommands:
    def test_table2_shape_and_out_file(self, capsys, tmp_path):
        out_path = tmp_path / "t2.csv"
        code, out, _ = run_cli(capsys, "table2", "--seed", "5", "--iterations", "20", "--out", str(out_path))
        assert code == 0 and out == ""
        rows = parse_csv(out_path.read_text())
        assert len(rows) == 104  # 96 cells + 8 MaxSE footers
        assert sum(1 for r in rows if r["metric"] == "MAXSE") == 8

    def test_seed_is_mandatory(self, capsys):
        code, _, err = run_cli(capsys, "table2")
        assert code == 2 and "--seed" in err

    def test_figure1_runs(self, capsys):
        code, out, _ = run_cli(capsys, "figure1", "--seed", "5", "--iterations", "20")
        assert code == 0
        metrics = {r["metric"] for r in parse_csv(out)}
        assert metrics == {"POWER", "AVGPOWER"}

    def test_fnr_suite_runs(self, capsys):
        code, out, _ = run_cli(capsys, "fnr-suite", "--seed", "5", "--iterations", "20")
        assert code == 0
        rows = parse_csv(out)
        assert {r["metric"] for r in rows} == {"FNR"}
        assert len(rows) == 24 * 8

    def test_bounds_runs(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--seed", "5", "--iterations", "20")
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 48  # 12 cells x 4 modified procedures
        assert all(float(r["bound"]) <= float(r["cap"]) + 1e-10 for r in rows)


class TestMixtureCommand:
    def test_csv_quantities(self, capsys):
        code, out, _ = run_cli(capsys, "mixture", "--n", "20", "--pi0", "0.6", "--delta", "2.0",
                               "--t", "1.5", "--iterations", "200", "--seed", "9")
        assert code == 0
        rows = parse_csv(out)
        assert [r["quantity"] for r in rows] == [
            "posterior_null_given_exceed", "posterior_alt_given_accept", "q_value", "pfdr", "pfnr"]
        assert all(r["seed"] == "9" for r in rows)

    def test_json_mirror(self, capsys):
        code, out, _ = run_cli(capsys, "mixture", "--n", "10", "--pi0", "0.5", "--delta", "1.0",
                               "--t", "1.0", "--iterations", "50", "--seed", "2", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload[3]["quantity"] == "pfdr"

    def test_bad_pi0_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "mixture", "--n", "10", "--pi0", "1.5", "--delta", "1.0",
                               "--t", "1.0", "--seed", "2")
        assert code == 2


class TestDispatch:
    def test_unknown_subcommand(self, capsys):
        code, _, err = run_cli(capsys, "frobnicate")
        assert code == 2

    def test_unknown_flag(self, capsys):
        code, _, err = run_cli(capsys, "table2", "--seed", "1", "--frobnicate")
        assert code == 2

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "fdrcontrol.cli", "threshold", "--procedure", "bonferroni-fdr",
             "--alpha", "0.05", "--n", "100"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "3.29053" in proc.stdout
