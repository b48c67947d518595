import json

from speccoh.cli import main
from speccoh.cli import test_file as file_test
from speccoh.io import read_panel_binary, write_panel_binary, write_panel_csv
from speccoh.mssc import mssc_test
from speccoh.simulate import Ar1Spec, RngStream, simulate_panel
from conftest import complex_panel


def _run(*argv):
    return main(list(argv))


class TestSimulateVerb:
    def test_writes_readable_panel(self, tmp_path):
        out = tmp_path / "panel.bin"
        code = _run(
            "simulate", "--series", "3", "--samples", "64", "--theta", "0.5",
            "--seed", "7", "--out", str(out), "--format", "binary",
        )
        assert code == 0
        panel = read_panel_binary(out)
        assert (panel.num_series, panel.num_samples) == (3, 64)

    def test_matches_library_call(self, tmp_path):
        out = tmp_path / "panel.bin"
        _run("simulate", "--series", "3", "--samples", "64", "--seed", "7",
             "--out", str(out), "--format", "binary")
        direct = simulate_panel(Ar1Spec(3, 0.5), 64, RngStream(7))
        assert (read_panel_binary(out).data == direct.data).all()


class TestTestVerb:
    def test_binary_round_trip_is_bit_exact(self, tmp_path):
        # writing then testing must agree with the in-memory test exactly,
        # and a strongly coupled pair must be flagged end to end
        panel = simulate_panel(Ar1Spec(4, 0.5, 0.8, "h1loc"), 256, RngStream(3))
        path = tmp_path / "panel.bin"
        write_panel_binary(panel, path)
        from_file = file_test(str(path), "binary", 16, 0.05)
        in_memory = mssc_test(panel, 16, 0.05)
        assert from_file.statistic == in_memory.statistic
        assert from_file.p_value == in_memory.p_value
        assert from_file.reject == in_memory.reject
        assert from_file.argmax == in_memory.argmax
        assert from_file.reject
        assert from_file.argmax[:2] == (0, 1)

    def test_csv_round_trip_is_bit_exact(self, tmp_path, rng):
        panel = complex_panel(rng, 3, 64)
        path = tmp_path / "panel.csv"
        write_panel_csv(panel, path)
        from_file = file_test(str(path), "csv", 8, 0.05)
        in_memory = mssc_test(panel, 8, 0.05)
        assert from_file.statistic == in_memory.statistic

    def test_writes_json_report(self, tmp_path, rng):
        panel = complex_panel(rng, 3, 64)
        path = tmp_path / "panel.csv"
        write_panel_csv(panel, path)
        out = tmp_path / "report.json"
        code = _run("test", "--input", str(path), "--format", "csv",
                    "--span", "8", "--out", str(out))
        assert code == 0
        payload = json.loads(out.read_text())
        assert set(payload) == {"statistic", "threshold", "reject", "p_value", "argmax", "config"}

    def test_lss_requires_null_model(self, tmp_path, rng):
        panel = complex_panel(rng, 3, 64)
        path = tmp_path / "panel.csv"
        write_panel_csv(panel, path)
        code = _run("test", "--input", str(path), "--format", "csv",
                    "--span", "8", "--statistic", "lss-frobenius")
        assert code == 1

    def test_lss_with_calibration(self, tmp_path, rng):
        panel = complex_panel(rng, 3, 64)
        path = tmp_path / "panel.csv"
        write_panel_csv(panel, path)
        report = file_test(str(path), "csv", 8, 0.05, statistic="lss-frobenius",
                           null_theta=0.0, calibration_reps=100, seed=5)
        assert report.p_value is None
        assert report.reject == (report.statistic > report.threshold)

    def test_malformed_csv_exit_code(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("series_1_re,series_1_im\n0.0\n")
        code = _run("test", "--input", str(path), "--format", "csv", "--span", "2")
        assert code == 1
        assert "line 2" in capsys.readouterr().err


class TestExitCodes:
    def test_usage_error(self):
        assert _run("test") == 1

    def test_unknown_flag(self):
        assert _run("simulate", "--bogus", "1") == 1

    def test_odd_span(self, tmp_path, rng):
        panel = complex_panel(rng, 2, 32)
        path = tmp_path / "p.csv"
        write_panel_csv(panel, path)
        assert _run("test", "--input", str(path), "--format", "csv", "--span", "3") == 1

    def test_numerical_failure_code(self):
        # unreachable dependence target maps to exit code 2
        assert _run("calibrate-beta", "--series", "50", "--theta", "0.5",
                    "--variant", "h1loc", "--r-target", "0.4") == 2


class TestCalibrateBetaVerb:
    def test_prints_and_writes(self, tmp_path, capsys):
        out = tmp_path / "beta.json"
        code = _run("calibrate-beta", "--series", "20", "--theta", "0.5",
                    "--variant", "h1glob", "--r-target", "0.01", "--out", str(out))
        assert code == 0
        assert "coupling=" in capsys.readouterr().out
        payload = json.loads(out.read_text())
        assert payload["coupling"] > 0


class TestExperimentVerbs:
    def test_type1_writes_json_and_csv(self, tmp_path):
        out = tmp_path / "t1.json"
        code = _run("type1", "--ladder", "128,16,8", "--reps", "30",
                    "--seed", "3", "--out", str(out))
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["results"][0]["N"] == 128
        csv_text = (tmp_path / "t1.csv").read_text().splitlines()
        assert csv_text[0] == "N,B,M,statistic,rejection_rate,threshold,n_reps"
        assert len(csv_text) == 2

    def test_reports_identical_up_to_timing(self, tmp_path):
        args = ("type1", "--ladder", "128,16,8", "--reps", "30", "--seed", "3")
        out_a, out_b = tmp_path / "a.json", tmp_path / "b.json"
        assert _run(*args, "--out", str(out_a), "--parallel", "1") == 0
        assert _run(*args, "--out", str(out_b), "--parallel", "4") == 0
        a = json.loads(out_a.read_text())
        b = json.loads(out_b.read_text())
        a.pop("timing"), b.pop("timing")
        a.pop("parallelism"), b.pop("parallelism")
        assert a == b

    def test_config_file(self, tmp_path):
        config = {
            "experiment": "power",
            "ladder": [{"N": 128, "B": 16, "M": 8}],
            "alternative": {"kind": "h1loc", "coupling": 0.6},
            "n_reps": 30,
            "calibration_reps": 100,
            "seed": 9,
            "statistics": ["mssc"],
        }
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(config))
        out = tmp_path / "power.json"
        code = _run("power", "--ladder", "ignored,0,0", "--config", str(cfg_path),
                    "--out", str(out))
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["config"]["alternative"]["coupling"] == 0.6

    def test_bad_ladder_string(self):
        assert _run("type1", "--ladder", "128,16") == 1

    def test_roc_csv_layout(self, tmp_path):
        out = tmp_path / "roc.json"
        code = _run("roc", "--ladder", "128,16,8", "--reps", "20", "--seed", "2",
                    "--h1loc", "0.5", "--out", str(out))
        assert code == 0
        header = (tmp_path / "roc.csv").read_text().splitlines()[0]
        assert header == "N,B,M,statistic,fpr,tpr"

    def test_gumbel_fit_csv_layout(self, tmp_path):
        out = tmp_path / "fit.json"
        code = _run("gumbel-fit", "--ladder", "128,16,8", "--reps", "10",
                    "--seed", "2", "--out", str(out))
        assert code == 0
        header = (tmp_path / "fit.csv").read_text().splitlines()[0]
        assert header == "N,B,M,value,ecdf,ks_distance"

    def test_bartlett_gap_runs(self, tmp_path):
        out = tmp_path / "gap.json"
        code = _run("bartlett-gap", "--ladder", "128,16,8", "--reps", "5",
                    "--seed", "2", "--out", str(out))
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["results"][0]["numerator_gap_median"] > 0
