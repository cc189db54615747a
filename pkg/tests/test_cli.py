"""CLI contract tests: headers, exit codes, reproducibility, config merging."""

import csv
import json
import math

import pytest

from harq_ee.cli import main, parse_snr_grid


def run_cli(args):
    return main(args)


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


class TestHeaders:
    """CSV headers are stable API."""

    GOLDEN = {
        "ee": "source,regime,eb_min,eb_min_db,s0,eps_star,a",
        "curve": "snr,r_avg,eb_db",
        "optrate": "snr,rate,eps,r_avg,eb_db",
        "simulate": "t,pmf_analytic,pmf_empirical,stderr",
        "queue": "q,overflow_prob",
    }

    def test_ee_header(self, tmp_path, capsys):
        out = tmp_path / "ee.csv"
        assert run_cli(["ee", "--theta", "0.1", "--out", str(out)]) == 0
        assert out.read_text().splitlines()[0] == self.GOLDEN["ee"]

    def test_curve_header(self, tmp_path):
        out = tmp_path / "curve.csv"
        assert run_cli(["curve", "--snr-grid", "1e-3:1e-2:2", "--out", str(out)]) == 0
        assert out.read_text().splitlines()[0] == self.GOLDEN["curve"]

    def test_optrate_header(self, tmp_path):
        out = tmp_path / "o.csv"
        assert run_cli(["optrate", "--M", "1", "--snr-grid", "0.01:0.01:1", "--out", str(out)]) == 0
        assert out.read_text().splitlines()[0] == self.GOLDEN["optrate"]

    def test_simulate_header(self, tmp_path):
        out = tmp_path / "s.csv"
        assert run_cli(["simulate", "--samples", "1000", "--out", str(out)]) == 0
        assert out.read_text().splitlines()[0] == self.GOLDEN["simulate"]

    def test_queue_header(self, tmp_path):
        out = tmp_path / "q.csv"
        assert run_cli(
            ["queue", "--M", "3", "--blocks", "1000000", "--out", str(out)]
        ) == 0
        assert out.read_text().splitlines()[0] == self.GOLDEN["queue"]


class TestEeCommand:
    def test_small_theta_example(self, tmp_path):
        out = tmp_path / "ee.csv"
        assert run_cli(
            ["ee", "--source", "constant", "--M", "1", "--eps", "0.1",
             "--theta", "1e-9", "--out", str(out)]
        ) == 0
        rows = read_csv(out)
        header, row = rows[0], rows[1]
        val = dict(zip(header, row))
        assert abs(float(val["eb_min_db"]) - 8.639) <= 0.001
        assert val["eps_star"] == "" and val["a"] == ""

    def test_optimal_regime_fills_eps_star(self, tmp_path):
        out = tmp_path / "ee.csv"
        assert run_cli(
            ["ee", "--policy", "optimal", "--M", "1", "--theta", "0.1", "--out", str(out)]
        ) == 0
        val = dict(zip(*read_csv(out)))
        assert abs(float(val["eps_star"]) - (1 - math.exp(-1))) < 1e-5
        assert abs(float(val["eb_min_db"]) - 2.7512) < 0.001


class TestCurveCommand:
    def test_optimal_low_snr_tail(self, tmp_path):
        out = tmp_path / "c.csv"
        assert run_cli(
            ["curve", "--policy", "optimal", "--M", "1", "--theta", "0.1",
             "--snr-grid", "1e-4:1e-4:1", "--out", str(out)]
        ) == 0
        rows = read_csv(out)
        assert abs(float(rows[1][2]) - 2.751) < 0.01


class TestExitCodes:
    def test_validation_error_no_output_file(self, tmp_path, capsys):
        out = tmp_path / "never.csv"
        assert run_cli(["ee", "--eps", "1.5", "--out", str(out)]) == 2
        assert not out.exists()
        assert "invalid" in capsys.readouterr().err

    def test_numeric_failure(self, tmp_path, capsys, monkeypatch):
        # exit-code mapping for the numeric-failure family
        from harq_ee import cli
        from harq_ee.errors import BracketError

        def boom(cfg):
            raise BracketError("three-point condition violated")

        monkeypatch.setitem(cli._COMMANDS, "optrate", boom)
        out = tmp_path / "never.csv"
        code = run_cli(["optrate", "--out", str(out)])
        assert code == 3
        assert not out.exists()
        assert "numeric" in capsys.readouterr().err

    def test_unknown_config_key(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"misspelled": 1}))
        assert run_cli(["ee", "--config", str(cfg)]) == 2

    def test_malformed_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{not json")
        assert run_cli(["ee", "--config", str(cfg)]) == 2

    def test_missing_config(self):
        assert run_cli(["ee", "--config", "/nonexistent/cfg.json"]) == 2


class TestReproducibility:
    def test_byte_identical_simulate(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["simulate", "--M", "3", "--samples", "50000", "--seed", "9"]
        assert run_cli(args + ["--out", str(a)]) == 0
        assert run_cli(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_byte_identical_json(self, tmp_path):
        # identical config (including the output path) must give identical bytes
        out = tmp_path / "a.json"
        args = ["curve", "--snr-grid", "1e-3:1:5", "--format", "json", "--out", str(out)]
        assert run_cli(args) == 0
        first = out.read_bytes()
        assert run_cli(args) == 0
        assert out.read_bytes() == first

    def test_thread_env_does_not_change_output(self, tmp_path, monkeypatch):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["simulate", "--M", "3", "--samples", "50000", "--seed", "9"]
        assert run_cli(args + ["--out", str(a)]) == 0
        monkeypatch.setenv("HARQ_EE_THREADS", "4")
        assert run_cli(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestJsonMirror:
    def test_rows_match_csv(self, tmp_path):
        c, j = tmp_path / "x.csv", tmp_path / "x.json"
        args = ["curve", "--snr-grid", "1e-3:1e-1:4", "--M", "3"]
        assert run_cli(args + ["--out", str(c)]) == 0
        assert run_cli(args + ["--format", "json", "--out", str(j)]) == 0
        doc = json.loads(j.read_text())
        csv_rows = read_csv(c)[1:]
        assert doc["columns"] == read_csv(c)[0]
        assert doc["version"]
        assert doc["config"]["M"] == 3
        for crow, jrow in zip(csv_rows, doc["rows"]):
            assert float(crow[0]) == pytest.approx(jrow[0], rel=1e-12)
            assert float(crow[1]) == pytest.approx(jrow[1], rel=1e-12)
            # db column is 6-decimal rounded in both renderings
            assert float(crow[2]) == pytest.approx(jrow[2], abs=1e-6)


class TestConfigMerging:
    def test_flags_override_file(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"M": 3, "eps": 0.3}))
        out = tmp_path / "a.csv"
        assert run_cli(
            ["ee", "--config", str(cfg), "--eps", "0.1", "--theta", "0.1", "--out", str(out)]
        ) == 0
        out2 = tmp_path / "b.csv"
        assert run_cli(["ee", "--M", "3", "--eps", "0.1", "--theta", "0.1", "--out", str(out2)]) == 0
        assert out.read_text() == out2.read_text()


class TestSnrGrid:
    def test_log_spacing(self):
        grid = parse_snr_grid("1e-4:1e-2:3")
        assert grid == pytest.approx([1e-4, 1e-3, 1e-2], rel=1e-12)

    def test_linear_spacing(self):
        assert parse_snr_grid("1:3:3:lin") == pytest.approx([1.0, 2.0, 3.0])

    def test_single_point(self):
        assert parse_snr_grid("0.5:2:1") == [0.5]

    def test_malformed(self):
        for text in ("1:2", "2:1:5", "1:2:0", "1:2:3:cubic"):
            with pytest.raises(ValueError):
                parse_snr_grid(text)
