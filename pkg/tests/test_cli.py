import json
import math

import pytest

from cauchy_est._literals import format_complex_literal, parse_complex_literal
from cauchy_est.cli import main
from cauchy_est.errors import DomainError


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestComplexLiterals:
    @pytest.mark.parametrize(
        "text,value",
        [
            ("0+1i", 1j),
            ("-2.5+0.5i", -2.5 + 0.5j),
            ("10-0.5i", 10 - 0.5j),
            ("+3+4i", 3 + 4j),
        ],
    )
    def test_parse(self, text, value):
        assert parse_complex_literal(text) == value

    @pytest.mark.parametrize("bad", ["1", "i", "1+i", "1 + 2i", "1+2j", "a+bi", "1e3+1i"])
    def test_rejects(self, bad):
        with pytest.raises(DomainError):
            parse_complex_literal(bad)

    def test_format_round_trip(self):
        z = -2.5 + 0.5j
        assert parse_complex_literal(format_complex_literal(z)) == z


class TestKlAndRate:
    def test_kl_spot_value(self, capsys):
        code, out, _ = run_cli(capsys, "kl", "--from", "0+2i", "--to", "0+1i")
        assert code == 0
        assert json.loads(out)["kl"] == pytest.approx(math.log(9 / 8))

    def test_kl_circular(self, capsys):
        code, out, _ = run_cli(capsys, "kl", "--circular", "--from", "0+0i", "--to", "0.5+0i")
        assert code == 0
        assert json.loads(out)["kl"] == pytest.approx(math.log(4 / 3))

    def test_rate_location_free(self, capsys):
        _, out1, _ = run_cli(capsys, "rate", "--eps", "1", "--theta", "5+1i")
        _, out2, _ = run_cli(capsys, "rate", "--eps", "1", "--theta", "0+1i")
        assert json.loads(out1)["b"] == json.loads(out2)["b"]

    def test_rate_circular(self, capsys):
        code, out, _ = run_cli(capsys, "rate", "--circular", "--eps", "0.5", "--w", "0+0i")
        assert code == 0
        assert json.loads(out)["b"] == pytest.approx(math.log(4 / 3))

    def test_malformed_literal_exits_one(self, capsys):
        code, _, err = run_cli(capsys, "kl", "--from", "2i", "--to", "0+1i")
        assert code == 1
        assert "cauchy-est:" in err


class TestEstimateCommand:
    def test_hand_example(self, capsys, tmp_path):
        # unicode minus in the input is tolerated
        path = tmp_path / "samples.csv"
        path.write_text("1\n−1\n", encoding="utf-8")
        code, out, _ = run_cli(
            capsys, "estimate", "--input", str(path),
            "--generator", "f3", "--median-adjust=false",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["z"] == [0.0, 1.0]
        assert payload["y"][1] == pytest.approx(1.0)
        assert payload["diagnostics"]["boundary_hit"] is False

    def test_median_adjust_flag_forms(self, capsys, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("-1.0\n1.0\n")
        code, out, _ = run_cli(
            capsys, "estimate", "--input", str(path), "--generator", "f1",
            "--median-adjust",
        )
        assert code == 0
        assert json.loads(out)["z"] == [pytest.approx(0.0), pytest.approx(1.0)]

    def test_degenerate_input_exits_one(self, capsys, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("1.0\n1.0\n")
        code, _, err = run_cli(
            capsys, "estimate", "--input", str(path), "--generator", "f1"
        )
        assert code == 1
        assert "degenerate" in err

    def test_circular_estimate(self, capsys, tmp_path):
        angles = [3.0 * math.pi / 2.0, math.pi / 2.0]
        path = tmp_path / "a.csv"
        path.write_text("".join(f"{a}\n" for a in angles))
        code, out, _ = run_cli(
            capsys, "estimate", "--input", str(path), "--generator", "f3",
            "--circular", "--alpha", "0+1i",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["w"][0] == pytest.approx(0.0, abs=1e-12)
        assert payload["w"][1] == pytest.approx(0.0, abs=1e-12)


class TestMleCommand:
    def test_output_schema(self, capsys, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("0\n1\n2\n3\n")
        code, out, _ = run_cli(capsys, "mle", "--input", str(path))
        assert code == 0
        payload = json.loads(out)
        assert payload["converged"] is True
        assert payload["score_norm"] < 1e-12
        assert payload["theta"][0] == pytest.approx(1.5, abs=1e-6)


class TestSampleCommand:
    def test_deterministic_with_header(self, capsys):
        args = ("sample", "--n", "5", "--theta", "0+1i", "--seed", "42")
        code, out1, _ = run_cli(capsys, *args)
        assert code == 0
        _, out2, _ = run_cli(capsys, *args)
        assert out1 == out2
        lines = out1.strip().split("\n")
        assert lines[0].startswith("# theta=")
        assert "base_seed=42" in lines[0]
        assert len(lines) == 6

    def test_seed_env_fallback(self, capsys, monkeypatch):
        monkeypatch.setenv("CAUCHY_EST_SEED", "7")
        code, out, _ = run_cli(capsys, "sample", "--n", "3", "--theta", "0+1i")
        assert code == 0
        monkeypatch.delenv("CAUCHY_EST_SEED")
        code2, _, err = run_cli(capsys, "sample", "--n", "3", "--theta", "0+1i")
        assert code2 == 1
        assert "--seed" in err

    def test_sample_estimate_round_trip(self, capsys, tmp_path):
        path = tmp_path / "batch.csv"
        code, _, _ = run_cli(
            capsys, "sample", "--n", "200", "--theta", "2+3i",
            "--seed", "11", "--out", str(path),
        )
        assert code == 0
        code, out, _ = run_cli(
            capsys, "estimate", "--input", str(path), "--generator", "f3"
        )
        assert code == 0
        z = json.loads(out)["z"]
        assert abs(complex(z[0], z[1]) - (2 + 3j)) < 1.5  # loose: n=200

    def test_circular_sample(self, capsys):
        code, out, _ = run_cli(
            capsys, "sample", "--n", "4", "--circular", "--w", "0.5+0i", "--seed", "3"
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0].startswith("# circular w=")
        angles = [float(v) for v in lines[1:]]
        assert all(0.0 <= a < 2.0 * math.pi for a in angles)

    def test_shell_pipe_round_trip_deterministic(self):
        import shutil
        import subprocess

        exe = shutil.which("cauchy-est")
        if exe is None:
            pytest.skip("console script not on PATH")
        cmd = (
            f"{exe} sample --n 100 --theta 0+1i --seed 33 | "
            f"{exe} estimate --generator f3"
        )
        runs = [
            subprocess.run(cmd, shell=True, capture_output=True, text=True)
            for _ in range(2)
        ]
        assert all(r.returncode == 0 for r in runs), runs[0].stderr
        assert runs[0].stdout == runs[1].stdout
        assert "z" in json.loads(runs[0].stdout)


class TestSimulateCommands:
    def make_scenarios(self, tmp_path, records):
        path = tmp_path / "scenarios.json"
        path.write_text(json.dumps(records))
        return str(path)

    def test_mse_stdout_and_determinism(self, capsys, tmp_path):
        path = self.make_scenarios(
            tmp_path,
            [{"theta": [0.0, 1.0], "n": 20, "estimator": "one_step",
              "generator": "f3", "replications": 300}],
        )
        args = ("simulate-mse", "--scenarios", path, "--seed", "5", "--workers", "1")
        code, out1, _ = run_cli(capsys, *args)
        assert code == 0
        assert out1.startswith("mu,sigma,n,estimator,generator,")
        _, out2, _ = run_cli(capsys, *args)
        assert out1 == out2
        code, out3, _ = run_cli(
            capsys, "simulate-mse", "--scenarios", path, "--seed", "5", "--workers", "3"
        )
        assert out3 == out1

    def test_mse_file_outputs(self, capsys, tmp_path):
        path = self.make_scenarios(
            tmp_path,
            [{"theta": [0.0, 1.0], "n": 10, "estimator": "mle", "replications": 120}],
        )
        out_csv = tmp_path / "t.csv"
        out_json = tmp_path / "t.json"
        code, out, _ = run_cli(
            capsys, "simulate-mse", "--scenarios", path, "--seed", "2",
            "--out-csv", str(out_csv), "--out-json", str(out_json),
        )
        assert code == 0
        assert out == ""
        assert out_csv.read_text().startswith("mu,")
        assert json.loads(out_json.read_text())[0]["estimator"] == "mle"

    def test_partial_failure_exits_two(self, capsys, tmp_path):
        path = self.make_scenarios(
            tmp_path,
            [
                {"theta": [0.0, 1.0], "n": 10, "estimator": "one_step",
                 "generator": "f3", "replications": 100},
                {"theta": [1000000.0, 0.0001], "n": 2, "estimator": "one_step",
                 "generator": "f1", "replications": 100},
            ],
        )
        code, out, _ = run_cli(
            capsys, "simulate-mse", "--scenarios", path, "--seed", "4", "--workers", "1"
        )
        assert code == 2
        assert "nan" in out

    def test_missing_seed_exits_one(self, capsys, tmp_path, monkeypatch):
        monkeypatch.delenv("CAUCHY_EST_SEED", raising=False)
        path = self.make_scenarios(
            tmp_path,
            [{"theta": [0.0, 1.0], "n": 10, "estimator": "mle", "replications": 100}],
        )
        code, _, err = run_cli(capsys, "simulate-mse", "--scenarios", path)
        assert code == 1
        assert "--seed" in err

    @pytest.mark.filterwarnings("ignore:tail probe")
    def test_tail_command(self, capsys, tmp_path):
        path = self.make_scenarios(
            tmp_path,
            [{"theta": [0.0, 1.0], "n": 10, "eps": 1.0, "estimator": "one_step",
              "generator": "f3", "replications": 500}],
        )
        code, out, _ = run_cli(
            capsys, "simulate-tail", "--scenarios", path, "--seed", "8", "--workers", "1"
        )
        assert code == 0
        header, row = out.strip().split("\n")
        assert header.startswith("mu,sigma,n,eps,")
        assert "one_step" in row


class TestUsageErrors:
    def test_unknown_flag(self, capsys):
        code, _, err = run_cli(capsys, "kl", "--fro", "0+1i", "--to", "0+1i")
        assert code == 1
        assert err.startswith("cauchy-est:")

    def test_unknown_generator(self, capsys, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("1\n2\n")
        code, _, err = run_cli(
            capsys, "estimate", "--input", str(path), "--generator", "f7"
        )
        assert code == 1
        assert "f7" in err

    def test_missing_input_file(self, capsys):
        code, _, err = run_cli(
            capsys, "estimate", "--input", "/nonexistent.csv", "--generator", "f1"
        )
        assert code == 1
