import math
import os

import pytest

from tailkit import cli

TS = ["--timestamp", "2026-01-01T00:00:00+00:00"]


def run(argv):
    return cli.main(argv)


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


def parse_csv(path):
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    manifest = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    header = body[0].split(",")
    rows = [ln.split(",") for ln in body[1:]]
    return manifest, header, rows


class TestBoundsCsv:
    def test_fig1_style_output(self, tmp_path):
        out = tmp_path / "fig1.csv"
        rc = run(
            ["bounds", "--dist", "gaussian", "--mu", "-1.7", "--sigma", "1.9",
             "--side", "right", "--seed", "pdf", "--iters", "4",
             "--x-min", "1", "--x-max", "30", "--points", "20", "--out", str(out)] + TS
        )
        assert rc == 0
        manifest, header, rows = parse_csv(out)
        assert any("command: bounds" in ln for ln in manifest)
        assert header[:6] == ["x", "P_0", "P_1", "P_2", "P_3", "P_4"]
        assert "verdict_4" in header and "threshold_0" in header and "R_3" in header
        assert len(rows) == 20
        verdicts = [rows[0][header.index(f"verdict_{i}")] for i in range(5)]
        assert verdicts == ["U", "L", "U", "L", "U"]

    def test_byte_identical_rerun(self, tmp_path):
        args = ["bounds", "--dist", "beta-prime", "--alpha", "2.1", "--beta", "1.3",
                "--side", "right", "--seed", "shifted-pdf", "--iters", "2",
                "--x-min", "2", "--x-max", "40", "--points", "15"] + TS
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(args + ["--out", str(a)]) == 0
        assert run(args + ["--out", str(b)]) == 0
        assert read(a) == read(b)

    def test_nan_cells_empty(self, tmp_path):
        # window reaching below the Gaussian mean: the seed has no value
        # there, cells stay empty
        out = tmp_path / "nan.csv"
        rc = run(
            ["bounds", "--dist", "gaussian", "--side", "right", "--seed", "pdf",
             "--iters", "1", "--x-min", "-1", "--x-max", "6", "--points", "15",
             "--out", str(out)] + TS
        )
        assert rc == 0
        _, header, rows = parse_csv(out)
        p0 = header.index("P_0")
        assert rows[0][p0] == ""  # x = -1 is left of the pole at the mean
        assert rows[-1][p0] != ""

    def test_seventeen_digit_format(self, tmp_path):
        out = tmp_path / "v.csv"
        run(["bounds", "--dist", "gaussian", "--side", "right", "--seed", "pdf",
             "--iters", "1", "--x-min", "1", "--x-max", "2", "--points", "3",
             "--out", str(out)] + TS)
        _, header, rows = parse_csv(out)
        val = rows[0][header.index("P_0")]
        assert float(val) > 0
        assert len(val.replace("-", "").replace(".", "").replace("e", "").lstrip("0")) >= 16

    def test_no_partial_file_on_error(self, tmp_path):
        out = tmp_path / "never.csv"
        rc = run(["bounds", "--dist", "gaussian", "--side", "left", "--seed", "pdf",
                  "--iters", "2", "--x-min", "1", "--x-max", "5", "--out", str(out)] + TS)
        assert rc == 3  # seed invalid on the right-of-mode window
        assert not out.exists()

    def test_bad_flags_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            run(["bounds", "--dist", "gaussian", "--side", "right"])  # missing x range
        assert exc.value.code == 2

    def test_stdout_mode(self, capsys):
        rc = run(["bounds", "--dist", "gaussian", "--side", "right", "--seed", "pdf",
                  "--iters", "1", "--x-min", "1", "--x-max", "3", "--points", "3"] + TS)
        assert rc == 0
        assert "# command: bounds" in capsys.readouterr().out


class TestAwgnCsv:
    def test_columns_and_oracle_blank_policy(self, tmp_path):
        out = tmp_path / "awgn.csv"
        rc = run(["awgn", "--omega", "1", "--eps", "1e-3",
                  "--n-list", "200,4000", "--oracle", "on", "--out", str(out)] + TS)
        assert rc == 0
        _, header, rows = parse_csv(out)
        assert header == ["n", "lambda_p0", "lambda_p1", "lambda_asym", "r_lower",
                          "r_upper", "r_asym", "r_na", "capacity", "oracle_converse"]
        byn = {int(r[0]): r for r in rows}
        assert byn[200][-1] != ""     # oracle on, below the cap
        assert byn[4000][-1] == ""    # above the oracle cap: blank
        assert float(byn[200][header.index("capacity")]) == 0.5
        oc = float(byn[200][-1])
        assert float(byn[200][4]) <= oc <= float(byn[200][5])

    def test_omega_db(self, tmp_path):
        out = tmp_path / "db.csv"
        rc = run(["awgn", "--omega-db", "0", "--eps", "1e-3",
                  "--n-list", "500", "--out", str(out)] + TS)
        assert rc == 0
        _, header, rows = parse_csv(out)
        assert float(rows[0][header.index("capacity")]) == 0.5  # 0 dB = linear 1

    def test_log_spaced_range(self, tmp_path):
        out = tmp_path / "rng.csv"
        rc = run(["awgn", "--omega", "1", "--eps", "1e-3", "--n-min", "100",
                  "--n-max", "1000", "--n-points", "3", "--out", str(out)] + TS)
        assert rc == 0
        _, _, rows = parse_csv(out)
        ns = [int(r[0]) for r in rows]
        assert ns[0] == 100 and ns[-1] == 1000 and ns[1] == 316


class TestVerifyCommand:
    def test_single_suite_green(self, capsys):
        assert run(["verify", "--suite", "jet"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out

    def test_tol_override_forces_failure(self, capsys):
        rc = run(["verify", "--suite", "jet", "--tol", "jet_product_rule=1e-30"])
        assert rc == 1
        assert "FAIL" in capsys.readouterr().out

    def test_unknown_tol_key(self):
        assert run(["verify", "--suite", "jet", "--tol", "nope=1"]) == 1
