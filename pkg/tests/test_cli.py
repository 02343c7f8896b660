"""CLI contract: outputs, exit codes, rational flags, reproducible files."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from weylsums.cli import main, rational
from weylsums.serialize import read_binary_grid


def run_cli(*args):
    """In-process invocation capturing stdout."""
    import contextlib
    import io

    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = main(list(args))
    return code, out.getvalue()


class TestEval:
    def test_trivial_point(self):
        code, out = run_cli("eval", "--N", "5", "--x", "0", "--t", "0")
        assert code == 0 and out.strip() == "5 0"

    def test_rational_flag_routes_exact(self):
        code, out = run_cli("eval", "--N", "12", "--x", "1/3", "--t", "1/3")
        re_s, im_s = out.split()
        assert code == 0
        assert math.hypot(float(re_s), float(im_s)) == pytest.approx(
            12 / math.sqrt(3), abs=1e-9)

    def test_naive_route(self):
        code, out = run_cli("eval", "--N", "7", "--x", "0.3", "--t", "0.4",
                            "--naive")
        code2, out2 = run_cli("eval", "--N", "7", "--x", "0.3", "--t", "0.4")
        a = complex(*map(float, out.split()))
        b = complex(*map(float, out2.split()))
        assert code == code2 == 0 and abs(a - b) < 1e-9 * 7

    def test_bad_n_exits_2(self):
        code, _ = run_cli("eval", "--N", "0", "--x", "0", "--t", "0")
        assert code == 2


def test_rational_parser():
    from fractions import Fraction
    assert rational("1/3") == Fraction(1, 3)
    assert rational("0.25") == 0.25
    with pytest.raises(ValueError):
        rational("x/y")


def test_unknown_flag_exits_2():
    proc = subprocess.run(
        [sys.executable, "-m", "weylsums.cli", "eval", "--N", "4", "--x", "0",
         "--t", "0", "--bogus"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
    assert "--bogus" in proc.stderr


class TestGrid:
    def test_csv_and_binary(self, tmp_path):
        csv_path = tmp_path / "g.csv"
        code, _ = run_cli("grid", "x", "--N", "8", "--t", "0.3", "--count", "16",
                          "--out", str(csv_path))
        assert code == 0
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "index,node,re,im,modulus"
        assert len(lines) == 17

        bin_path = tmp_path / "g.bin"
        code, _ = run_cli("grid", "t", "--N", "4", "--x", "1/3", "--count", "32",
                          "--format", "bin", "--out", str(bin_path))
        assert code == 0
        N, count, axis, fixed, vals = read_binary_grid(bin_path)
        assert (N, count, axis) == (4, 32, "t")
        assert fixed == pytest.approx(1 / 3)
        from weylsums.evaluate import eval_t_grid
        assert np.allclose(vals, eval_t_grid(4, rational("1/3"), 32))

    def test_rerun_byte_identical(self, tmp_path):
        p = tmp_path / "g.csv"
        run_cli("grid", "x", "--N", "8", "--t", "0.3", "--count", "16",
                "--out", str(p))
        first = p.read_bytes()
        run_cli("grid", "x", "--N", "8", "--t", "0.3", "--count", "16",
                "--out", str(p))
        assert p.read_bytes() == first

    def test_missing_fixed_coordinate(self):
        code, _ = run_cli("grid", "x", "--N", "8", "--count", "16",
                          "--out", "/tmp/nope.csv")
        assert code == 2


class TestMaxfnAndNorm:
    def test_single_x(self):
        code, out = run_cli("maxfn", "--N", "32", "--x", "0", "--tolerance",
                            "0.05")
        sup, t_star, under = out.split()
        assert code == 0
        assert float(sup) == pytest.approx(32.0, abs=1e-6)
        assert float(under) <= 0.05 * 32**0.75

    def test_profile_files(self, tmp_path):
        csv_p = tmp_path / "p.csv"
        json_p = tmp_path / "p.json"
        code, _ = run_cli("maxfn", "--N", "16", "--M", "16", "--out", str(csv_p),
                          "--json", str(json_p))
        assert code == 0
        obj = json.loads(json_p.read_text())
        assert obj["N"] == 16 and "certificate" in obj
        assert csv_p.read_text().splitlines()[0] == "x,sup,t_star,cell_width"

    def test_norm_prints_value(self):
        code, out = run_cli("norm", "--N", "16", "--p", "4")
        assert code == 0
        v = float(out)
        assert 16**0.75 * 0.5 < v < 16.0


class TestClassifyAndArcs:
    def test_classify_output(self):
        code, out = run_cli("classify", "--t", "1/2", "--N", "256", "--alpha",
                            "0.75")
        assert code == 0
        assert "approximant=1/2" in out and "m=4" in out and "passes=True" in out

    def test_major_arcs_csv(self, tmp_path):
        p = tmp_path / "arcs.csv"
        code, out = run_cli("arcs", "major", "--N", "100", "--q-max", "3",
                            "--out", str(p))
        assert code == 0 and "4 boxes" in out
        assert len(p.read_text().splitlines()) == 5

    def test_jarnik_csv(self, tmp_path):
        p = tmp_path / "j.csv"
        code, _ = run_cli("arcs", "jarnik", "--beta", "1", "--q-lo", "3",
                          "--q-hi", "3", "--out", str(p))
        assert code == 0
        assert len(p.read_text().splitlines()) == 3


class TestLevelsetAndCollection:
    def test_levelset_measure(self, tmp_path):
        p = tmp_path / "ls.csv"
        code, out = run_cli("levelset", "--N", "32", "--alpha", "0.9",
                            "--out", str(p))
        assert code == 0 and float(out) > 0.0
        assert p.exists()

    def test_collection_chain(self, tmp_path):
        coll_p = tmp_path / "coll.json"
        code, out = run_cli("collection", "build", "--N", "64", "--alpha", "0.8",
                            "--out", str(coll_p))
        assert code == 0
        code, out = run_cli("collection", "verify", "--in", str(coll_p))
        assert code == 0 and "one-dimensional" in out
        part_p = tmp_path / "part.json"
        code, out = run_cli("collection", "partition", "--in", str(coll_p),
                            "--out", str(part_p))
        assert code == 0 and "classes=" in out
        code, out = run_cli("collection", "count", "--in", str(coll_p),
                            "--epsilon", "0.05")
        assert code == 0 and out.startswith("count=")


class TestChecks:
    def test_major_arc_gauss(self):
        code, out = run_cli("check", "major-arc", "--N", "300", "--q", "5",
                            "--a", "1", "--b", "1")
        assert code == 0
        ratio = float(out.split("ratio=")[1])
        assert abs(ratio - 1.0) <= 1e-8

    def test_sharpness(self):
        code, out = run_cli("check", "sharpness", "--N", "128")
        assert code == 0 and "passes=True" in out

    def test_bourgain_single_and_sweep(self):
        code, out = run_cli("check", "bourgain", "--N", "64", "--x", "0.3",
                            "--t", "0")
        assert code == 0 and "q=1" in out
        code, out = run_cli("check", "bourgain", "--N", "64", "--sweep",
                            "--samples", "50", "--seed", "5")
        assert code == 0 and "seed=5" in out

    def test_completion_prints_seed(self):
        code, out = run_cli("check", "completion", "--N", "32", "--M", "32",
                            "--samples", "20", "--seed", "9")
        assert code == 0 and "seed=9" in out

    def test_check_record_files(self, tmp_path):
        p = tmp_path / "rec.csv"
        code, _ = run_cli("check", "completion", "--N", "32", "--M", "32",
                          "--samples", "20", "--seed", "9", "--out", str(p))
        assert code == 0
        assert len(p.read_text().splitlines()) == 21
        summary = json.loads((tmp_path / "rec.csv.json").read_text())
        assert summary["seed"] == 9 and "params_hash" in summary

    def test_jarnik_sandwich(self):
        code, out = run_cli("check", "jarnik", "--alpha", "0.8", "--q", "10007")
        assert code == 0 and "N_q=" in out

    def test_jarnik_small_q_fails_validation(self):
        code, _ = run_cli("check", "jarnik", "--alpha", "0.8", "--q", "101")
        assert code == 2


class TestCampaign:
    def test_smoke_and_report(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({
            "N_list": [32, 64, 128], "alpha_list": [0.9], "tolerance": 0.4,
            "q_list": [1, 2, 4], "output_dir": str(tmp_path / "out"),
        }))
        code, out = run_cli("campaign", "--config", str(cfg), "--seed", "77")
        assert code == 0
        assert "seed=77" in out
        assert (tmp_path / "out" / "summary.json").exists()
        assert (tmp_path / "out" / "plot.csv").exists()
        code, out = run_cli("report", "--dir", str(tmp_path / "out"))
        assert code == 0 and "maximal_norm" in out and "slope" in out
