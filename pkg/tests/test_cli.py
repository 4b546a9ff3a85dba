import json
import math
import os

import numpy as np
import pytest

from trikurve.cli import main
from trikurve import csvio
from trikurve.geometry import BCV, SpaceForm2, SpaceForm3, ProductWithLine, \
    RuledSurfaceR3


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


class TestClassifyCommands:
    def test_spaceform_circle(self, capsys):
        code, out = run(["classify", "spaceform", "--rho", "1",
                         "--tau0", "0"], capsys)
        assert code == 0
        assert "1.41421" in out

    def test_h2xr_empty(self, capsys):
        code, out = run(["classify", "bcv", "--a", "-1", "--b", "0",
                         "--alpha0", "1.0"], capsys)
        assert code == 0
        assert "H^2 x R admits no proper" in out
        assert "BcvHopfHelix" not in out

    def test_surface_negative(self, capsys):
        code, out = run(["classify", "surface", "--ks", "-2"], capsys)
        assert code == 0
        assert out.count("Geodesic") == 1

    def test_degenerate_exit_3(self, capsys):
        code, _ = run(["classify", "bcv", "--a", "1", "--b", "2",
                       "--alpha0", "1.0"], capsys)
        assert code == 3

    def test_usage_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["classify", "nonsense"])
        assert exc.value.code == 2

    def test_roots_table(self, capsys, tmp_path):
        j = tmp_path / "roots.json"
        code, out = run(["roots", "--a", "1", "--b", "0",
                         "--alpha0", repr(math.pi / 2), "--json", str(j)],
                        capsys)
        assert code == 0
        assert "2.82842712475" in out
        data = json.loads(j.read_text())
        assert len(data) == 1
        assert math.isclose(data[0]["zeta"], 2.0 * math.sqrt(2.0),
                            rel_tol=1e-12)


class TestReconstructVerify:
    def test_theorem_loop_and_negative_control(self, capsys, tmp_path):
        curve_path = tmp_path / "alpha.csv"
        code, _ = run(["reconstruct", "--profile", "theorem-existence",
                       "--c1", "0", "--c2", "0", "--s0", "1", "--s1", "2",
                       "--step", "1e-4", "--out", str(curve_path)], capsys)
        assert code == 0
        code, out = run(["verify", "--surface", "ruled",
                         "--curve", str(curve_path), "--tol", "1e-6",
                         "--stride", "20"], capsys)
        assert code == 0
        summary = json.loads(out.strip().splitlines()[-1])
        assert summary["passed"]
        assert summary["surface_res1_max"] < 1e-9

        # corrupt one coordinate by 1e-2 at a sample on the stride grid
        lines = curve_path.read_text().splitlines()
        parts = lines[2001].split(",")       # data index 2000 = 100 * 20
        parts[1] = repr(float(parts[1]) + 1e-2)
        lines[2001] = ",".join(parts)
        bad = tmp_path / "bad.csv"
        bad.write_text("\n".join(lines) + "\n")
        code, out = run(["verify", "--surface", "ruled", "--curve",
                         str(bad), "--tol", "1e-6", "--stride", "20"],
                        capsys)
        assert code == 1

    def test_manifold_verify_order3(self, capsys, tmp_path):
        out_dir = tmp_path
        code, _ = run(["parametrize", "heisenberg", "--b", "1.5",
                       "--alpha0", "2.6", "--s1", "6.0", "--step", "1e-3",
                       "--out", str(out_dir)], capsys)
        assert code == 0
        code, out = run(["verify",
                         "--manifold", '{"kind":"bcv","a":0.0,"b":1.5}',
                         "--curve", str(out_dir / "heisenberg.csv"),
                         "--order", "3", "--tol", "1e-3", "--stride", "40"],
                        capsys)
        assert code == 0

    def test_flow_smoke(self, capsys, tmp_path):
        code, out = run(["flow", "--rho", "1.0", "--kappa0", "1.2",
                         "--vertices", "32", "--max-iters", "40",
                         "--grad-tol", "1e-12", "--out", str(tmp_path)],
                        capsys)
        assert code == 0
        assert (tmp_path / "flow_log.csv").exists()
        assert (tmp_path / "flow_final.csv").exists()
        log = (tmp_path / "flow_log.csv").read_text().splitlines()
        assert log[0] == "iter,energy,grad_norm,step"


class TestDeterminismAndConfig:
    def test_sweep_seeded_identical(self, capsys, tmp_path):
        d1, d2 = tmp_path / "r1", tmp_path / "r2"
        for d in (d1, d2):
            code, _ = run(["sweep", "roots", "--random", "6", "--seed", "7",
                           "--out", str(d)], capsys)
            assert code == 0
        b1 = (d1 / "sweep_roots.csv").read_bytes()
        b2 = (d2 / "sweep_roots.csv").read_bytes()
        assert b1 == b2

    def test_parametrize_byte_identical(self, capsys, tmp_path):
        d1, d2 = tmp_path / "p1", tmp_path / "p2"
        for d in (d1, d2):
            code, _ = run(["parametrize", "heisenberg", "--b", "-1.0",
                           "--alpha0", "0.8", "--zeta", "1.25",
                           "--s1", "2.0", "--step", "1e-3",
                           "--out", str(d)], capsys)
            assert code == 0
        assert (d1 / "heisenberg.csv").read_bytes() == \
            (d2 / "heisenberg.csv").read_bytes()
        assert (d1 / "heisenberg.json").read_bytes() == \
            (d2 / "heisenberg.json").read_bytes()

    def test_config_precedence(self, capsys, tmp_path, monkeypatch):
        curve_path = tmp_path / "c.csv"
        run(["reconstruct", "--profile", "constant", "--kappa0", "1.0",
             "--tau0", "0.0", "--s0", "0", "--s1", "3", "--step", "1e-3",
             "--out", str(curve_path)], capsys)
        cfg = tmp_path / "trikurve.cfg"
        cfg.write_text("tol = 0.125\nstride = 20\n")

        # config file value
        code, out = run(["--config", str(cfg), "verify", "--surface",
                         "ruled", "--profile", "constant", "--kappa0", "1.0",
                         "--tau0", "0.0", "--curve", str(curve_path)],
                        capsys)
        assert json.loads(out.strip().splitlines()[-1])["tol"] == 0.125

        # environment beats config
        monkeypatch.setenv("TRIKURVE_TOL", "0.25")
        code, out = run(["--config", str(cfg), "verify", "--surface",
                         "ruled", "--profile", "constant", "--kappa0", "1.0",
                         "--tau0", "0.0", "--curve", str(curve_path)],
                        capsys)
        assert json.loads(out.strip().splitlines()[-1])["tol"] == 0.25

        # flag beats environment
        code, out = run(["--config", str(cfg), "verify", "--surface",
                         "ruled", "--profile", "constant", "--kappa0", "1.0",
                         "--tau0", "0.0", "--curve", str(curve_path),
                         "--tol", "0.5"], capsys)
        assert json.loads(out.strip().splitlines()[-1])["tol"] == 0.5


class TestCsvRoundTrip:
    def test_curve_round_trip_exact(self, tmp_path, rng):
        m = SpaceForm3(0.0)
        s = np.linspace(0.0, 1.0, 33)
        pts = rng.standard_normal((33, 3))
        pts[:, 0] = np.sort(pts[:, 0])
        from trikurve.geometry import CurveSamples
        curve = CurveSamples(s, pts, m)
        path = tmp_path / "c.csv"
        csvio.write_curve_csv(path, curve)
        back = csvio.read_curve_csv(path, m)
        assert np.array_equal(back.s, s)
        assert np.array_equal(back.points, pts)

    def test_manifold_json_round_trip(self):
        for m in (BCV(0.25, -1.5), SpaceForm2(0.7), SpaceForm3(-0.3),
                  ProductWithLine(SpaceForm2(2.0))):
            back = csvio.manifold_from_json(csvio.manifold_to_json(m))
            assert type(back) is type(m)
        from trikurve.profiles import TheoremExistence
        m = RuledSurfaceR3(TheoremExistence())
        back = csvio.manifold_from_json(csvio.manifold_to_json(m))
        assert isinstance(back, RuledSurfaceR3)
        assert back.directrix.closed_form
