import json
import math
import os
import subprocess
from pathlib import Path

import pytest

import polblock

DATA = Path(os.environ.get("POLBLOCK_DATA", Path(__file__).resolve().parents[2] / "data"))
CLI = os.environ.get("POLBLOCK_CLI")


def test_kerr_shift_closed_form():
    m = polblock.ws2_defaults()
    p = polblock.GaussianProfile(10.0, 50.0, 0.75)
    assert polblock.kerr_shift_mev(p, m) == pytest.approx(2040.0 / (2 * math.pi * 100.0), rel=1e-12)


def test_coupling_and_material_file():
    m = polblock.load_material_file(str(DATA / "ws2.mat"))
    c = polblock.collective_coupling(polblock.GaussianProfile(9.0, 150.0, 0.5), m, 2000.0)
    assert c.G0_mev == pytest.approx(22.0, rel=1e-9)
    assert c.Omega0_mev > 2000.0


def test_spectral_model():
    s = polblock.SpectralModel.gaussian(2000.0, 2.0, 22.0)
    assert s.backend == "analytic-gaussian"
    assert abs(s.memory_kernel_per_ps2(2000.0, 0.0)) == pytest.approx((22.0 / 0.6582119569) ** 2, rel=1e-12)
    x = 1.3
    ei = polblock.expint_ei(x)
    assert s.j_residual_mev(2000.0 + x * 2.0) == pytest.approx(2.0 * math.exp(x) / (ei**2 + math.pi**2), rel=1e-12)
    r = polblock.residual_rate(s, s.Omega0_mev)
    assert r["Gamma_res_mev"] > 0.0


def test_linear_dynamics():
    s = polblock.SpectralModel.gaussian(2000.0, 1.0, 22.0)
    r = polblock.compare_models(s, s.Omega0_mev, 5.0, 0.5)
    assert r["exact"][0] == pytest.approx(1.0)
    assert len(r["t_ps"]) == len(r["markov"]) == len(r["ignored"])
    assert r["distance_exact_markov"] < 0.05


def test_steady_state_and_errors():
    sys = polblock.ReducedSystem()
    sys.Omega0_mev = 2000.0
    sys.wc_mev = 2000.0
    sys.wd_mev = 1997.0
    sys.gamma_c_mev = 2.0
    sys.gamma_x_mev = 1.0
    sys.F_mev = 0.5
    r = polblock.analyze(sys, polblock.FockSpace(5, 2))
    assert r.n_cav == pytest.approx(0.25 / 13.0, rel=1e-8)
    assert r.g2_0 == pytest.approx(1.0, abs=1e-6)
    sys.F_mev = 0.0
    sys.wd_mev = 2000.0
    with pytest.raises(polblock.PolblockError, match="undefined_correlation"):
        polblock.analyze(sys, polblock.FockSpace(3, 3))


def test_optimizer_small_grid():
    t = polblock.SystemTemplate()
    t.omega0_mev = 2000.0
    t.Omega0_mev = 2001.0
    t.G0_mev = 20.0
    t.W0p_mev = 6.0
    t.gamma_c_mev = 5.0
    t.gamma_x_mev = 1.0
    t.gamma_xp_mev = 1.0
    t.F_mev = 1.0
    t.fock = polblock.FockSpace(3, 3)
    spec = polblock.OptimizationSpec()
    spec.box_lo_mev, spec.box_hi_mev, spec.grid, spec.starts = -60.0, 60.0, 7, 1
    o = polblock.optimize_g2(t, spec)
    assert o.g2_min <= o.coarse_min
    assert o.g2_min < 1.0


def test_run_from_config(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(f"[material]\nfile = {DATA / 'ws2.mat'}\n[profile]\nL_nm = 10\nLz_nm = 50\nrho = 0.75\n")
    outputs = polblock.run("coupling", str(cfg), str(tmp_path / "out"))
    assert "coupling.json" in outputs
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["subcommand"] == "coupling"


@pytest.mark.skipif(CLI is None, reason="CLI path not provided")
def test_cli_errors(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[system]\ngamma_cavity = 5\n")
    p = subprocess.run([CLI, "coupling", "--config", str(cfg), "--out", str(tmp_path)], capture_output=True, text=True)
    assert p.returncode != 0
    err = json.loads(p.stderr)["error"]
    assert "gamma_c_mev" in err["message"]

    cfg.write_text("[profile]\nL_nm = -2\n")
    p = subprocess.run([CLI, "coupling", "--config", str(cfg)], capture_output=True, text=True)
    assert p.returncode != 0
    err = json.loads(p.stderr)["error"]
    assert err["kind"] == "validation"
    assert "L_nm" in err["message"]


@pytest.mark.skipif(CLI is None, reason="CLI path not provided")
def test_cli_outputs(tmp_path):
    cfg = tmp_path / "ok.cfg"
    cfg.write_text("[profile]\nL_nm = 7\nLz_nm = 50\nrho = 0.75\n[system]\ngamma_c_mev = 25\nG0_mev = 57.5\n"
                   "wc_mev = 1860\nwd_mev = 2020\n[numerics]\nNc = 3\nNx = 3\ntau_max_ps = 2\ntau_points = 5\n"
                   "[sweep]\nL_nm = 3, 4\n")
    out = tmp_path / "out"
    for sub in ("g2ss", "g2tau", "lineardyn"):
        p = subprocess.run([CLI, sub, "--config", str(cfg), "--out", str(out), "--threads", "1"],
                           capture_output=True, text=True)
        assert p.returncode == 0, p.stderr
    g = json.loads((out / "g2ss.json").read_text())
    assert set(g) >= {"n_cav", "n_exc", "g2_0", "residual", "Nc", "Nx"}
    assert (out / "g2tau.csv").read_text().splitlines()[0] == "tau_ps,g2"
    assert (out / "lineardyn_L3.csv").read_text().splitlines()[0] == "t_ps,exact,markov,ignored"
    assert (out / "lineardyn_L4.csv").exists()
