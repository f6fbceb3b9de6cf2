import math

import numpy as np
import pytest

import semiheat


def test_presets():
    assert set(semiheat.preset_names()) == {"paper-sec6", "bound-demo", "zero"}
    cfg = semiheat.load_preset("paper-sec6")
    assert (cfg.nx, cfg.dt, cfg.tmax, cfg.method, cfg.stepper) == (5, 0.02, 3.0, "fdm", "eigen")
    k = cfg.form_constants()
    assert k["a0"] == pytest.approx(0.5)
    assert k["aT"] == pytest.approx(7.0)


def test_expr():
    e = semiheat.Expr("-x^2", "x")
    assert e(x=3) == -9
    assert semiheat.Expr("abs(u)^0.5*u", "u")(u=4) == 8
    assert semiheat.Expr("exp(-t)", "t").partial("t") == pytest.approx(-1.0, rel=1e-8)
    with pytest.raises(semiheat.ParseError):
        semiheat.Expr("abs(u)^0.5*", "u")
    with pytest.raises(semiheat.EvalError):
        semiheat.Expr("x/0 + 1", "x")(x=1)


def test_solve_shapes():
    r = semiheat.solve(semiheat.load_preset("paper-sec6"))
    assert r["u"].shape == (151, 6)
    assert r["t"][-1] == 3.0
    np.testing.assert_allclose(r["x"], np.linspace(0, 1, 6))
    assert r["u"][0, 0] == 2.0


def test_galerkin_close_to_exact():
    cfg = semiheat.load_preset("paper-sec6")
    r = semiheat.solve(cfg, method="galerkin", nx=40, dt=0.01, tmax=1.0)
    exact = (1 + math.exp(-1.0)) * np.exp(r["x"])
    assert np.max(np.abs(r["u"][-1] - exact)) < 2e-2


def test_csv_matches_arrays():
    cfg = semiheat.load_preset("paper-sec6")
    csv = semiheat.surface_csv(cfg)
    lines = csv.splitlines()
    assert lines[0] == "x,t,u"
    assert len(lines) == 907
    u = semiheat.solve(cfg)["u"].ravel()
    vals = np.array([float(line.split(",")[2]) for line in lines[1:]])
    np.testing.assert_array_equal(vals, u)


def test_steady_and_verify():
    cfg = semiheat.load_preset("paper-sec6")
    s = semiheat.steady(cfg, nx=160)
    last = float(s["csv"].splitlines()[-1].split(",")[1])
    assert abs(last - math.e) < 2e-2
    rep = semiheat.verify(cfg, "bound")
    assert rep["checks"]["bound"]["verdict"] == "hypotheses not satisfied: (H5')"
    rep = semiheat.verify(semiheat.load_preset("bound-demo"), "bound")
    assert rep["pass"] is True


def test_config_errors():
    with pytest.raises(semiheat.ConfigError, match=r"\.problem\.mu"):
        semiheat.parse_config('{"problem": {"f": "u", "f1": "0", "g0": "0", "g1": "0", "u0": "0", "h0": 1, "h1": 1, "T": 1}}')
    with pytest.raises(semiheat.ConfigError):
        semiheat.solve(semiheat.load_preset("zero"), nx=1)
