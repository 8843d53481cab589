import io
import math

import numpy as np
import pytest

from mutualgp.core import PRINCIPAL, angular_distance
from mutualgp.entanglement import attribute
from mutualgp.sweeps import HEADER, SweepSpec, cmd_fig1, diagnostics, fig1_grid, monotone_columns, period_shift

# 50-digit mpmath reference: 31*0.4 - 51*arctan((31/51) tan 0.4)
W_51_10_04 = -0.42896967643963748740


@pytest.fixture(scope="module")
def grids():
    return {f: fig1_grid(SweepSpec(f)) for f in "SW"}


def test_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec("X")
    with pytest.raises(ValueError):
        SweepSpec("S", gamma_points=1)
    with pytest.raises(ValueError):
        SweepSpec("S", gamma_min=1.0, gamma_max=0.0)
    assert SweepSpec("w").family == "W"


def test_grid_shape(grids):
    for g in grids.values():
        assert g.delta.shape == (201, 401)
        assert abs(g.gammas[200]) < 1e-15


def test_csv_layout(grids, tmp_path):
    path = tmp_path / "w.csv"
    cmd_fig1(SweepSpec("W", out=str(path)))
    lines = path.read_text().splitlines()
    assert lines[0] == HEADER
    assert len(lines) == 1 + 201 * 401 + 1
    assert lines[-1].startswith("# degenerate") and "25.5" in lines[-1]
    data = np.genfromtxt(io.StringIO("\n".join(lines[:-1])), delimiter=",", skip_header=1)
    # param-outer, gamma-inner
    np.testing.assert_array_equal(data[:401, 2], 0.0)
    np.testing.assert_array_equal(data[:401, 0], grids["W"].gammas)
    row = data[401 * 100:401 * 101]
    assert np.all(np.isnan(row[:, 5]))
    # full 17 significant digits round-trip
    np.testing.assert_array_equal(data[:, 5].reshape(201, 401), grids["W"].delta)


def test_csv_is_deterministic():
    a = fig1_grid(SweepSpec("S", n=11, gamma_points=41, ent_points=21)).to_csv()
    b = fig1_grid(SweepSpec("S", n=11, gamma_points=41, ent_points=21)).to_csv()
    assert a == b


def test_separable_rows_vanish(grids):
    s, w = grids["S"], grids["W"]
    assert s.params[0] == 1.0
    np.testing.assert_allclose(s.delta[0], 0.0, atol=1e-12)
    assert w.params[0] == 0.0
    np.testing.assert_allclose(w.delta[0], 0.0, atol=1e-12)


def test_w_cell_against_closed_form():
    g = fig1_grid(SweepSpec("W", gamma_min=0.0, gamma_max=0.4, gamma_points=41, ent_points=52))
    i = int(np.argmin(np.abs(g.params - 10)))
    assert g.params[i] == 10.0
    assert g.delta[i, -1] == pytest.approx(W_51_10_04, abs=1e-11)


@pytest.mark.parametrize("family", ["S", "W"])
def test_grid_matches_analytic_branches(grids, family):
    g = grids[family]
    key = "r" if family == "S" else "k"
    for i in range(0, 201, 9):
        if g.degenerate[i]:
            continue
        for j in range(0, 401, 17):
            rep = attribute(family, {"n": 51, key: g.params[i]}, g.gammas[j])
            assert g.delta[i, j] == pytest.approx(rep.mutual_gp, abs=1e-10)
            assert g.composite[i, j] == pytest.approx(rep.composite_gp.value, abs=1e-10)


def test_principal_branch_columns():
    u = fig1_grid(SweepSpec("W", n=11, gamma_points=81, ent_points=23))
    p = fig1_grid(SweepSpec("W", n=11, gamma_points=81, ent_points=23, branch=PRINCIPAL))
    assert np.max(angular_distance(p.composite, u.composite)) < 1e-12
    np.testing.assert_array_equal(p.delta, u.delta)
    assert np.all(p.composite > -math.pi) and np.all(p.composite <= math.pi)


def test_s_family_pi_periodic(grids):
    ps = period_shift(grids["S"])
    assert np.nanmax(np.abs(ps["shift"])) < 1e-9
    assert ps["max_spread"] < 1e-9


def test_w_family_shift_is_measured(grids):
    g = grids["W"]
    ps = period_shift(g)
    ok = ~g.degenerate
    k = g.params[ok]
    expected = np.where(k < 25.5, -2 * k, 2 * (51 - k)) * math.pi
    np.testing.assert_allclose(ps["shift"][ok], expected, atol=1e-9)


def test_w_monotone_outside_central_band(grids):
    g = grids["W"]
    mono = monotone_columns(g)
    outside = np.abs(g.gammas) / math.pi >= 0.5
    assert mono[outside].all()
    assert not mono[~outside].all()


def test_diagnostics_report_structure():
    recs = diagnostics(n_values=(5, 9), gamma_points=81, ent_points=41)
    names = [r["check"] for r in recs]
    assert names[0] == "S monotone in E_R"
    assert any("pi-shift" in n for n in names)
    mags = [r for r in recs if "magnitude" in r["check"]]
    assert all(r["passed"] for r in mags)
