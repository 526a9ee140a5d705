import numpy as np
import pytest

from shapetaylor.geometry import ClosedCurve, build_grid
from shapetaylor.solvers import (BoundaryCondition, IncidentField, incident_data,
                                 nystrom_scatter, nystrom_solve, nystrom_transmission_solve,
                                 series_solve)
from shapetaylor.specfun import hankel1


def _rel(a, b):
    return np.abs(a - b).max() / np.abs(b).max()


def test_series_soft_residual():
    inc = IncidentField.plane_wave(1.0)
    s = series_solve(1.0, BoundaryCondition("soft"), 1.0, inc, n_modes=40)
    assert s.bc_residual(inc) <= 1e-12


def test_series_hard_residual():
    inc = IncidentField.plane_wave(1.0)
    s = series_solve(1.0, BoundaryCondition("hard"), 1.0, inc, n_modes=40)
    assert s.bc_residual(inc) <= 1e-10


def test_series_transmission_without_contrast():
    inc = IncidentField.plane_wave(2.0)
    s = series_solve(1.0, BoundaryCondition("transmission", alpha=1.0, alpha_int=1.0), 2.0, inc)
    assert np.abs(s.coeffs).max() <= 1e-14


def test_nystrom_soft_matches_series():
    k = 2.0
    inc = IncidentField.plane_wave(k, (np.cos(0.3), np.sin(0.3)))
    ser = series_solve(1.0, BoundaryCondition("soft"), k, inc, n_nodes=256)
    nys = nystrom_solve(ser.grid, "soft_data", -inc(ser.grid.points), k)
    assert _rel(nys.trace(), ser.trace()) <= 1e-8
    assert _rel(nys.normal_trace(), ser.normal_trace()) <= 1e-8


@pytest.mark.parametrize("kind", ["soft_data", "hard_data", "impedance_data"])
def test_zero_data(kind, star):
    g = build_grid(star, 64)
    sol = nystrom_solve(g, kind, np.zeros(64), 2.0, lam=1.0)
    assert not np.any(sol.evaluate(np.array([[3.0, 0.0]])))


@pytest.mark.parametrize("kind, lam", [("soft", 0.0), ("hard", 0.0), ("impedance", 1.5)])
def test_manufactured_radiating_solution(kind, lam, star):
    k, src = 2.0, np.array([0.1, 0.2])
    g = build_grid(star, 256)
    exact = IncidentField.point_source(k, src)
    f, fn = exact.cauchy(g)
    data = {"soft": f, "hard": fn, "impedance": fn + 1j * lam * f}[kind]
    sol = nystrom_solve(g, kind, data, k, lam=lam)
    pts = np.array([[3.0, 0.5], [-2.0, 2.0], [0.0, -4.0]])
    ref = hankel1(0, k * np.linalg.norm(pts - src, axis=1))
    assert _rel(sol.evaluate(pts), ref) <= 1e-9


def test_far_field_agrees_with_series():
    k = 3.7
    inc = IncidentField.plane_wave(k)
    bc = BoundaryCondition("impedance", lam=1.0)
    ser = series_solve(1.0, bc, k, inc, n_nodes=256)
    nys = nystrom_scatter(ser.grid, bc, k, inc)
    ang = np.linspace(0, 2 * np.pi, 12)
    assert _rel(nys.far_field(ang), ser.far_field(ang)) <= 1e-8


def test_far_field_is_asymptotic_amplitude():
    k = 2.0
    inc = IncidentField.plane_wave(k)
    ser = series_solve(1.0, BoundaryCondition("hard"), k, inc)
    r, ang = 4000.0, np.array([0.3, 1.9])
    pts = r * np.c_[np.cos(ang), np.sin(ang)]
    u = ser.evaluate(pts) * np.sqrt(r) * np.exp(-1j * k * r)
    ff = ser.far_field(ang)
    # fixed normalization constant between pattern and asymptotic amplitude
    ratio = u / ff
    assert abs(ratio[0] - ratio[1]) <= 1e-3 * abs(ratio[0])


def test_transmission_nystrom_matches_series():
    bc = BoundaryCondition("transmission", alpha=1.0, alpha_int=0.5)
    inc = IncidentField.plane_wave(2.0)
    ser = series_solve(1.0, bc, 2.0, inc)
    tn = nystrom_transmission_solve(ser.grid, bc, 2.0, incident_data(bc, inc, ser.grid))
    assert _rel(tn.trace(), ser.trace()) <= 1e-8
    assert _rel(tn.interior_cauchy_data()[1], ser.interior_cauchy_data()[1]) <= 1e-8


def test_unknown_condition():
    with pytest.raises(ValueError):
        BoundaryCondition("rigid")
    with pytest.raises(ValueError):
        BoundaryCondition("soft", alpha=-1.0)
