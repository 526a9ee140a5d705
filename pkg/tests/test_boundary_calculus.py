import numpy as np
import pytest
from hypothesis import given, strategies as st

from shapetaylor.boundary_calculus import (BoundaryJet, BoundaryScalar, build_jet,
                                           spectral_derivative, trace_decompose)
from shapetaylor.geometry import ClosedCurve, build_grid
from shapetaylor.solvers import IncidentField
from shapetaylor.specfun import bessel_derivative, hankel1
from tests.oracles.analytic_jets import plane_wave, point_source, star_jets


@pytest.fixture(scope="module")
def circle_grid():
    return build_grid(ClosedCurve.circle(1.0), 64)


def test_derivative_of_fourier_mode(circle_grid):
    g = circle_grid
    f = BoundaryScalar(np.exp(3j * g.theta), g)
    d = spectral_derivative(f, g, "s", 1)
    assert np.abs(d.values - 3j * np.exp(3j * g.theta)).max() <= 1e-12


def test_derivative_of_constant(circle_grid):
    assert np.abs(spectral_derivative(np.full(64, 2.5 + 1j), circle_grid)).max() <= 1e-13


def test_plane_wave_tangential_derivative(star):
    g = build_grid(star, 256)
    d = np.array([np.cos(0.7), np.sin(0.7)])
    k = 3.0
    f = np.exp(1j * k * g.points @ d)
    exact = 1j * k * (g.tangent @ d) * f
    assert np.abs(spectral_derivative(f, g, "s") - exact).max() <= 1e-10


@given(st.lists(st.complex_numbers(max_magnitude=1), min_size=1, max_size=8),
       st.integers(1, 3))
def test_theta_derivative_exact_on_trig_polynomials(coeffs, order):
    g = build_grid(ClosedCurve.circle(1.0), 32)
    f = sum(c * np.exp(1j * m * g.theta) for m, c in enumerate(coeffs))
    exact = sum(c * (1j * m) ** order * np.exp(1j * m * g.theta) for m, c in enumerate(coeffs))
    assert np.abs(spectral_derivative(f, g, "theta", order) - exact).max() <= 1e-11


def test_trace_decompose_normal_and_tangent(star):
    g = build_grid(star, 64)
    nrm, tan = trace_decompose(g.normal, g)
    assert np.abs(nrm - g.normal).max() <= 1e-15 and np.abs(tan).max() <= 1e-15
    nrm, tan = trace_decompose(g.tangent, g)
    assert np.abs(nrm).max() <= 1e-15 and np.abs(tan - g.tangent).max() <= 1e-15


def test_trace_decompose_gradient(circle_grid):
    g = circle_grid
    inc = IncidentField.plane_wave(2.0, (np.cos(0.4), np.sin(0.4)))
    grad = inc.gradient(g.points)
    nrm, _ = trace_decompose(grad, g)
    exact = g.normal * (1j * 2.0 * (g.normal @ inc.direction) * inc(g.points))[:, None]
    assert np.abs(nrm - exact).max() <= 1e-13


def test_hankel_jet_satisfies_bessel_ode():
    a, k = 1.5, 2.0
    g = build_grid(ClosedCurve.circle(a), 64)
    u = np.full(g.n, hankel1(0, k * a))
    un = np.full(g.n, k * bessel_derivative("H", 0, k * a))
    jet = build_jet((u, un), g, k)
    assert np.abs(jet.u_ss).max() <= 1e-12
    assert np.abs(jet.u_nn - (-k ** 2 * u - un / a)).max() <= 1e-12
    assert np.abs(jet.u_nn - k ** 2 * bessel_derivative("H", 0, k * a, 2)).max() <= 1e-12


def test_zero_jet(circle_grid):
    jet = build_jet((np.zeros(64), np.zeros(64)), circle_grid, 1.0)
    assert all(not np.any(getattr(jet, e)) for e in BoundaryJet.ENTRIES)


@pytest.mark.parametrize("coeffs", [[], [0.0, 0.0, 0.1]], ids=["circle", "star"])
@pytest.mark.parametrize("field", ["plane_wave", "point_source"])
def test_jets_against_symbolic_differentiation(coeffs, field):
    k = 2.0
    g = build_grid(ClosedCurve.star(1.0, coeffs), 256)
    if field == "plane_wave":
        d = (np.cos(0.3), np.sin(0.3))
        ref, inc = star_jets(1.0, coeffs, plane_wave(k, d), g.theta), IncidentField.plane_wave(k, d)
    else:
        loc = (0.1, 0.2)
        ref, inc = star_jets(1.0, coeffs, point_source(k, loc), g.theta), IncidentField.point_source(k, loc)
    built = build_jet((ref["u"], ref["u_n"]), g, k)
    analytic = inc.jet(g)
    for e in BoundaryJet.ENTRIES:
        scale = np.abs(ref[e]).max()
        assert np.abs(getattr(built, e) - ref[e]).max() <= 1e-9 * scale, e
        assert np.abs(getattr(analytic, e) - ref[e]).max() <= 1e-12 * scale, e


def test_helmholtz_residual_of_jet(star):
    g = build_grid(star, 128)
    jet = IncidentField.plane_wave(3.0, alpha=0.5).jet(g)
    assert jet.helmholtz_residual(g) <= 1e-11
