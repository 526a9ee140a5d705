import numpy as np
import pytest
from hypothesis import given, strategies as st

from shapetaylor.geometry import (ClosedCurve, NormalSpeedField, PerturbationTooLargeError,
                                  build_grid, composed_flow_curve, curve_from_spec,
                                  mixed_normal_closed_form, normal_shape_derivative, offset_curve,
                                  velocity_from_spec)


def test_circle_curvature():
    g = build_grid(ClosedCurve.circle(1.0), 64)
    assert np.abs(g.curvature - 1.0).max() <= 1e-12


def test_ellipse_curvature_at_vertex():
    g = build_grid(ClosedCurve([0.0, 2.0, 0.0], [0.0, 0.0, 1.0]), 256)
    assert g.curvature[0] == pytest.approx(2.0, abs=1e-12)


def test_total_curvature(star):
    g = build_grid(star, 256)
    assert abs(np.sum(g.curvature * g.weights) - 2 * np.pi) <= 1e-10


def test_normals_are_outward_unit(star):
    g = build_grid(star, 128)
    assert np.allclose(np.linalg.norm(g.normal, axis=1), 1.0, atol=1e-14)
    assert np.all(np.einsum("ij,ij->i", g.normal, g.points) > 0)


@pytest.mark.parametrize("c, t", [(1.0, 0.1), (-0.5, 0.2), (2.0, 0.01)])
def test_constant_offset_of_circle(c, t):
    g = build_grid(ClosedCurve.circle(1.0), 64)
    curve = offset_curve(g, NormalSpeedField.constant(c), t)
    assert curve.is_circle()
    assert curve.radius() == pytest.approx(1 + t * c, abs=1e-13)


def test_zero_offset_is_identity(star):
    g = build_grid(star, 64)
    assert offset_curve(g, NormalSpeedField.cosine(2), 0.0) is star


def test_offset_radial_distance():
    g = build_grid(ClosedCurve.circle(1.0), 64)
    curve = offset_curve(g, NormalSpeedField.cosine(2), 0.05)
    assert np.linalg.norm(curve.evaluate([0.0])[0]) == pytest.approx(1.05, abs=1e-13)


def test_reach_guard():
    g = build_grid(ClosedCurve.circle(1.0), 64)
    with pytest.raises(PerturbationTooLargeError):
        offset_curve(g, NormalSpeedField.constant(1.0), 5.0)


def test_constant_speed_leaves_normal_fixed(star):
    g = build_grid(star, 256)
    assert np.abs(normal_shape_derivative(g, NormalSpeedField.constant(1.3))).max() <= 1e-13


def test_normal_variation_on_circle():
    g = build_grid(ClosedCurve.circle(1.0), 128)
    dn = normal_shape_derivative(g, NormalSpeedField.sine(1))
    assert np.abs(dn + np.cos(g.theta)[:, None] * g.tangent).max() <= 1e-12


def _fd_normal(g, v, h):
    plus = build_grid(offset_curve(g, v, h), g.n).normal
    minus = build_grid(offset_curve(g, v, -h), g.n).normal
    return (plus - minus) / (2 * h)


@pytest.mark.parametrize("curve", ["circle", "star"])
def test_normal_variation_against_fd(curve, star):
    c = ClosedCurve.circle(1.0) if curve == "circle" else star
    g = build_grid(c, 256)
    v = NormalSpeedField.sine(1) + NormalSpeedField.cosine(3) * 0.4
    h = 1e-2
    # two-level Richardson on central differences
    est = (4 * _fd_normal(g, v, h / 2) - _fd_normal(g, v, h)) / 3
    est = (16 * ((4 * _fd_normal(g, v, h / 4) - _fd_normal(g, v, h / 2)) / 3) - est) / 15
    assert np.abs(est - normal_shape_derivative(g, v)).max() <= 1e-8


def test_mixed_normal_symmetric_and_closed_form(star):
    g = build_grid(star, 256)
    v1, v2 = NormalSpeedField.constant(1.0), NormalSpeedField.cosine(2)
    a, _ = normal_shape_derivative(g, v1, 2, v2)
    b, _ = normal_shape_derivative(g, v2, 2, v1)
    assert np.abs(a - b).max() <= 1e-6
    assert np.abs(a - mixed_normal_closed_form(g, v1, v2)).max() <= 1e-6


def test_composed_flow_is_sum_flow(star):
    g = build_grid(star, 128)
    v1, v2 = NormalSpeedField.cosine(2), NormalSpeedField.sine(3)
    a = composed_flow_curve(g, v1, 0.02, v2, 0.03)
    b = offset_curve(g, v1 * 0.02 + v2 * 0.03, 1.0)
    th = np.linspace(0, 2 * np.pi, 64)
    assert np.abs(a.evaluate(th) - b.evaluate(th)).max() <= 1e-10


@given(st.lists(st.floats(-1, 1), min_size=1, max_size=5),
       st.lists(st.floats(-1, 1), min_size=0, max_size=5),
       st.floats(-2, 2))
def test_velocity_linearity(cos, sin, c):
    g = build_grid(ClosedCurve.circle(1.0), 32)
    v, w = NormalSpeedField(cos, sin), NormalSpeedField.cosine(2)
    assert np.allclose((v + w * c).on(g), v.on(g) + c * w.on(g), atol=1e-13)


@given(st.floats(0.5, 2.0), st.lists(st.floats(-0.1, 0.1), max_size=4))
def test_curve_spec_round_trip(a0, cos):
    c = ClosedCurve.star(a0, cos)
    d = curve_from_spec(c.spec())
    th = np.linspace(0, 2 * np.pi, 17)
    assert np.allclose(c.evaluate(th), d.evaluate(th), atol=1e-14)


def test_velocity_spec():
    assert velocity_from_spec({"const": 2.0}).is_constant()
    v = velocity_from_spec({"cos": [0.0, 0.0, 1.0]})
    assert v(np.array([0.0]))[0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        curve_from_spec({"square": 1})
