import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from shapetaylor import specfun
from shapetaylor.oracles import bessel_series
from tests.oracles.bessel_values import VALUES


def test_j0_at_one():
    assert specfun.cyl_bessel("J", 0, 1.0) == pytest.approx(0.7651976865579666, rel=1e-15, abs=0)


def test_j0_small_argument_limit():
    assert abs(specfun.cyl_bessel("J", 0, 1e-300) - 1.0) <= 1e-15


@pytest.mark.parametrize("n, x, j, y", VALUES)
def test_matches_frozen_values(n, x, j, y):
    j, y = float(mp.mpf(j)), float(mp.mpf(y))
    scale = np.hypot(j, y)
    assert abs(specfun.besselj(n, x) - j) <= 1e-13 * scale
    assert abs(specfun.bessely(n, x) - y) <= 1e-13 * scale


@pytest.mark.parametrize("n, x, j, y", VALUES)
def test_series_oracle_matches_frozen_values(n, x, j, y):
    rj, ry = bessel_series(n, x)
    with mp.workdps(40):
        assert abs(rj - mp.mpf(j)) <= mp.mpf("1e-27") * abs(mp.mpf(j))
        assert abs(ry - mp.mpf(y)) <= mp.mpf("1e-27") * abs(mp.mpf(y))


def test_hankel_imaginary_part_is_y():
    x = np.linspace(0.1, 30, 50)
    assert np.array_equal(specfun.hankel1(0, x).imag, specfun.bessely(0, x))


@pytest.mark.parametrize("n", range(11))
def test_hankel_modulus_decreasing(n):
    x = np.linspace(n + 5, 100, 400)
    assert np.all(np.diff(np.abs(specfun.hankel1(n, x))) < 0)


@given(st.integers(0, 30), st.floats(0.1, 50))
def test_wronskian_with_hankel(n, x):
    j, jp = specfun.besselj(n, x), specfun.bessel_derivative("J", n, x)
    h, hp = specfun.hankel1(n, x), specfun.hankel1_prime(n, x)
    w = j * hp.imag - jp * h.imag
    assert abs(w - 2 / (np.pi * x)) <= 1e-12 * 2 / (np.pi * x)
    assert specfun.cyl_eval(n, x).wronskian_residual() <= 1e-12


@given(st.integers(1, 30), st.floats(0.1, 50))
def test_three_term_recurrence(n, x):
    for kind in ("J", "Y"):
        lhs = specfun.cyl_bessel(kind, n - 1, x) + specfun.cyl_bessel(kind, n + 1, x)
        rhs = 2 * n / x * specfun.cyl_bessel(kind, n, x)
        scale = np.hypot(specfun.besselj(n + 1, x), specfun.bessely(n + 1, x))
        assert abs(lhs - rhs) <= 1e-12 * scale * (1 + 2 * n / x)


@given(st.integers(-20, 20), st.floats(0.1, 40))
def test_negative_order_parity(n, x):
    sign = (-1) ** abs(n) if n < 0 else 1
    assert specfun.besselj(n, x) == pytest.approx(sign * specfun.besselj(abs(n), x), rel=1e-14, abs=1e-300)


@given(st.integers(0, 20), st.floats(0.5, 40))
def test_derivative_identity(n, x):
    lhs = specfun.bessel_derivative("J", n, x)
    rhs = 0.5 * (specfun.besselj(n - 1, x) - specfun.besselj(n + 1, x))
    assert abs(lhs - rhs) <= 1e-13


def test_domain_errors():
    with pytest.raises(specfun.DomainError):
        specfun.bessely(0, 0.0)
    with pytest.raises(specfun.DomainError):
        specfun.besselj(0, np.nan)
    with pytest.raises(ValueError):
        specfun.cyl_bessel("K", 0, 1.0)
    with pytest.raises(ValueError):
        bessel_series(-1, 1.0)
