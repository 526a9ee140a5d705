"""Cylinder functions: Bessel J, Y and the outgoing Hankel function H^(1).

Values come from ``scipy.special``; this module adds argument validation,
negative-order parity, and closed-form derivatives of any order.
"""

from math import comb

import numpy as np
from scipy import special

__all__ = [
    "DomainError",
    "CylEval",
    "cyl_bessel",
    "cyl_eval",
    "besselj",
    "bessely",
    "hankel1",
    "hankel1_prime",
    "bessel_derivative",
]


class DomainError(ValueError):
    """Argument outside the domain of a cylinder function."""


class CylEval:
    """J, Y and their first derivatives at a single (order, argument) pair."""

    __slots__ = ("order", "argument", "j", "y", "jp", "yp")

    def __init__(self, order, argument, j, y, jp, yp):
        self.order = order
        self.argument = argument
        self.j = j
        self.y = y
        self.jp = jp
        self.yp = yp

    def wronskian_residual(self):
        """Relative deviation of J Y' - J' Y from 2/(pi x)."""
        w = self.j * self.yp - self.jp * self.y
        exact = 2.0 / (np.pi * self.argument)
        return abs(w - exact) / exact

    def __repr__(self):
        return (f"CylEval(order={self.order}, argument={self.argument!r}, "
                f"j={self.j!r}, y={self.y!r})")


def _check_x(x, kind):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("cylinder function argument must be finite")
    if kind == "Y" and np.any(x <= 0):
        raise DomainError("Bessel Y requires x > 0")
    if kind == "J" and np.any(x < 0):
        raise DomainError("Bessel J is evaluated for x >= 0 only")
    return x


def _parity(n):
    n = np.asarray(n)
    if not np.all(n == np.round(n)):
        raise DomainError("only integer orders are supported")
    n = n.astype(int)
    return np.abs(n), np.where((n < 0) & (n % 2 == 1), -1.0, 1.0)


_FAST = {"J": (special.j0, special.j1), "Y": (special.y0, special.y1)}


def _evaluate(kind, n, x):
    x = _check_x(x, kind)
    m, sign = _parity(n)
    if m.ndim == 0 and m < 2:
        # dedicated order-0/1 routines are much faster on large kernel matrices
        return sign * _FAST[kind][int(m)](x)
    return sign * (special.jv if kind == "J" else special.yv)(m, x)


def besselj(n, x):
    """Bessel function of the first kind, integer order, vectorized."""
    return _evaluate("J", n, x)


def bessely(n, x):
    """Bessel function of the second kind, integer order, vectorized."""
    return _evaluate("Y", n, x)


def cyl_bessel(kind, n, x):
    """Evaluate J_n(x) or Y_n(x).

    Parameters
    ----------
    kind : {"J", "Y"}
    n : int
        Order; negative orders use J_{-n} = (-1)^n J_n (same for Y).
    x : float or array_like
        Argument, finite, and positive for Y.
    """
    kind = str(kind).upper()
    if kind == "J":
        return besselj(n, x)
    if kind == "Y":
        return bessely(n, x)
    raise ValueError(f"unknown kind {kind!r}; expected 'J' or 'Y'")


def hankel1(n, x):
    """Outgoing Hankel function H^(1)_n(x) = J_n(x) + i Y_n(x)."""
    return besselj(n, x) + 1j * bessely(n, x)


def hankel1_prime(n, x):
    """Derivative of H^(1)_n with respect to x via H_{n-1} - (n/x) H_n."""
    n = np.asarray(n)
    return hankel1(n - 1, x) - (n / np.asarray(x, dtype=float)) * hankel1(n, x)


def bessel_derivative(kind, n, x, m=1):
    """m-th derivative of a cylinder function of integer order.

    Uses C^(m)_n = 2^-m sum_k (-1)^k binom(m, k) C_{n-m+2k}, valid for
    J, Y and H^(1) alike.

    Parameters
    ----------
    kind : {"J", "Y", "H"}
    n : int or array_like
    x : float or array_like
    m : int
        Derivative order, m >= 0.
    """
    if m < 0:
        raise ValueError("derivative order must be non-negative")
    f = {"J": besselj, "Y": bessely, "H": hankel1}[str(kind).upper()]
    n = np.asarray(n)
    out = 0.0
    for k in range(m + 1):
        out = out + (-1) ** k * comb(m, k) * f(n - m + 2 * k, x)
    return out / 2.0 ** m


def cyl_eval(n, x):
    """Bundle J, Y, J', Y' at one point into a :class:`CylEval`."""
    x = float(x)
    return CylEval(
        int(n), x,
        float(besselj(n, x)), float(bessely(n, x)),
        float(bessel_derivative("J", n, x)), float(bessel_derivative("Y", n, x)),
    )
