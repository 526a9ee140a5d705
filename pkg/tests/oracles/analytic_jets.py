"""Boundary jets by symbolic differentiation along the parametrized curve.

The field is composed with (theta, nu) -> x(theta) + nu n(theta) and
differentiated with sympy; d_s = |x'(theta)|^-1 d_theta commutes with d_nu
because the Jacobian does not depend on nu.
"""

import numpy as np
import sympy as sp

ENTRIES = {"u": (0, 0), "u_s": (0, 1), "u_ss": (0, 2), "u_n": (1, 0), "u_ns": (1, 1),
           "u_nn": (2, 0), "u_nss": (1, 2), "u_nns": (2, 1), "u_nnn": (3, 0)}


def star_jets(a0, cos_coeffs, field, theta):
    """Jets of ``field(x, y)`` (sympy expression builder) on r = a0 + sum_m c_m cos(m theta).

    ``cos_coeffs[i]`` multiplies cos((i + 1) theta).
    """
    th, nu = sp.symbols("theta nu", real=True)
    r = a0 + sum(c * sp.cos((i + 1) * th) for i, c in enumerate(cos_coeffs))
    x, y = r * sp.cos(th), r * sp.sin(th)
    xp, yp = sp.diff(x, th), sp.diff(y, th)
    J = sp.sqrt(xp ** 2 + yp ** 2)
    # outward normal (counterclockwise parametrization)
    F = field(x + nu * yp / J, y - nu * xp / J)
    out = {}
    for name, (a, b) in ENTRIES.items():
        e = sp.diff(F, nu, a) if a else F
        for _ in range(b):
            e = sp.diff(e, th) / J
        f = sp.lambdify(th, e.subs(nu, 0), modules=["scipy", "numpy"])
        out[name] = np.asarray(f(theta), dtype=complex) * np.ones_like(theta)
    return out


def plane_wave(k, direction):
    d = np.asarray(direction, dtype=float)
    return lambda x, y: sp.exp(sp.I * k * (d[0] * x + d[1] * y))


def point_source(k, location):
    x0, y0 = location
    return lambda x, y: sp.hankel1(0, k * sp.sqrt((x - x0) ** 2 + (y - y0) ** 2))
