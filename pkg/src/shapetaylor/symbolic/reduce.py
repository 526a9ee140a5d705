"""Reduction of 2D scalar proxies to curvilinear boundary-jet monomials.

The reduction uses the conventions of the numerical recursion: geometric
quantities (normal, curvature, normal speed) are extended constant along
normals, ``d_j n = -v_j_s tau`` at first order, and second normal
derivatives are eliminated with the Helmholtz equation
``F_nn = -(k^2 / alpha) F - kappa F_n - F_ss``. Jet symbols are written
``F``, ``F_n``, ``F_s``, ``F_ss``, ... with normal derivatives first.
"""

from __future__ import annotations

import re

import numpy as np

from .combination import Combination, term_line
from .proxy import (UnsupportedProxyError, VDirectional, VDot, VField, VGrad, VJump, VMetric,
                    VNormal, VScale, VSum, parse_line)

# factor order in a rendered monomial
_ORDER = {"alpha": 0, "k": 1, "kappa": 2}


class _Poly:
    """Monomial keys are sorted tuples of ``(symbol, power)``."""

    @staticmethod
    def sym(name, power=1):
        return Combination.single(((name, power),))

    @staticmethod
    def mul(a, b):
        def rule(x, y):
            powers = dict(x)
            for s, k in y:
                powers[s] = powers.get(s, 0) + k
            return Combination.single(tuple(sorted((s, k) for s, k in powers.items() if k)))
        return a.product(b, rule)


def _jet(field, derivs=""):
    return field + ("_" + derivs if derivs else "")


def _split_jet(symbol):
    """``"d_1 u_ns" -> ("d_1 u", "ns")``; None for non-field symbols."""
    for base in _FIELDS:
        if symbol == base:
            return base, ""
        if symbol.startswith(base + "_") and set(symbol[len(base) + 1:]) <= {"n", "s"}:
            return base, symbol[len(base) + 1:]
    return None


_FIELDS = ("u", "phi", "U")


def _normal_derivative(poly):
    """Derivative along the normal; geometric symbols are normal-constant."""
    def rule(mono):
        out = Combination()
        for i, (s, k) in enumerate(mono):
            split = _split_jet(s)
            if split is None:
                continue
            base, ders = split
            rest = mono[:i] + ((s, k - 1),) + mono[i + 1:]
            term = _Poly.mul(Combination.single(tuple(x for x in rest if x[1])),
                             _Poly.sym(_jet(base, "n" + ders)))
            out = out + term.scaled(k)
        return out
    return poly.map(rule)


def _eliminate_nn(poly):
    """Apply the Helmholtz equation to every ``F_nn...`` factor."""
    def rule(mono):
        for i, (s, k) in enumerate(mono):
            split = _split_jet(s)
            if split and split[1].startswith("nn"):
                base, ders = split
                tail = ders[2:]
                if tail:
                    raise UnsupportedProxyError("tangential derivatives of normal derivatives need a jet reordering")
                rest = Combination.single(tuple(x for j, x in enumerate(mono) if j != i))
                for _ in range(k - 1):
                    rest = _Poly.mul(rest, _Poly.sym(s))
                repl = (_Poly.mul(_Poly.mul(_Poly.sym("k", 2), _Poly.sym("alpha", -1)),
                                  _Poly.sym(_jet(base, tail))).scaled(-1)
                        + _Poly.mul(_Poly.sym("kappa"), _Poly.sym(_jet(base, "n" + tail))).scaled(-1)
                        + _Poly.sym(_jet(base, "ss" + tail)).scaled(-1))
                return _eliminate_nn(_Poly.mul(rest, repl))
        return Combination.single(mono)
    return poly.map(rule)


def _field_symbol(m):
    if not isinstance(m, VField) or m.vector:
        raise UnsupportedProxyError(f"expected a scalar field, got {m!r}")
    return m.name


def _scalar(m):
    """Polynomial of a scalar proxy monomial."""
    if isinstance(m, VField):
        return _Poly.sym(_field_symbol(m))
    if isinstance(m, VMetric):
        return _Poly.mul(_Poly.sym(m.label), _scalar(m.child))
    if isinstance(m, VDot) and isinstance(m.left, VGrad) and isinstance(m.right, VNormal):
        f = _field_symbol(m.left.child)
        idx = m.right.index
        if not idx:
            return _Poly.sym(_jet(f, "n"))
        if len(idx) == 1:
            return _Poly.mul(_Poly.sym(f"v_{idx[0]}_s"), _Poly.sym(_jet(f, "s"))).scaled(-1)
        raise UnsupportedProxyError("second variations of the normal are not reduced")
    if isinstance(m, VDirectional) and m.op == "grad":
        return _Poly.mul(_Poly.sym(f"v_{m.j}"), _normal_derivative(_scalar(m.child)))
    if isinstance(m, VDirectional) and m.op == "div":
        s = _flux(m.child)
        return _Poly.mul(_Poly.sym(f"v_{m.j}"),
                         _Poly.mul(_Poly.sym("kappa"), s) + _normal_derivative(s))
    raise UnsupportedProxyError(f"no curvilinear reduction for {type(m).__name__}")


def _flux(m):
    """Normal component of a flux proxy monomial."""
    if isinstance(m, VScale) and isinstance(m.child, VNormal):
        return _scalar(m.factor) if not m.child.index else Combination()
    if isinstance(m, VDirectional) and m.op == "div":
        return _scalar(m)
    raise UnsupportedProxyError(f"not a flux proxy: {type(m).__name__}")


def _merge_total(poly):
    """Combine equal scattered and incident contributions into the total field ``U``."""
    out, used = Combination(), set()
    items = {(p, mono): c for c, p, mono in poly.items()}
    for (p, mono), c in items.items():
        if (p, mono) in used:
            continue
        fields = [(i, _split_jet(s)) for i, (s, _) in enumerate(mono) if _split_jet(s)]
        if len(fields) == 1 and fields[0][1][0] in ("u", "phi"):
            i, (base, ders) = fields[0]
            other = "phi" if base == "u" else "u"
            partner = tuple(sorted(mono[:i] + ((_jet(other, ders), mono[i][1]),) + mono[i + 1:]))
            if items.get((p, partner)) == c:
                merged = tuple(sorted(mono[:i] + ((_jet("U", ders), mono[i][1]),) + mono[i + 1:]))
                out = out + Combination.single(merged, c, p)
                used.update({(p, mono), (p, partner)})
                continue
        out = out + Combination.single(mono, c, p)
    return out


def _factor_key(sym):
    s, _ = sym
    if s in _ORDER:
        return (0, _ORDER[s], s)
    if _split_jet(s):
        return (2, 0, s)
    return (1, 0, s)


def _render_mono(mono):
    parts = []
    for s, k in sorted(mono, key=_factor_key):
        parts.append(s if k == 1 else f"{s}^{k}")
    return " ".join(parts) if parts else "1"


def reduce_scalar_datum(proxy):
    """Curvilinear monomial text of a 2D, degree-0 datum proxy.

    Parameters
    ----------
    proxy : VSum
        Scalar (Dirichlet) or flux (conormal) datum.

    Returns
    -------
    str
        One signed monomial per line, sorted; ``"0"`` if empty.
    """
    if not isinstance(proxy, VSum):
        raise UnsupportedProxyError("reduction expects a single datum")
    total = Combination()
    for c, p, m in proxy.terms:
        if isinstance(m, VJump):
            raise UnsupportedProxyError("jump data are reduced side by side")
        poly = _flux(m) if proxy.kind == "flux" else _scalar(m)
        total = total + poly.scaled(c, p)
    total = _merge_total(_eliminate_nn(total))
    lines = sorted(((_render_mono(mono), p, c) for c, p, mono in total.items()))
    return "\n".join(term_line(c, p, body) for body, p, c in lines) or "0"


_FACTOR = re.compile(r"^(.+?)(?:\^(-?\d+))?$")


def evaluate_reduced(text, values, lam=0.0):
    """Evaluate reduced monomial text on arrays.

    ``values`` maps every symbol (``"U_n"``, ``"v_1_s"``, ``"kappa"``, ...) to
    a number or array; ``lam`` is the impedance parameter lambda.
    """
    total = 0.0
    for line in text.splitlines():
        if line.strip() == "0":
            continue
        c, p, body = parse_line(line)
        term = c * (1j * lam) ** p
        for factor in body.split(" "):
            name, power = _FACTOR.match(factor).groups()
            term = term * np.asarray(values[name]) ** (int(power) if power else 1)
        total = total + term
    return total
