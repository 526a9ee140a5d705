"""Translation of form expressions to Euclidean vector proxies and canonical text.

Proxy conventions (dimension d, solution degree l):

* 0-forms and top forms are scalars; in 3D 1-forms are circulation vectors
  and 2-forms flux vectors; in 2D 1-forms built as differentials are
  circulation vectors and boundary (d-1)-forms are flux vectors.
* ``d`` is the gradient, curl or divergence; ``i_m`` is a dot product on
  circulation vectors, ``X x m`` on 3D flux vectors and ``X (n . m) n`` on
  top forms (boundary flux with ``n . d_i n = 0``).
* The boundary star maps a scalar ``f`` to the flux ``f n``, a flux to its
  normal component and a 3D tangential vector ``w`` to ``n x w``.
* ``i_{v_j} d`` collapses to ``grad_j``, ``curl_j`` or ``div_j``.
* The incident atom enters with a minus sign, so the data read as
  conditions on the scattered field driven by ``-phi``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .combination import Combination, term_line
from .forms import (Contract, ExtD, FormAtom, Hodge, HodgeBoundary, Jump, JumpPair, Sum,
                    TraceD, TraceN, Wedge, delta_label, expand_traces, simplify)


class UnsupportedProxyError(ValueError):
    """No vector proxy for this node in the requested (d, l) setting."""


# ---------------------------------------------------------------- vector AST

class VectorExpr:
    """Base class of vector-proxy nodes."""


@dataclass(frozen=True)
class VField(VectorExpr):
    name: str
    vector: bool


@dataclass(frozen=True)
class VNormal(VectorExpr):
    index: tuple = ()


@dataclass(frozen=True)
class VVelocity(VectorExpr):
    j: int


@dataclass(frozen=True)
class VGrad(VectorExpr):
    child: VectorExpr


@dataclass(frozen=True)
class VCurl(VectorExpr):
    child: VectorExpr


@dataclass(frozen=True)
class VDiv(VectorExpr):
    child: VectorExpr


@dataclass(frozen=True)
class VDot(VectorExpr):
    left: VectorExpr
    right: VectorExpr


@dataclass(frozen=True)
class VCross(VectorExpr):
    left: VectorExpr
    right: VectorExpr


@dataclass(frozen=True)
class VScale(VectorExpr):
    """Scalar field times a vector (or scalar)."""

    factor: VectorExpr
    child: VectorExpr


@dataclass(frozen=True)
class VMetric(VectorExpr):
    label: str
    child: VectorExpr


@dataclass(frozen=True)
class VDirectional(VectorExpr):
    """``grad_j``, ``div_j`` or ``curl_j``: the contraction ``i_{v_j} d``."""

    op: str
    j: int
    child: VectorExpr


@dataclass(frozen=True)
class VJump(VectorExpr):
    child: VectorExpr


@dataclass(frozen=True)
class VSum(VectorExpr):
    """Canonical sum of ``(c, p, monomial)`` terms; ``kind`` is the proxy type of the whole."""

    terms: tuple
    kind: str

    @property
    def is_zero(self):
        return not self.terms


@dataclass(frozen=True)
class ProxyPair:
    dirichlet: VSum
    neumann: VSum


_ATOMIC = (VField, VNormal, VVelocity)


def _is_normal(m):
    return isinstance(m, VNormal)


def render_vector(m):
    """Text of a single monomial."""
    if isinstance(m, VField):
        return m.name
    if isinstance(m, VNormal):
        return "n" if not m.index else delta_label(m.index) + " n"
    if isinstance(m, VVelocity):
        return f"v_{m.j}"
    if isinstance(m, (VGrad, VCurl, VDiv)):
        head = {VGrad: "nabla ", VCurl: "nabla x ", VDiv: "nabla . "}[type(m)]
        return head + _operand(m.child)
    if isinstance(m, VDot):
        return "(" + render_vector(m.left) + " . " + render_vector(m.right) + ")"
    if isinstance(m, VCross):
        return _operand(m.left) + " x " + render_vector(m.right)
    if isinstance(m, VScale):
        f = m.factor
        ftext = render_vector(f) if isinstance(f, _ATOMIC + (VDot, VMetric)) else "(" + render_vector(f) + ")"
        return ftext + " " + _operand(m.child)
    if isinstance(m, VMetric):
        return m.label + " " + render_vector(m.child)
    if isinstance(m, VDirectional):
        inner = m.child
        text = render_vector(inner)
        if not isinstance(inner, (VField, VDirectional)):
            text = "(" + text + ")"
        return f"{m.op}_{m.j} " + text
    if isinstance(m, VJump):
        return "[" + render_vector(m.child) + "]"
    if isinstance(m, VSum):
        return "(" + render_canonical(m).replace("\n", " ") + ")"
    raise TypeError(f"cannot render {type(m).__name__}")


def _operand(m):
    text = render_vector(m)
    return text if isinstance(m, _ATOMIC + (VMetric, VCross, VCurl, VGrad, VDiv)) else "(" + text + ")"


# ---------------------------------------------------------------- canonical text

_LINE = re.compile(r"^([+-]) (?:(\d+) )?(?:(i lambda|\(i lambda\)\^(\d+)) )?(.*)$")


def parse_line(line):
    """Split a canonical line into ``(c, p, body)``."""
    m = _LINE.match(line.strip())
    if not m:
        raise ValueError(f"not a canonical term line: {line!r}")
    sign, mag, lam, lam_pow, body = m.groups()
    c = int(mag) if mag else 1
    p = int(lam_pow) if lam_pow else (1 if lam else 0)
    return (-c if sign == "-" else c), p, body


def canonical_text(text):
    """Sort the term lines of each section; comment lines (``#``) are dropped.

    Lines ending with ``:`` are section headers and keep their position.
    """
    out, block = [], []

    def flush():
        terms = [parse_line(b) for b in block if b != "0"]
        terms.sort(key=lambda t: (t[2], t[1], t[0]))
        out.extend(term_line(c, p, body) for c, p, body in terms) if terms else (
            out.append("0") if block else None)
        block.clear()

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.endswith(":"):
            flush()
            out.append(line)
        else:
            block.append(line)
    flush()
    return "\n".join(out)


def render_canonical(e):
    """Deterministic text: one signed term per line, sorted by operator chain then fields."""
    if isinstance(e, ProxyPair):
        return ("dirichlet:\n" + render_canonical(e.dirichlet)
                + "\nneumann:\n" + render_canonical(e.neumann))
    if isinstance(e, VSum):
        if not e.terms:
            return "0"
        return canonical_text("\n".join(term_line(c, p, render_vector(m)) for c, p, m in e.terms))
    return term_line(1, 0, render_vector(e))


# ---------------------------------------------------------------- translation

def _one(m):
    return Combination.single(m)


def _cross(a, b):
    """Cross product with the normal family moved to the left."""
    def rule(x, y):
        if _is_normal(y) and not _is_normal(x):
            return Combination.single(VCross(y, x), -1)
        return _one(VCross(x, y))
    return a.product(b, rule)


def _push_metric(label, w):
    """Attach a metric factor to the innermost field of a chain of normal cross products."""
    def rule(m):
        if isinstance(m, VCross) and _is_normal(m.left):
            return _cross(_one(m.left), _push_metric(label, _one(m.right)))
        return _one(VMetric(label, m))
    return w.map(rule)


def _normal_component(w):
    def rule(m):
        if isinstance(m, VScale) and _is_normal(m.child):
            return _one(m.factor) if not m.child.index else Combination()
        if isinstance(m, VDirectional) and m.op == "div":
            return _one(m)
        if isinstance(m, VMetric):
            return _normal_component(_one(m.child)).map(lambda x: _one(VMetric(m.label, x)))
        if isinstance(m, VJump):
            return _normal_component(_one(m.child)).map(lambda x: _one(VJump(x)))
        return _one(VDot(VNormal(), m))
    return w.map(rule)


class _Translator:
    def __init__(self, dim, degree):
        if dim not in (2, 3):
            raise UnsupportedProxyError("vector proxies exist for d = 2 and d = 3")
        if not 0 <= degree < dim:
            raise UnsupportedProxyError(f"solution degree {degree} not supported in {dim}D")
        self.dim, self.degree = dim, degree

    def kind_of_degree(self, k):
        if k == 0:
            return "scalar"
        if k == self.dim:
            return "top"
        return "circ" if k == 1 else "flux"

    def field_name(self, a):
        base = {"omega": ("u", "E"), "phi": ("phi", "Phi"), "rho": ("rho", "rho")}[a.name]
        name = base[1] if a.degree == 1 and self.dim == 3 else base[0]
        return (delta_label(a.deltas) + " " if a.deltas else "") + name

    def __call__(self, e):
        """Return ``(Combination of monomials, kind)``."""
        d = self.dim
        if isinstance(e, Sum):
            out, kind = Combination(), self.kind_of_degree(e.degree) if e.terms else "scalar"
            for c, p, t in e.terms:
                comb, kind = self(t)
                out = out + comb.scaled(c, p)
            return out, kind
        if isinstance(e, (TraceD, TraceN)):
            return self(expand_traces(e))
        if isinstance(e, FormAtom):
            kind = self.kind_of_degree(e.degree)
            f = VField(self.field_name(e), kind in ("circ", "flux"))
            return Combination.single(f, -1 if e.name == "phi" else 1), kind
        if isinstance(e, Jump):
            comb, kind = self(e.child)
            return comb.map(lambda m: _one(VJump(m))), kind
        if isinstance(e, Contract) and not e.vector.is_normal and isinstance(e.child, ExtD):
            comb, kind = self(e.child.child)
            op, out_kind = {"scalar": ("grad", "scalar"), "circ": ("curl", "circ"),
                            "flux": ("div", "flux")}.get(kind, (None, None))
            if op is None or (op == "curl" and d != 3):
                raise UnsupportedProxyError(f"no directional operator on a {kind} proxy in {d}D")
            j = e.vector.index[0]
            return comb.map(lambda m: _one(VDirectional(op, j, m))), out_kind
        if isinstance(e, ExtD):
            comb, kind = self(e.child)
            if kind == "scalar":
                return comb.map(lambda m: _one(VGrad(m))), "circ"
            if kind == "circ" and d == 3:
                return comb.map(lambda m: _one(VCurl(m))), "flux"
            if kind == "flux":
                return comb.map(lambda m: _one(VDiv(m))), "top"
            raise UnsupportedProxyError(f"exterior derivative of a {kind} proxy in {d}D")
        if isinstance(e, Hodge):
            comb, kind = self(e.child)
            swap = {"scalar": "top", "top": "scalar", "circ": "flux", "flux": "circ"}
            if e.metric != "1":
                comb = comb.map(lambda m: _one(VMetric(e.metric, m)))
            return comb, swap[kind]
        if isinstance(e, HodgeBoundary):
            comb, kind = self(e.child)
            label = None if e.metric == "1" else e.metric
            if kind == "scalar":
                if label:
                    comb = comb.map(lambda m: _one(VMetric(label, m)))
                return comb.map(lambda m: _one(VScale(m, VNormal()))), "flux"
            if kind == "flux":
                out = _normal_component(comb)
                if label:
                    out = out.map(lambda m: _one(VMetric(label, m)))
                return out, "scalar"
            if kind == "circ" and d == 3:
                if label:
                    comb = _push_metric(label, comb)
                return _cross(_one(VNormal()), comb), "circ"
            raise UnsupportedProxyError(f"boundary star of a {kind} proxy in {d}D")
        if isinstance(e, Contract):
            comb, kind = self(e.child)
            vec = VNormal(e.vector.index) if e.vector.is_normal else VVelocity(e.vector.index[0])
            if kind == "circ":
                return comb.map(lambda m: _one(VDot(m, vec))), "scalar"
            if kind == "flux" and d == 3:
                return _cross(comb, _one(vec)), "circ"
            if kind == "top":
                if isinstance(vec, VNormal) and vec.index:
                    return Combination(), "flux"
                return comb.map(lambda m: _one(VScale(m, vec))), "flux"
            raise UnsupportedProxyError(f"contraction of a {kind} proxy in {d}D")
        if isinstance(e, Wedge):
            a, ka = self(e.left)
            b, kb = self(e.right)
            if ka == "scalar":
                return a.product(b, lambda x, y: _one(VScale(x, y))), kb
            if kb == "scalar":
                return b.product(a, lambda x, y: _one(VScale(x, y))), ka
            if d == 3 and (ka, kb) == ("circ", "circ"):
                return _cross(a, b), "flux"
            if d == 3 and {ka, kb} == {"circ", "flux"}:
                return a.product(b, lambda x, y: _one(VDot(x, y))), "top"
            raise UnsupportedProxyError(f"wedge of {ka} and {kb} proxies in {d}D")
        raise UnsupportedProxyError(f"no proxy for {type(e).__name__}")


def _to_vsum(comb, kind):
    terms = sorted(((c, p, m) for c, p, m in comb.items()),
                   key=lambda t: (render_vector(t[2]), t[1], t[0]))
    return VSum(tuple(terms), kind)


def to_vector_proxy(e, d, l):
    """Vector proxy of a simplified form expression.

    Parameters
    ----------
    e : FormExpr or JumpPair
    d : {2, 3}
        Ambient dimension.
    l : int
        Degree of the solution form.

    Returns
    -------
    VSum, or ProxyPair for transmission data.
    """
    tr = _Translator(d, l)
    if isinstance(e, JumpPair):
        return ProxyPair(to_vector_proxy(e.dirichlet, d, l), to_vector_proxy(e.neumann, d, l))
    e = simplify(e)
    if e.is_zero:
        return VSum((), "scalar")
    return _to_vsum(*tr(e))


def proxy_json(p):
    """Machine-readable term list of a proxy."""
    if isinstance(p, ProxyPair):
        return {"dirichlet": proxy_json(p.dirichlet), "neumann": proxy_json(p.neumann)}
    return {"kind": p.kind,
            "terms": [{"c": c, "ilambda_power": q, "term": render_vector(m)} for c, q, m in p.terms]}
