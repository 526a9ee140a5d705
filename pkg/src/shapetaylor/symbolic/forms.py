"""Expression trees over differential forms on a domain with boundary.

Nodes are immutable and hashable. Construct them through the smart
constructors (:func:`ext_d`, :func:`contract`, ...), which check degrees
and fold annihilated expressions to :data:`ZERO`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .combination import Combination, term_line

METRICS = ("1", "alpha", "alpha^-1", "k^2")
ATOM_NAMES = ("omega", "phi", "rho")


class FormTypeError(TypeError):
    """Degree or arity violation while building a form expression."""


def delta_label(index):
    """``(1, 2) -> "d_12"``; indices above 9 are comma separated."""
    sep = "" if all(i < 10 for i in index) else ","
    return "d_" + sep.join(str(i) for i in index)


@dataclass(frozen=True, order=True)
class Vector:
    """Contraction vector: a velocity ``v_j`` or the normal family ``n``, ``d_i n``, ``d_ij n``."""

    kind: str
    index: tuple = ()

    def __post_init__(self):
        if self.kind not in ("v", "n"):
            raise FormTypeError(f"unknown vector kind {self.kind!r}")
        if self.kind == "v" and len(self.index) != 1:
            raise FormTypeError("a velocity carries exactly one index")
        object.__setattr__(self, "index", tuple(sorted(self.index)))

    @classmethod
    def velocity(cls, j):
        return cls("v", (int(j),))

    @classmethod
    def normal(cls, index=()):
        return cls("n", tuple(index))

    @property
    def is_normal(self):
        return self.kind == "n"

    def varied(self, j):
        """Shape variation of a normal-family vector along velocity ``j``."""
        if not self.is_normal:
            raise FormTypeError("only normal vectors vary with the shape")
        return Vector("n", self.index + (int(j),))

    @property
    def label(self):
        if self.kind == "v":
            return f"v_{self.index[0]}"
        return "n" if not self.index else delta_label(self.index) + " n"


class FormExpr:
    """Base class of form expression nodes."""

    degree: int | None
    dim: int | None

    @property
    def is_zero(self):
        return isinstance(self, Sum) and not self.terms

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(other, -1))

    def __neg__(self):
        return scale(self, -1)

    def __str__(self):
        return render_form(self)


def _check_dim(d):
    if d not in (1, 2, 3, 4):
        raise FormTypeError(f"ambient dimension must be 1..4, got {d}")


@dataclass(frozen=True)
class FormAtom(FormExpr):
    """Named field: ``omega`` (solution), ``phi`` (incident) or ``rho``; deltas index its shape derivative."""

    name: str
    deltas: tuple
    degree: int
    dim: int

    def __post_init__(self):
        _check_dim(self.dim)
        if self.name not in ATOM_NAMES:
            raise FormTypeError(f"unknown atom {self.name!r}")
        if not 0 <= self.degree <= self.dim:
            raise FormTypeError(f"atom degree {self.degree} outside 0..{self.dim}")
        if self.deltas and self.name != "omega":
            raise FormTypeError("only the solution carries shape derivatives")
        object.__setattr__(self, "deltas", tuple(sorted(self.deltas)))


@dataclass(frozen=True)
class ExtD(FormExpr):
    child: FormExpr
    degree: int = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        if self.child.degree >= self.child.dim:
            raise FormTypeError("exterior derivative of a top form; use ext_d")
        object.__setattr__(self, "degree", self.child.degree + 1)
        object.__setattr__(self, "dim", self.child.dim)


@dataclass(frozen=True)
class Hodge(FormExpr):
    metric: str
    child: FormExpr
    degree: int = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        if self.metric not in METRICS:
            raise FormTypeError(f"unknown metric {self.metric!r}")
        object.__setattr__(self, "degree", self.child.dim - self.child.degree)
        object.__setattr__(self, "dim", self.child.dim)


@dataclass(frozen=True)
class HodgeBoundary(FormExpr):
    """Hodge star of the boundary manifold, mapping degree l to d-1-l."""

    metric: str
    child: FormExpr
    degree: int = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        if self.metric not in METRICS:
            raise FormTypeError(f"unknown metric {self.metric!r}")
        if self.child.degree > self.child.dim - 1:
            raise FormTypeError(
                f"boundary Hodge star needs degree <= {self.child.dim - 1}, got {self.child.degree}")
        object.__setattr__(self, "degree", self.child.dim - 1 - self.child.degree)
        object.__setattr__(self, "dim", self.child.dim)


@dataclass(frozen=True)
class Contract(FormExpr):
    vector: Vector
    child: FormExpr
    degree: int = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        if self.child.degree < 1:
            raise FormTypeError("contraction of a 0-form; use contract")
        object.__setattr__(self, "degree", self.child.degree - 1)
        object.__setattr__(self, "dim", self.child.dim)


@dataclass(frozen=True)
class Wedge(FormExpr):
    left: FormExpr
    right: FormExpr
    degree: int = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        if self.left.dim != self.right.dim:
            raise FormTypeError("wedge of forms in different dimensions")
        deg = self.left.degree + self.right.degree
        if deg > self.left.dim:
            raise FormTypeError("wedge exceeds the top degree; use wedge")
        object.__setattr__(self, "degree", deg)
        object.__setattr__(self, "dim", self.left.dim)


@dataclass(frozen=True)
class TraceD(FormExpr):
    """Dirichlet trace, shorthand for ``i_n * X``."""

    child: FormExpr
    degree: int = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        if self.child.degree >= self.child.dim:
            raise FormTypeError("Dirichlet trace of a top form vanishes; use trace_d")
        object.__setattr__(self, "degree", self.child.dim - self.child.degree - 1)
        object.__setattr__(self, "dim", self.child.dim)


@dataclass(frozen=True)
class TraceN(FormExpr):
    """Neumann trace, shorthand for ``*G_alpha i_n d X``."""

    child: FormExpr
    degree: int = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        if self.child.degree >= self.child.dim:
            raise FormTypeError("Neumann trace of a top form vanishes; use trace_n")
        object.__setattr__(self, "degree", self.child.dim - 1 - self.child.degree)
        object.__setattr__(self, "dim", self.child.dim)


@dataclass(frozen=True)
class Jump(FormExpr):
    """Exterior minus interior boundary value."""

    child: FormExpr
    degree: int = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "degree", self.child.degree)
        object.__setattr__(self, "dim", self.child.dim)


@dataclass(frozen=True)
class Sum(FormExpr):
    """Weighted sum; each term is ``(c, p, expr)`` meaning ``c * (i lambda)**p * expr``."""

    terms: tuple = ()
    degree: int | None = field(init=False)
    dim: int | None = field(init=False)

    def __post_init__(self):
        degs = {t[2].degree for t in self.terms}
        dims = {t[2].dim for t in self.terms}
        if len(degs) > 1 or len(dims) > 1:
            raise FormTypeError(f"sum of forms of mixed degree {sorted(degs)}")
        object.__setattr__(self, "degree", degs.pop() if degs else None)
        object.__setattr__(self, "dim", dims.pop() if dims else None)


@dataclass(frozen=True)
class _Lie(FormExpr):
    # Lie derivative, used only by the Cartan equivalence checker
    vector: Vector
    child: FormExpr
    degree: int = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "degree", self.child.degree)
        object.__setattr__(self, "dim", self.child.dim)


ZERO = Sum(())
UNARY = (ExtD, Hodge, HodgeBoundary, Contract, TraceD, TraceN, Jump, _Lie)


# ---------------------------------------------------------------- constructors

def atom(name, degree, dim, deltas=()):
    return FormAtom(name, tuple(deltas), degree, dim)


def _from_combination(comb):
    terms = [(c, p, e) for c, p, e in comb.items()]
    if len(terms) == 1 and terms[0][:2] == (1, 0):
        return terms[0][2]
    terms.sort(key=lambda t: (render_term(t[2]), t[1], t[0]))
    return Sum(tuple(terms))


def _as_combination(e):
    if isinstance(e, Sum):
        comb = Combination()
        for c, p, t in e.terms:
            comb = comb + Combination.single(t, c, p)
        return comb
    return Combination.single(e)


def _lift(e, build):
    """Apply a linear node builder termwise over a Sum."""
    if isinstance(e, Sum):
        return _from_combination(_as_combination(e).map(lambda t: _as_combination(build(t))))
    return build(e)


def add(*exprs):
    comb = Combination()
    for e in exprs:
        comb = comb + _as_combination(e)
    return _from_combination(comb)


def scale(e, c=1, p=0):
    return _from_combination(_as_combination(e).scaled(c, p))


def ext_d(x):
    if x.is_zero:
        return ZERO
    if x.degree >= x.dim:
        return ZERO
    return _lift(x, ExtD)


def hodge(x, metric="1"):
    return ZERO if x.is_zero else _lift(x, lambda t: Hodge(metric, t))


def hodge_boundary(x, metric="1"):
    return ZERO if x.is_zero else _lift(x, lambda t: HodgeBoundary(metric, t))


def contract(vector, x):
    if x.is_zero or x.degree == 0:
        return ZERO
    return _lift(x, lambda t: Contract(vector, t))


def wedge(a, b):
    if a.is_zero or b.is_zero or a.degree + b.degree > a.dim:
        return ZERO
    return _from_combination(_as_combination(a).product(
        _as_combination(b), lambda l, r: Combination.single(Wedge(l, r))))


def trace_d(x):
    if x.is_zero or x.degree >= x.dim:
        return ZERO
    return _lift(x, TraceD)


def trace_n(x):
    if x.is_zero or x.degree >= x.dim:
        return ZERO
    return _lift(x, TraceN)


def jump(x):
    return ZERO if x.is_zero else _lift(x, Jump)


def lie(vector, x):
    return ZERO if x.is_zero else _lift(x, lambda t: _Lie(vector, t))


def children(e):
    if isinstance(e, Wedge):
        return (e.left, e.right)
    if isinstance(e, UNARY):
        return (e.child,)
    if isinstance(e, Sum):
        return tuple(t[2] for t in e.terms)
    return ()


def rebuild(e, kids):
    """Same node type and parameters with new children, through the smart constructors."""
    if isinstance(e, ExtD):
        return ext_d(kids[0])
    if isinstance(e, Hodge):
        return hodge(kids[0], e.metric)
    if isinstance(e, HodgeBoundary):
        return hodge_boundary(kids[0], e.metric)
    if isinstance(e, Contract):
        return contract(e.vector, kids[0])
    if isinstance(e, TraceD):
        return trace_d(kids[0])
    if isinstance(e, TraceN):
        return trace_n(kids[0])
    if isinstance(e, Jump):
        return jump(kids[0])
    if isinstance(e, _Lie):
        return lie(e.vector, kids[0])
    if isinstance(e, Wedge):
        return wedge(*kids)
    if isinstance(e, Sum):
        return add(*(scale(k, c, p) for k, (c, p, _) in zip(kids, e.terms)))
    return e


# ---------------------------------------------------------------- simplify

def _sign(k):
    return -1 if k % 2 else 1


def _normalize(e):
    """Combination of normal-form monomials equal to ``e``."""
    if isinstance(e, FormAtom):
        return Combination.single(e)
    if isinstance(e, Sum):
        out = Combination()
        for c, p, t in e.terms:
            out = out + _normalize(t).scaled(c, p)
        return out
    if isinstance(e, Wedge):
        return _normalize(e.left).product(_normalize(e.right), _wedge_rule)
    return _normalize(e.child).map(lambda m: _unary_rule(e, m))


def _checked(rule_input_degree, comb):
    for _, _, m in comb.items():
        if m.degree != rule_input_degree:
            raise FormTypeError(f"rewrite changed degree {rule_input_degree} -> {m.degree}")
    return comb


def _wedge_rule(a, b):
    if a.degree + b.degree > a.dim:
        return Combination()
    return Combination.single(Wedge(a, b))


def _unary_rule(node, m):
    """Apply the unary operator of ``node`` to the normal-form monomial ``m``."""
    if isinstance(node, ExtD):
        if m.degree >= m.dim or isinstance(m, ExtD):
            return Combination()
        if isinstance(m, Wedge):
            out = (_normalize(wedge(ext_d(m.left), m.right))
                   + _normalize(wedge(m.left, ext_d(m.right))).scaled(_sign(m.left.degree)))
            return _checked(m.degree + 1, out)
        return Combination.single(ExtD(m))
    if isinstance(node, Contract):
        v = node.vector
        if m.degree == 0:
            return Combination()
        if isinstance(m, Contract) and m.vector == v:
            return Combination()
        if isinstance(m, Wedge):
            out = (_normalize(wedge(contract(v, m.left), m.right))
                   + _normalize(wedge(m.left, contract(v, m.right))).scaled(_sign(m.left.degree)))
            return _checked(m.degree - 1, out)
        return Combination.single(Contract(v, m))
    if isinstance(node, (TraceD, TraceN)) and m.degree >= m.dim:
        return Combination()
    return Combination.single(rebuild(node, (m,)))


@lru_cache(maxsize=4096)
def simplify(e):
    """Normal form: linear operators distributed over sums, Leibniz rules for
    d and contractions over wedges, ``d d = 0``, ``i_v i_v = 0``, degree
    annihilation, like terms collected and terms sorted."""
    if isinstance(e, JumpPair):
        return JumpPair(simplify(e.dirichlet), simplify(e.neumann))
    return _from_combination(_normalize(e))


def cartan_expand(e):
    """Replace each Lie derivative by ``i_v d X + d i_v X``."""
    if isinstance(e, _Lie):
        x = cartan_expand(e.child)
        return add(contract(e.vector, ext_d(x)), ext_d(contract(e.vector, x)))
    kids = children(e)
    return rebuild(e, tuple(cartan_expand(k) for k in kids)) if kids else e


def cartan_rewrite(e):
    """Rewrite every ``i_v d X`` as ``L_v X - d i_v X``."""
    kids = children(e)
    if not kids:
        return e
    if isinstance(e, Contract) and isinstance(e.child, ExtD):
        x = cartan_rewrite(e.child.child)
        return add(lie(e.vector, x), scale(ext_d(contract(e.vector, x)), -1))
    return rebuild(e, tuple(cartan_rewrite(k) for k in kids))


def cartan_equivalent(a, b):
    """True when both sides agree after expanding Lie derivatives and simplifying."""
    return simplify(cartan_expand(a)) == simplify(cartan_expand(b))


# ---------------------------------------------------------------- substitutions

def expand_traces(e):
    """Replace trace shorthands by their definitions."""
    if isinstance(e, JumpPair):
        return JumpPair(expand_traces(e.dirichlet), expand_traces(e.neumann))
    if isinstance(e, TraceD):
        return contract(Vector.normal(), hodge(expand_traces(e.child)))
    if isinstance(e, TraceN):
        return hodge_boundary(contract(Vector.normal(), ext_d(expand_traces(e.child))), "alpha")
    kids = children(e)
    return rebuild(e, tuple(expand_traces(k) for k in kids)) if kids else e


def _leibniz(e, hit):
    """Sum over single occurrences of a leaf-level substitution.

    ``hit(node)`` returns the replacement for a directly varied node, or None.
    """
    if isinstance(e, Sum):
        return add(*(scale(_leibniz(t, hit), c, p) for c, p, t in e.terms))
    if isinstance(e, (TraceD, TraceN)):
        return _leibniz(expand_traces(e), hit)
    direct = hit(e)
    parts = [direct] if direct is not None else []
    kids = children(e)
    for i, k in enumerate(kids):
        dk = _leibniz(k, hit)
        if not dk.is_zero:
            parts.append(rebuild(e, kids[:i] + (dk,) + kids[i + 1:]))
    return add(*parts) if parts else ZERO


def delta_omega(e, j):
    """Shape variation through the solution: every ``omega`` atom gains delta ``j``.

    Terms free of the solution vanish, since the incident field does not
    depend on the shape.
    """
    def hit(node):
        if isinstance(node, FormAtom) and node.name == "omega":
            return FormAtom("omega", node.deltas + (int(j),), node.degree, node.dim)
        return None
    if isinstance(e, JumpPair):
        return JumpPair(delta_omega(e.dirichlet, j), delta_omega(e.neumann, j))
    return _leibniz(e, hit)


def delta_normal(e, j):
    """Shape variation through explicit normals: Leibniz rule over normal contractions."""
    def hit(node):
        if isinstance(node, Contract) and node.vector.is_normal:
            return contract(node.vector.varied(j), node.child)
        return None
    if isinstance(e, JumpPair):
        return JumpPair(delta_normal(e.dirichlet, j), delta_normal(e.neumann, j))
    return _leibniz(e, hit)


def drop_normal_variations(e):
    """Set every varied normal ``d_i n`` to zero."""
    if isinstance(e, JumpPair):
        return JumpPair(drop_normal_variations(e.dirichlet), drop_normal_variations(e.neumann))
    if isinstance(e, Contract) and e.vector.is_normal and e.vector.index:
        return ZERO
    kids = children(e)
    return rebuild(e, tuple(drop_normal_variations(k) for k in kids)) if kids else e


def atoms(e):
    if isinstance(e, JumpPair):
        return atoms(e.dirichlet) | atoms(e.neumann)
    if isinstance(e, FormAtom):
        return {e}
    out = set()
    for k in children(e):
        out |= atoms(k)
    return out


# ---------------------------------------------------------------- transmission pair

@dataclass(frozen=True)
class JumpPair:
    """Transmission datum: jumps of the Dirichlet-shape and Neumann-shape traces."""

    dirichlet: FormExpr
    neumann: FormExpr

    @property
    def is_zero(self):
        return self.dirichlet.is_zero and self.neumann.is_zero

    def __str__(self):
        return render_form(self)


# ---------------------------------------------------------------- rendering

_HODGE = {"1": "*", "alpha": "*_alpha", "alpha^-1": "*_alpha^-1", "k^2": "*_k^2"}
_HODGE_B = {"1": "*G", "alpha": "*G_alpha", "alpha^-1": "*G_alpha^-1", "k^2": "*G_k^2"}


@lru_cache(maxsize=8192)
def render_term(e):
    """One-line text of a monomial; sums are parenthesized inline."""
    if isinstance(e, FormAtom):
        return (delta_label(e.deltas) + " " if e.deltas else "") + e.name
    if isinstance(e, Sum):
        if not e.terms:
            return "0"
        body = " ".join(term_line(c, p, render_term(t)) for c, p, t in e.terms)
        return "(" + (body[2:] if body.startswith("+ ") else body) + ")"
    if isinstance(e, ExtD):
        return "d " + render_term(e.child)
    if isinstance(e, Hodge):
        return _HODGE[e.metric] + " " + render_term(e.child)
    if isinstance(e, HodgeBoundary):
        return _HODGE_B[e.metric] + " " + render_term(e.child)
    if isinstance(e, Contract):
        return "i_{" + e.vector.label + "} " + render_term(e.child)
    if isinstance(e, _Lie):
        return "L_{" + e.vector.label + "} " + render_term(e.child)
    if isinstance(e, TraceD):
        return "TrD(" + render_term(e.child) + ")"
    if isinstance(e, TraceN):
        return "TrN(" + render_term(e.child) + ")"
    if isinstance(e, Jump):
        return "[" + render_term(e.child) + "]"
    if isinstance(e, Wedge):
        return "(" + render_term(e.left) + " ^ " + render_term(e.right) + ")"
    raise FormTypeError(f"cannot render {type(e).__name__}")


def _lines(e):
    if e.is_zero:
        return ["0"]
    terms = e.terms if isinstance(e, Sum) else ((1, 0, e),)
    return [term_line(c, p, render_term(t)) for c, p, t in terms]


def render_form(e):
    """Canonical multi-line text: one signed term per line, sorted."""
    if isinstance(e, JumpPair):
        return ("dirichlet:\n" + render_form(e.dirichlet)
                + "\nneumann:\n" + render_form(e.neumann))
    return "\n".join(_lines(simplify(e)))


# ---------------------------------------------------------------- JSON

def to_json(e):
    """Machine-readable AST as nested dictionaries."""
    if isinstance(e, JumpPair):
        return {"node": "JumpPair", "dirichlet": to_json(e.dirichlet), "neumann": to_json(e.neumann)}
    if isinstance(e, FormAtom):
        return {"node": "FormAtom", "name": e.name, "deltas": list(e.deltas),
                "degree": e.degree, "dim": e.dim}
    if isinstance(e, Sum):
        return {"node": "Sum", "terms": [{"c": c, "ilambda_power": p, "expr": to_json(t)}
                                         for c, p, t in e.terms]}
    out = {"node": type(e).__name__.lstrip("_")}
    if isinstance(e, (Hodge, HodgeBoundary)):
        out["metric"] = e.metric
    if isinstance(e, (Contract, _Lie)):
        out["vector"] = {"kind": e.vector.kind, "index": list(e.vector.index)}
    if isinstance(e, Wedge):
        out["left"], out["right"] = to_json(e.left), to_json(e.right)
    else:
        out["child"] = to_json(e.child)
    out["degree"] = e.degree
    return out


def from_json(obj):
    node = obj["node"]
    if node == "JumpPair":
        return JumpPair(from_json(obj["dirichlet"]), from_json(obj["neumann"]))
    if node == "FormAtom":
        return atom(obj["name"], obj["degree"], obj["dim"], obj["deltas"])
    if node == "Sum":
        return add(*(scale(from_json(t["expr"]), t["c"], t["ilambda_power"]) for t in obj["terms"]))
    if node == "Wedge":
        return wedge(from_json(obj["left"]), from_json(obj["right"]))
    child = from_json(obj["child"])
    if node in ("Contract", "Lie"):
        vec = Vector(obj["vector"]["kind"], tuple(obj["vector"]["index"]))
        return contract(vec, child) if node == "Contract" else lie(vec, child)
    builders = {"ExtD": ext_d, "TraceD": trace_d, "TraceN": trace_n, "Jump": jump,
                "Hodge": lambda x: hodge(x, obj["metric"]),
                "HodgeBoundary": lambda x: hodge_boundary(x, obj["metric"])}
    if node not in builders:
        raise FormTypeError(f"unknown node {node!r}")
    return builders[node](child)
