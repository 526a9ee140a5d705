"""Boundary data, solves and Taylor expansions for shape derivatives.

Shape derivatives of the scattered field solve the same exterior problem as
the field itself; only the boundary datum changes.  The data of orders 1 and
2 are assembled here from boundary jets of the total field and of the
first-order derivative fields.  Directional operators are evaluated under
the extension convention of :mod:`shapetaylor.geometry` (fields constant
along normals), with these reductions at the boundary (f a boundary scalar,
g a scalar carried by the normal):

* grad_j f = v_j f_n and grad_2 grad_1 f = v_1 v_2 f_nn
* div_j(g n) = v_j (kappa g + g_n)
* div_2 div_1(g n) = v_1 v_2 (2 kappa g_n + g_nn)
* div_j((grad f . m) n) = v_j (m . tau) f_ns for tangential m
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .boundary_calculus import BoundaryJet
from .convergence import fit_order
from .geometry import (BoundaryGrid, build_grid, composed_flow_curve,
                       mixed_normal_closed_form, normal_shape_derivative,
                       offset_curve)
from .solvers import (BoundaryCondition, IncidentField, NystromOperator,
                      incident_data, nystrom_scatter, nystrom_solve,
                      nystrom_transmission_solve, series_solve,
                      series_solve_data)

__all__ = [
    "AssemblyError",
    "UnsupportedOrderError",
    "SweptRegionError",
    "Scene",
    "DerivativeProblemData",
    "TaylorRecord",
    "first_order_data",
    "second_order_data",
    "shape_derivative_solve",
    "taylor_evaluate",
    "remainder_study",
    "mixed_remainder_study",
    "direct_solve",
    "thread_count",
]

CONVENTION = "normal-constant extension; sum flow for composed perturbations"


class AssemblyError(RuntimeError):
    """Second-order data failed the v1 <-> v2 symmetry check."""


class UnsupportedOrderError(ValueError):
    """Numeric shape derivatives are available up to order 2."""


class SweptRegionError(ValueError):
    """An evaluation point lies in the region swept by the perturbation."""


@dataclass
class Scene:
    """Scattering configuration: obstacle, boundary condition and incident wave."""

    curve: object
    bc: BoundaryCondition
    k: float
    incident: IncidentField
    n_nodes: int = 256
    n_modes: int = None
    backend: str = "auto"

    def use_series(self, curve=None):
        curve = self.curve if curve is None else curve
        if self.bc.kind == "transmission":
            return curve.is_circle()
        return self.backend == "series" and curve.is_circle()


@dataclass
class DerivativeProblemData:
    """Boundary datum of a shape-derivative problem.

    ``rhs`` is one array (soft: trace, hard: conormal derivative, impedance:
    alpha d_n u + i lam u) or a pair of jump data for transmission.
    ``provenance`` maps each contributing term to its max-norm.
    """

    order: int
    bc_type: str
    rhs: object
    provenance: dict = field(default_factory=dict)

    def arrays(self):
        return list(self.rhs) if isinstance(self.rhs, tuple) else [self.rhs]

    def max_norm(self):
        return max(float(np.abs(a).max()) for a in self.arrays())


def _record(prov, name, val):
    prov[name] = float(np.abs(val).max())
    return val


def _require(jet, *names):
    if jet is None:
        raise ValueError("missing boundary jet")
    for nm in names:
        if getattr(jet, nm, None) is None:
            from .boundary_calculus import IncompleteJetError
            raise IncompleteJetError(f"jet entry {nm} missing")


def _first_dirichlet(U, v):
    return -v * U.u_n


def _first_neumann(U, v, v_s, grid, prov, tag=""):
    a, kap = U.alpha, grid.curvature
    t1 = _record(prov, f"div_1(alpha (grad u . n) n){tag}", a * v * (kap * U.u_n + U.u_nn))
    t2 = _record(prov, f"alpha (grad u . d_1 n) n{tag}", -a * v_s * U.u_s)
    return -(t1 + t2)


# Curvilinear form of the data assembled by first_order_data, as canonical
# monomial text (U = total field; see symbolic.reduce for the notation).
FIRST_ORDER_FORMULAS = {
    "soft": "- v_1 U_n",
    "hard": "+ alpha v_1 U_ss\n+ alpha v_1_s U_s\n+ k^2 v_1 U",
    "impedance": ("+ alpha v_1 U_ss\n+ alpha v_1_s U_s\n+ k^2 v_1 U\n"
                  "- i lambda kappa v_1 U\n- i lambda v_1 U_n"),
}


def first_order_data(bc, base_jet, incident_jet, v, grid, interior_jet=None, normal_deriv=None):
    """Boundary datum of the first shape derivative delta_v u.

    Parameters
    ----------
    bc : BoundaryCondition
    base_jet : BoundaryJet
        Jet of the total exterior field.
    incident_jet : BoundaryJet or None
        Jet of the incident field, used only to report its share in the
        provenance.
    v : NormalSpeedField
    grid : BoundaryGrid
    interior_jet : BoundaryJet, transmission only.
    normal_deriv : (n, 2) array, optional
        delta_v n; defaults to the closed form -v_s tau.
    """
    _require(base_jet, *BoundaryJet.ENTRIES)
    vv = v.on(grid)
    dn = normal_deriv if normal_deriv is not None else normal_shape_derivative(grid, v, 1)
    vt = np.einsum("ij,ij->i", dn, grid.tangent)
    prov = {}
    if incident_jet is not None:
        prov["incident share of grad_1 u^t"] = float(np.abs(vv * incident_jet.u_n).max())
    kind = bc.kind
    if kind == "soft":
        rhs = _record(prov, "-grad_1 u^t", _first_dirichlet(base_jet, vv))
    elif kind == "hard":
        rhs = _first_neumann(base_jet, vv, -vt, grid, prov)
    elif kind == "impedance":
        rhs = _first_neumann(base_jet, vv, -vt, grid, prov)
        rhs = rhs - 1j * bc.lam * _record(
            prov, "i lam div_1(u n)", vv * (grid.curvature * base_jet.u + base_jet.u_n))
    else:
        if interior_jet is None:
            raise ValueError("transmission data needs the interior jet")
        f = _first_dirichlet(base_jet, vv) - _first_dirichlet(interior_jet, vv)
        g = (_first_neumann(base_jet, vv, -vt, grid, prov, " [ext]")
             - _first_neumann(interior_jet, vv, -vt, grid, prov, " [int]"))
        rhs = (f, g)
    return DerivativeProblemData(1, kind, rhs, prov)


def _second_dirichlet(U, A, B, a, b):
    return -a * b * U.u_nn - a * B.u_n - b * A.u_n


def _second_neumann(U, A, B, a, b, at, bt, d12, grid, prov, tag=""):
    """Second-order conormal datum; at, bt = tangential parts of delta_1 n, delta_2 n."""
    al, kap = U.alpha, grid.curvature
    d12t = np.einsum("ij,ij->i", d12, grid.tangent)
    d12n = np.einsum("ij,ij->i", d12, grid.normal)
    terms = {
        "div_2 div_1 (alpha (grad u . n) n)": al * a * b * (2 * kap * U.u_nn + U.u_nnn),
        "div_2 (alpha (grad u . d_1 n) n)": al * b * at * U.u_ns,
        "div_1 (alpha (grad u . d_2 n) n)": al * a * bt * U.u_ns,
        "alpha (grad u . d_12 n) n": al * (d12t * U.u_s + d12n * U.u_n),
        "div_1 (alpha (grad d_2 u . n) n)": al * a * (kap * B.u_n + B.u_nn),
        "alpha (grad d_2 u . d_1 n) n": al * at * B.u_s,
        "div_2 (alpha (grad d_1 u . n) n)": al * b * (kap * A.u_n + A.u_nn),
        "alpha (grad d_1 u . d_2 n) n": al * bt * A.u_s,
    }
    total = 0.0
    for name, val in terms.items():
        total = total - _record(prov, name + tag, val)
    return total


def second_order_data(bc, base_jet, jet1, jet2, v1, v2, grid, normal_derivs=None,
                      interior_jets=None, check_symmetry=True):
    """Boundary datum of the mixed second shape derivative delta_{v1,v2} u.

    Parameters
    ----------
    bc : BoundaryCondition
    base_jet : BoundaryJet
        Jet of the total exterior field.
    jet1, jet2 : BoundaryJet
        Jets of delta_{v1} u and delta_{v2} u (exterior).
    v1, v2 : NormalSpeedField
    grid : BoundaryGrid
    normal_derivs : (d1n, d2n, d12n) arrays, optional
        Shape derivatives of the normal; default closed forms.
    interior_jets : (U, A, B), transmission only.
    check_symmetry : bool
        Recompute with (v1, jet1) and (v2, jet2) swapped and raise
        :class:`AssemblyError` if the data differ by more than 1e-9.
    """
    for j in (base_jet, jet1, jet2):
        _require(j, *BoundaryJet.ENTRIES)
    if normal_derivs is None:
        normal_derivs = (normal_shape_derivative(grid, v1, 1),
                         normal_shape_derivative(grid, v2, 1),
                         mixed_normal_closed_form(grid, v1, v2))
    d1n, d2n, d12n = normal_derivs
    a, b = v1.on(grid), v2.on(grid)
    at = np.einsum("ij,ij->i", d1n, grid.tangent)
    bt = np.einsum("ij,ij->i", d2n, grid.tangent)

    Ui, Ai, Bi = interior_jets if interior_jets is not None else (None, None, None)
    if bc.kind == "transmission" and Ui is None:
        raise ValueError("transmission data needs interior jets")

    def full(A, B, Ai, Bi, a, b, at, bt, prov):
        U = base_jet
        if bc.kind == "soft":
            return _record(prov, "-grad_2 grad_1 u - grad_1 d_2 u - grad_2 d_1 u",
                           _second_dirichlet(U, A, B, a, b))
        if bc.kind == "transmission":
            f = _second_dirichlet(U, A, B, a, b) - _second_dirichlet(Ui, Ai, Bi, a, b)
            prov["[grad_2 grad_1 u + grad_1 d_2 u + grad_2 d_1 u]"] = float(np.abs(f).max())
            g = (_second_neumann(U, A, B, a, b, at, bt, d12n, grid, prov, " [ext]")
                 - _second_neumann(Ui, Ai, Bi, a, b, at, bt, d12n, grid, prov, " [int]"))
            return (f, g)
        rhs = _second_neumann(U, A, B, a, b, at, bt, d12n, grid, prov)
        if bc.kind == "impedance":
            kap = grid.curvature
            il = 1j * bc.lam
            rhs = rhs - il * _record(prov, "i lam div_2 div_1 (u n)",
                                     a * b * (2 * kap * U.u_n + U.u_nn))
            rhs = rhs - il * _record(prov, "i lam div_1 (d_2 u n)", a * (kap * B.u + B.u_n))
            rhs = rhs - il * _record(prov, "i lam div_2 (d_1 u n)", b * (kap * A.u + A.u_n))
        return rhs

    prov = {}
    rhs = full(jet1, jet2, Ai, Bi, a, b, at, bt, prov)
    data = DerivativeProblemData(2, bc.kind, rhs, prov)
    if check_symmetry:
        swapped = full(jet2, jet1, Bi, Ai, b, a, bt, at, {})
        s1 = data.arrays()
        s2 = list(swapped) if isinstance(swapped, tuple) else [swapped]
        scale = max(1.0, data.max_norm())
        diff = max(float(np.abs(x - y).max()) for x, y in zip(s1, s2))
        if diff > 1e-9 * scale:
            raise AssemblyError(f"second-order data not symmetric in (v1, v2): {diff:.2e}")
        data.provenance["symmetry defect"] = diff
    return data


class _DataSolver:
    """Solves exterior problems on one curve, reusing one factorization."""

    def __init__(self, scene, grid):
        self.scene = scene
        self.grid = grid
        self.bc = scene.bc
        self.series = scene.use_series()
        if not self.series:
            if self.bc.kind == "transmission":
                raise ValueError("transmission shape derivatives require a circle")
            self.operator = NystromOperator(grid, scene.k / np.sqrt(self.bc.alpha))

    def base(self):
        s = self.scene
        if self.series:
            sol = series_solve(self.grid.curve.radius(), self.bc, s.k, s.incident,
                               n_modes=s.n_modes, n_nodes=self.grid.n)
            sol.grid = self.grid
            return sol
        return nystrom_scatter(self.grid, self.bc, s.k, s.incident, self.operator)

    def solve(self, rhs):
        s = self.scene
        if self.series:
            return series_solve_data(self.grid, self.bc, s.k, rhs, s.n_modes)
        return nystrom_solve(self.grid, self.bc.kind, rhs, s.k, self.bc.alpha,
                             self.bc.lam, self.operator)


@dataclass
class TaylorRecord:
    """Base scattered field and its shape derivatives up to order 2.

    ``derivatives`` is keyed by tuples of velocity indices: ``(i,)`` for
    delta_{v_i} u and ``(i, j)`` for delta_{v_i, v_j} u.
    """

    scene: Scene
    grid: BoundaryGrid
    velocities: list
    base: object
    derivatives: dict
    data: dict
    order: int
    convention: str = CONVENTION

    def symmetry_defect(self, i=0, j=1):
        """Max trace difference between delta_{[v_i, v_j]} and delta_{[v_j, v_i]}."""
        a, b = self.derivatives.get((i, j)), self.derivatives.get((j, i))
        if a is None or b is None:
            return None
        return float(np.abs(a.trace() - b.trace()).max())

    def max_reach(self):
        return [float(np.abs(v(np.linspace(0, 2 * np.pi, 512, endpoint=False))).max())
                for v in self.velocities]

    def evaluate(self, points, t, order=None):
        return taylor_evaluate(self, points, t, order)


def shape_derivative_solve(scene, velocities, order=2, symmetric_pairs=False):
    """Base solve, jets, and derivative solves up to ``order``.

    Parameters
    ----------
    scene : Scene
    velocities : list of NormalSpeedField
    order : {0, 1, 2}
    symmetric_pairs : bool
        Also solve delta_{[v_j, v_i]} for i < j (for symmetry checks).
    """
    if order > 2:
        raise UnsupportedOrderError(
            "numeric shape derivatives stop at order 2; use the symbolic module "
            "(shapetaylor.symbolic.recurrence) for higher-order boundary data")
    if order < 0:
        raise ValueError("order must be non-negative")
    grid = build_grid(scene.curve, scene.n_nodes)
    solver = _DataSolver(scene, grid)
    base = solver.base()
    inc_jet = scene.incident.jet(grid)
    U = base.jet() + inc_jet
    Ui = base.interior_jet() if scene.bc.kind == "transmission" else None
    derivs, data = {}, {}
    jets, ijets = {}, {}
    for i, v in enumerate(velocities[:] if order >= 1 else []):
        d = first_order_data(scene.bc, U, inc_jet, v, grid, interior_jet=Ui)
        sol = solver.solve(d.rhs)
        derivs[(i,)], data[(i,)] = sol, d
        jets[i] = sol.jet()
        if Ui is not None:
            ijets[i] = sol.interior_jet()
    if order >= 2:
        nv = len(velocities)
        pairs = [(i, j) for i in range(nv) for j in range(i, nv)]
        if symmetric_pairs:
            pairs += [(j, i) for i in range(nv) for j in range(i + 1, nv)]
        for i, j in pairs:
            d = second_order_data(scene.bc, U, jets[i], jets[j], velocities[i], velocities[j], grid,
                                  interior_jets=(Ui, ijets[i], ijets[j]) if Ui is not None else None)
            derivs[(i, j)], data[(i, j)] = solver.solve(d.rhs), d
    return TaylorRecord(scene, grid, list(velocities), base, derivs, data, order)


def _swept_check(record, points, ts):
    reach = sum(abs(t) * m for t, m in zip(ts, record.max_reach()))
    dist = record.grid.distance(points)
    if np.any(dist <= reach + 3 * record.grid.spacing):
        raise SweptRegionError("evaluation point inside the region swept by the perturbation")


def taylor_evaluate(record, points, t, order=None):
    """Shape Taylor polynomial of the scattered field at exterior points.

    ``t`` scalar uses the first velocity: u + t d u + t^2/2 d[v,v] u.
    ``t`` a tuple (t_1, ..., t_m) uses the multivariable form
    u + sum t_i d_i u + 1/2 sum_{i,j} t_i t_j d_{ij} u.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    ts = (float(t),) if np.ndim(t) == 0 else tuple(float(x) for x in t)
    order = record.order if order is None else order
    if order > record.order:
        raise UnsupportedOrderError("record holds fewer derivative orders than requested")
    _swept_check(record, points, ts)
    out = record.base.evaluate(points).astype(complex)
    if order >= 1:
        for i, ti in enumerate(ts):
            if ti:
                out = out + ti * record.derivatives[(i,)].evaluate(points)
    if order >= 2:
        for i, ti in enumerate(ts):
            for j, tj in enumerate(ts):
                if ti and tj:
                    key = (i, j) if (i, j) in record.derivatives else (j, i)
                    out = out + 0.5 * ti * tj * record.derivatives[key].evaluate(points)
    return out


def thread_count():
    """Worker count from SHAPETAYL_THREADS (default: min(4, cpu count))."""
    env = os.environ.get("SHAPETAYL_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(4, os.cpu_count() or 1))


def direct_solve(scene, curve, all_circles=None):
    """Scattered field of the scene's incident wave for another obstacle ``curve``."""
    bc = scene.bc
    use_series = all_circles if all_circles is not None else curve.is_circle()
    grid = build_grid(curve, scene.n_nodes)
    if bc.kind == "transmission":
        if use_series:
            return series_solve(curve.radius(), bc, scene.k, scene.incident,
                                n_modes=scene.n_modes, n_nodes=scene.n_nodes, max_derivative=0)
        return nystrom_transmission_solve(grid, bc, scene.k, incident_data(bc, scene.incident, grid))
    if use_series and scene.backend == "series":
        return series_solve(curve.radius(), bc, scene.k, scene.incident,
                            n_modes=scene.n_modes, n_nodes=scene.n_nodes, max_derivative=0)
    return nystrom_scatter(grid, bc, scene.k, scene.incident)


def _pmap(func, items, threads):
    if threads <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(func, items))


def remainder_study(record, ts, points, orders=(0, 1, 2), threads=None):
    """Taylor remainders against direct solves on offset curves.

    For each t the obstacle is replaced by the offset of the base curve along
    the first velocity, solved directly, and compared at ``points`` with the
    Taylor polynomials of the requested orders.

    Returns
    -------
    dict with ``ts``, ``errors`` (order -> list) and ``fits`` (order -> fit).
    """
    ts = [float(t) for t in ts]
    points = np.atleast_2d(np.asarray(points, dtype=float))
    _swept_check(record, points, (max(ts),))
    v = record.velocities[0]
    curves = [offset_curve(record.grid, v, t) for t in ts]
    circles = all(c.is_circle() for c in curves)
    threads = thread_count() if threads is None else threads
    exact = _pmap(lambda c: direct_solve(record.scene, c, circles).evaluate(points), curves, threads)
    errors = {}
    for N in orders:
        errors[N] = [float(np.abs(u - taylor_evaluate(record, points, t, N)).max())
                     for t, u in zip(ts, exact)]
    fits = {}
    for N in orders:
        try:
            fits[N] = fit_order(ts, errors[N])
        except ValueError as exc:
            fits[N] = {"error": str(exc)}
    return {"ts": ts, "errors": errors, "fits": fits, "series_reference": circles}


def mixed_remainder_study(record, t_values, points, threads=None):
    """Two-field remainder of the order-2 expansion on a (t1, t2) grid.

    The remainder bound is measured as a function of tau = max(t1, t2): for
    each tau the largest error over pairs with that maximum is fitted against
    tau (``fit``).  The fit over all pairs is reported as ``fit_all_pairs``.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    t_values = [float(t) for t in t_values]
    pairs = [(a, b) for a in t_values for b in t_values]
    _swept_check(record, points, (max(t_values), max(t_values)))
    v1, v2 = record.velocities[:2]
    curves = [composed_flow_curve(record.grid, v1, a, v2, b) for a, b in pairs]
    threads = thread_count() if threads is None else threads
    exact = _pmap(lambda c: direct_solve(record.scene, c, False).evaluate(points), curves, threads)
    errs = [float(np.abs(u - taylor_evaluate(record, points, p, 2)).max())
            for p, u in zip(pairs, exact)]
    scale = [max(p) for p in pairs]
    envelope = [max(e for e, s in zip(errs, scale) if s == tau) for tau in t_values]
    return {"pairs": pairs, "errors": errs, "taus": t_values, "envelope": envelope,
            "fit": fit_order(t_values, envelope), "fit_all_pairs": fit_order(scale, errs)}
