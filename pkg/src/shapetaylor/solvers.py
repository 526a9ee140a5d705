"""Exterior Helmholtz solvers: circle series and Nystrom single-layer method.

The field equation is div(alpha grad u) + k^2 u = 0, so the wavenumber in a
medium is k / sqrt(alpha).  Boundary data conventions:

* ``soft``: u = g
* ``hard``: alpha d_n u = h
* ``impedance``: alpha d_n u + i lam u = h
* ``transmission``: [u] = f and [alpha d_n u] = g, with [w] = w_ext - w_int.

Radiation is built into the representations (outgoing Hankel modes and the
single-layer potential), so no artificial outer boundary is used.
"""

from dataclasses import dataclass
from math import comb

import numpy as np
import scipy.linalg as sla

from .boundary_calculus import BoundaryScalar, build_jet, jet_from_cartesian
from .geometry import BoundaryGrid, ClosedCurve
from .specfun import bessel_derivative, besselj, hankel1

__all__ = [
    "SolverError",
    "NearResonanceError",
    "AccuracyGuardError",
    "IncidentField",
    "BoundaryCondition",
    "ScatterSolution",
    "SeriesSolution",
    "NystromSolution",
    "NystromOperator",
    "series_solve",
    "series_solve_data",
    "nystrom_solve",
    "nystrom_scatter",
    "nystrom_transmission_solve",
    "evaluate_field",
    "far_field",
]

EULER_GAMMA = 0.57721566490153286061
BC_TYPES = ("soft", "hard", "impedance", "transmission")


class SolverError(RuntimeError):
    """Base class for solver failures."""


class NearResonanceError(SolverError):
    """The discretized operator is numerically singular."""


class AccuracyGuardError(ValueError):
    """An evaluation point is too close to the boundary."""


@dataclass(frozen=True)
class BoundaryCondition:
    """Boundary condition with its material parameters.

    alpha is the exterior coefficient; ``alpha_int`` is used only for
    transmission.  ``lam`` is the impedance parameter.
    """

    kind: str
    alpha: float = 1.0
    lam: float = 0.0
    alpha_int: float = 1.0

    def __post_init__(self):
        if self.kind not in BC_TYPES:
            raise ValueError(f"unknown boundary condition {self.kind!r}")
        if self.alpha <= 0 or self.alpha_int <= 0:
            raise ValueError("alpha must be positive")

    def spec(self):
        out = {"kind": self.kind, "alpha": self.alpha}
        if self.kind == "impedance":
            out["lam"] = self.lam
        if self.kind == "transmission":
            out["alpha_int"] = self.alpha_int
        return out


class IncidentField:
    """Incident plane wave exp(i kappa d.x) or point source H0(kappa |x - x0|).

    Parameters
    ----------
    kind : {"plane_wave", "point_source"}
    k : float
        Equation coefficient; the wavenumber is ``k / sqrt(alpha)``.
    direction : (2,) array_like, for plane waves (normalized here).
    location : (2,) array_like, for point sources.
    alpha : float
        Coefficient of the medium carrying the incident field.
    """

    def __init__(self, kind, k, direction=(1.0, 0.0), location=None, alpha=1.0):
        if kind not in ("plane_wave", "point_source"):
            raise ValueError(f"unknown incident kind {kind!r}")
        if not k > 0:
            raise ValueError("k must be positive")
        self.kind = kind
        self.k = float(k)
        self.alpha = float(alpha)
        self.wavenumber = self.k / np.sqrt(self.alpha)
        d = np.asarray(direction, dtype=float)
        self.direction = d / np.linalg.norm(d)
        self.location = None if location is None else np.asarray(location, dtype=float)
        if kind == "point_source" and self.location is None:
            raise ValueError("point source needs a location")

    @classmethod
    def plane_wave(cls, k, direction=(1.0, 0.0), alpha=1.0):
        return cls("plane_wave", k, direction=direction, alpha=alpha)

    @classmethod
    def point_source(cls, k, location, alpha=1.0):
        return cls("point_source", k, location=location, alpha=alpha)

    @property
    def angle(self):
        return float(np.arctan2(self.direction[1], self.direction[0]))

    def spec(self):
        if self.kind == "plane_wave":
            return {"plane_wave": {"direction": self.direction.tolist()}}
        return {"point_source": {"location": self.location.tolist()}}

    def derivatives(self, points, order=3):
        """Value and Cartesian derivative tensors up to ``order`` (<= 3)."""
        x = np.atleast_2d(np.asarray(points, dtype=float))
        kap = self.wavenumber
        if self.kind == "plane_wave":
            d = self.direction
            f = np.exp(1j * kap * x @ d)
            ik = 1j * kap
            out = [f, ik * f[:, None] * d]
            out.append(ik ** 2 * f[:, None, None] * np.einsum("i,j->ij", d, d))
            out.append(ik ** 3 * f[:, None, None, None] * np.einsum("i,j,k->ijk", d, d, d))
            return out[:order + 1]
        r_vec = x - self.location
        r = np.linalg.norm(r_vec, axis=1)
        if np.any(r == 0):
            raise ValueError("point source evaluated at its location")
        e = r_vec / r[:, None]
        f0, f1, f2, f3 = (kap ** m * bessel_derivative("H", 0, kap * r, m) for m in range(4))
        eye = np.eye(2)
        P = eye[None] - np.einsum("ni,nj->nij", e, e)
        grad = f1[:, None] * e
        hess = f2[:, None, None] * np.einsum("ni,nj->nij", e, e) + (f1 / r)[:, None, None] * P
        sym = (np.einsum("ik,nj->nijk", eye, e) + np.einsum("jk,ni->nijk", eye, e)
               + np.einsum("ij,nk->nijk", eye, e))
        eee = np.einsum("ni,nj,nk->nijk", e, e, e)
        third = f3[:, None, None, None] * eee + (f2 / r - f1 / r ** 2)[:, None, None, None] * (sym - 3 * eee)
        return [f0, grad, hess, third][:order + 1]

    def __call__(self, points):
        return self.derivatives(points, 0)[0]

    def gradient(self, points):
        return self.derivatives(points, 1)[1]

    def jet(self, grid):
        """Analytic boundary jet of the incident field on ``grid``."""
        f, g, H, T = self.derivatives(grid.points, 3)
        return jet_from_cartesian(grid, f, g, H, T, self.k, self.alpha)

    def cauchy(self, grid):
        f, g = self.derivatives(grid.points, 1)
        return f, np.einsum("ij,ij->i", g, grid.normal)


class ScatterSolution:
    """Common interface of solved exterior fields."""

    backend = None

    def cauchy_data(self):
        """(u, d_n u) of the exterior field at the grid nodes."""
        return self.trace(), self.normal_trace()

    def jet(self):
        """Boundary jet of the exterior field (from its Cauchy data)."""
        return build_jet(self.cauchy_data(), self.grid, self.k, self.bc.alpha)

    def evaluate(self, points, gradient=False):
        raise NotImplementedError

    def far_field(self, directions):
        raise NotImplementedError

    def bc_residual(self, incident=None):
        """Max-norm residual of the boundary condition for the total field."""
        u, un = self.cauchy_data()
        if incident is not None:
            fi, gi = incident.cauchy(self.grid)
            u, un = u + fi, un + gi
        bc = self.bc
        if bc.kind == "soft":
            r = u
        elif bc.kind == "hard":
            r = bc.alpha * un
        elif bc.kind == "impedance":
            r = bc.alpha * un + 1j * bc.lam * u
        else:
            ui, uni = self.interior_cauchy_data()
            r = np.concatenate([u - ui, bc.alpha * un - bc.alpha_int * uni])
        return float(np.abs(r).max())


def _polar(points):
    p = np.atleast_2d(np.asarray(points, dtype=float))
    return np.hypot(p[:, 0], p[:, 1]), np.arctan2(p[:, 1], p[:, 0])


def _modes_eval(coef, modes, radial, radial_p, r, th, gradient):
    E = np.exp(1j * np.multiply.outer(th, modes))
    val = (E * radial) @ coef
    if not gradient:
        return val
    ur = (E * radial_p) @ coef
    ut = (E * (1j * modes) * radial) @ coef / r
    c, s = np.cos(th), np.sin(th)
    return val, np.stack([ur * c - ut * s, ur * s + ut * c], axis=-1)


class SeriesSolution(ScatterSolution):
    """Circle solution u = sum_n c_n H_n(kappa_e r) e^{i n theta} (exterior).

    For transmission the interior field is sum_n b_n J_n(kappa_i r) e^{i n theta}.
    """

    backend = "series"

    def __init__(self, radius, k, bc, coeffs, interior=None, grid=None,
                 truncation_error=0.0, derivative_order=0):
        self.radius = float(radius)
        self.k = float(k)
        self.bc = bc
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.M = (self.coeffs.size - 1) // 2
        self.modes = np.arange(-self.M, self.M + 1)
        self.interior = None if interior is None else np.asarray(interior, dtype=complex)
        self.kappa_e = self.k / np.sqrt(bc.alpha)
        self.kappa_i = self.k / np.sqrt(bc.alpha_int)
        self.grid = grid if grid is not None else BoundaryGrid(ClosedCurve.circle(radius), 256)
        self.truncation_error = float(truncation_error)
        self.derivative_order = derivative_order
        self._derivs = {}

    def _radial(self, r, kind, m=0):
        kap = self.kappa_e if kind == "H" else self.kappa_i
        return kap ** m * bessel_derivative(kind, self.modes[None, :], kap * np.asarray(r)[:, None], m)

    def trace(self):
        r = np.full(self.grid.n, self.radius)
        return _modes_eval(self.coeffs, self.modes, self._radial(r, "H"), None, r, self.grid.theta, False)

    def normal_trace(self):
        r = np.full(self.grid.n, self.radius)
        return _modes_eval(self.coeffs, self.modes, self._radial(r, "H", 1), None, r, self.grid.theta, False)

    def interior_cauchy_data(self):
        if self.interior is None:
            raise SolverError("solution has no interior field")
        r = np.full(self.grid.n, self.radius)
        u = _modes_eval(self.interior, self.modes, self._radial(r, "J"), None, r, self.grid.theta, False)
        un = _modes_eval(self.interior, self.modes, self._radial(r, "J", 1), None, r, self.grid.theta, False)
        return u, un

    def interior_jet(self):
        return build_jet(self.interior_cauchy_data(), self.grid, self.k, self.bc.alpha_int)

    def evaluate(self, points, gradient=False):
        r, th = _polar(points)
        if np.any(r < self.radius * (1 - 1e-12)):
            raise AccuracyGuardError("series evaluation point inside the circle")
        rad = self._radial(r, "H")
        radp = self._radial(r, "H", 1) if gradient else None
        return _modes_eval(self.coeffs, self.modes, rad, radp, r, th, gradient)

    def evaluate_interior(self, points):
        r, th = _polar(points)
        return _modes_eval(self.interior, self.modes, self._radial(r, "J"), None, r, th, False)

    def far_field(self, directions):
        th = np.asarray(directions, dtype=float)
        if th.ndim == 2:
            th = np.arctan2(th[:, 1], th[:, 0])
        E = np.exp(1j * np.multiply.outer(th, self.modes))
        pref = np.sqrt(2 / (np.pi * self.kappa_e)) * np.exp(-1j * np.pi / 4)
        return pref * (E * (-1j) ** self.modes) @ self.coeffs

    def radius_derivative(self, m):
        """Solution whose coefficients are d^m/da^m of the base coefficients."""
        if self.derivative_order:
            raise SolverError("radius derivatives are taken of base solutions only")
        if m == 0:
            return self
        if m not in self._derivs:
            raise SolverError(f"radius derivative of order {m} not available")
        c, b = self._derivs[m]
        return SeriesSolution(self.radius, self.k, self.bc, c, b, self.grid,
                              derivative_order=m)


def _mode_system(bc, modes, a, k, j, phase):
    """j-th radius derivative of the per-mode system M(a) x = R(a).

    Returns M of shape (n_modes, s, s) and R of shape (n_modes, s).
    """
    ke, ki = k / np.sqrt(bc.alpha), k / np.sqrt(bc.alpha_int)

    def H(m):
        return ke ** m * bessel_derivative("H", modes, ke * a, m)

    def Je(m):
        return ke ** m * bessel_derivative("J", modes, ke * a, m)

    def Ji(m):
        return ki ** m * bessel_derivative("J", modes, ki * a, m)

    if bc.kind == "soft":
        M, R = H(j), -phase * Je(j)
    elif bc.kind == "hard":
        M, R = bc.alpha * H(j + 1), -phase * bc.alpha * Je(j + 1)
    elif bc.kind == "impedance":
        M = bc.alpha * H(j + 1) + 1j * bc.lam * H(j)
        R = -phase * (bc.alpha * Je(j + 1) + 1j * bc.lam * Je(j))
    else:
        M = np.empty((modes.size, 2, 2), dtype=complex)
        M[:, 0, 0], M[:, 0, 1] = H(j), -Ji(j)
        M[:, 1, 0], M[:, 1, 1] = bc.alpha * H(j + 1), -bc.alpha_int * Ji(j + 1)
        R = np.stack([-phase * Je(j), -phase * bc.alpha * Je(j + 1)], axis=-1)
        return M, R
    return M[:, None, None], R[:, None]


def _default_modes(k, a, bc):
    kap = k / np.sqrt(min(bc.alpha, bc.alpha_int))
    return int(np.ceil(kap * a)) + 40


def series_solve(a, bc, k, incident, n_modes=None, n_nodes=256, max_derivative=3):
    """Scattering of a plane wave by the circle of radius ``a`` via mode series.

    Parameters
    ----------
    a : float
    bc : BoundaryCondition
    k : float
    incident : IncidentField
        Plane wave only.
    n_modes : int, optional
        Truncation M (modes |n| <= M); default ceil(kappa a) + 40.
    n_nodes : int
        Nodes of the boundary grid used for traces.
    max_derivative : int
        Radius derivatives d^m/da^m of the coefficients computed for m <= this.
    """
    if incident.kind != "plane_wave":
        raise ValueError("series_solve supports plane-wave incidence only")
    if k / np.sqrt(bc.alpha) * a > 30:
        raise ValueError("k a must not exceed 30 for the series solver")
    M = n_modes if n_modes is not None else _default_modes(k, a, bc)
    modes = np.arange(-M, M + 1)
    phase = (1j ** (modes % 4)) * np.exp(-1j * modes * incident.angle)
    Ms, Rs = zip(*(_mode_system(bc, modes, a, k, j, phase) for j in range(max_derivative + 1)))
    xs = []
    for m in range(max_derivative + 1):
        rhs = Rs[m].copy()
        for j in range(1, m + 1):
            rhs -= comb(m, j) * np.einsum("nij,nj->ni", Ms[j], xs[m - j])
        xs.append(np.linalg.solve(Ms[0], rhs[..., None])[..., 0])
    # truncation estimate: magnitude of the first dropped mode's coefficient
    nxt = np.array([M + 1])
    ph = (1j ** (nxt % 4)) * np.exp(-1j * nxt * incident.angle)
    Mn, Rn = _mode_system(bc, nxt, a, k, 0, ph)
    trunc = float(np.abs(np.linalg.solve(Mn, Rn[..., None])).max())
    grid = BoundaryGrid(ClosedCurve.circle(a), n_nodes)
    interior = xs[0][:, 1] if bc.kind == "transmission" else None
    sol = SeriesSolution(a, k, bc, xs[0][:, 0], interior, grid, truncation_error=trunc)
    for m in range(1, max_derivative + 1):
        sol._derivs[m] = (xs[m][:, 0], xs[m][:, 1] if bc.kind == "transmission" else None)
    return sol


def series_solve_data(grid, bc, k, data, n_modes=None):
    """Circle solve with prescribed boundary data sampled on a circle grid.

    ``data`` is one array for soft/hard/impedance and a pair (f, g) of jump
    data for transmission.
    """
    a = grid.curve.radius()
    if a is None:
        raise ValueError("series_solve_data requires a circle grid")
    M = n_modes if n_modes is not None else _default_modes(k, a, bc)
    M = min(M, grid.n // 2 - 1)
    modes = np.arange(-M, M + 1)
    if bc.kind == "transmission":
        f, g = (np.fft.fft(np.asarray(x, dtype=complex)) / grid.n for x in data)
        rhs = np.stack([f[modes % grid.n], g[modes % grid.n]], axis=-1)
        spill = max(_spill(f, M), _spill(g, M))
    else:
        F = np.fft.fft(np.asarray(data, dtype=complex)) / grid.n
        rhs = F[modes % grid.n][:, None]
        spill = _spill(F, M)
    Mat, _ = _mode_system(bc, modes, a, k, 0, np.zeros(modes.size))
    x = np.linalg.solve(Mat, rhs[..., None])[..., 0]
    interior = x[:, 1] if bc.kind == "transmission" else None
    return SeriesSolution(a, k, bc, x[:, 0], interior, grid, truncation_error=spill)


def _spill(F, M):
    n = F.size
    idx = np.r_[M + 1:n - M]
    return float(np.abs(F[idx]).max()) if idx.size else 0.0


# ---------------------------------------------------------------------------
# Nystrom discretization


def _kress_weights(n):
    """Matrix R_ij of the product rule for ln(4 sin^2((t_i - t_j)/2)) on n nodes."""
    h = n // 2
    d = np.arange(n)
    m = np.arange(1, h)
    row = -(2 * np.pi / h) * (np.cos(np.outer(d, m) * 2 * np.pi / n) / m).sum(axis=1) \
        - (np.pi / h ** 2) * np.cos(np.pi * d)
    idx = (d[None, :] - d[:, None]) % n
    return row[idx]


class NystromOperator:
    """Discretized single-layer S and adjoint double-layer K' on a grid.

    One instance is shared by the base solve and every derivative solve on
    the same curve; LU factorizations are cached per boundary condition.
    """

    def __init__(self, grid, wavenumber, cond_limit=1e12):
        self.grid = grid
        self.wavenumber = float(wavenumber)
        self.cond_limit = cond_limit
        n = grid.n
        x = grid.points
        J = grid.speed
        diff = x[:, None, :] - x[None, :, :]
        r = np.hypot(diff[..., 0], diff[..., 1])
        eye = np.eye(n, dtype=bool)
        r[eye] = 1.0
        kr = self.wavenumber * r
        t = grid.theta
        logs = np.log(4 * np.sin((t[:, None] - t[None, :]) / 2) ** 2 + eye)
        R = _kress_weights(n)
        w = 2 * np.pi / n
        J0, H0 = besselj(0, kr), hankel1(0, kr)
        M = 0.25j * H0 * J[None, :]
        M1 = -J0 * J[None, :] / (4 * np.pi)
        M2 = M - M1 * logs
        M1[eye] = -J / (4 * np.pi)
        M2[eye] = (0.25j - EULER_GAMMA / (2 * np.pi)
                   - np.log(self.wavenumber * J / 2) / (2 * np.pi)) * J
        self.S = R * M1 + w * M2
        proj = np.einsum("ik,ijk->ij", grid.normal, diff) / r
        J1, H1 = besselj(1, kr), hankel1(1, kr)
        L = -0.25j * self.wavenumber * H1 * proj * J[None, :]
        L1 = self.wavenumber / (4 * np.pi) * J1 * proj * J[None, :]
        L2 = L - L1 * logs
        L1[eye] = 0.0
        L2[eye] = -grid.curvature * J / (4 * np.pi)
        self.Kp = R * L1 + w * L2
        self._lu = {}

    def matrix(self, kind, alpha=1.0, lam=0.0):
        n = self.grid.n
        if kind == "soft":
            return self.S
        if kind == "hard":
            return alpha * (self.Kp - 0.5 * np.eye(n))
        if kind == "impedance":
            return alpha * (self.Kp - 0.5 * np.eye(n)) + 1j * lam * self.S
        raise ValueError(f"Nystrom solver does not handle {kind!r}")

    def factor(self, kind, alpha=1.0, lam=0.0):
        key = (kind, alpha, lam)
        if key not in self._lu:
            A = self.matrix(kind, alpha, lam)
            cond = np.linalg.cond(A)
            if not np.isfinite(cond) or cond > self.cond_limit:
                raise NearResonanceError(
                    f"condition number {cond:.2e} exceeds {self.cond_limit:.0e}; "
                    "k is close to a resonance of the single-layer formulation, try a different k")
            self._lu[key] = (sla.lu_factor(A), cond)
        return self._lu[key]

    def solve(self, kind, rhs, alpha=1.0, lam=0.0):
        lu, _ = self.factor(kind, alpha, lam)
        return sla.lu_solve(lu, np.asarray(rhs, dtype=complex))


class NystromSolution(ScatterSolution):
    """Single-layer potential u = S[psi] with density samples psi."""

    backend = "nystrom"

    def __init__(self, operator, density, k, bc):
        self.operator = operator
        self.grid = operator.grid
        self.density = np.asarray(density, dtype=complex)
        self.k = float(k)
        self.bc = bc
        self.wavenumber = operator.wavenumber

    def trace(self):
        return self.operator.S @ self.density

    def normal_trace(self):
        return self.operator.Kp @ self.density - 0.5 * self.density

    def evaluate(self, points, gradient=False, guard=3.0):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        g = self.grid
        if np.any(g.distance(p) < guard * g.spacing):
            raise AccuracyGuardError(
                f"evaluation point closer than {guard} grid spacings to the boundary")
        diff = p[:, None, :] - g.points[None, :, :]
        r = np.hypot(diff[..., 0], diff[..., 1])
        wpsi = g.weights * self.density
        kr = self.wavenumber * r
        val = (0.25j * hankel1(0, kr)) @ wpsi
        if not gradient:
            return val
        coef = -0.25j * self.wavenumber * hankel1(1, kr) / r
        grad = np.einsum("pj,pjk->pk", coef * wpsi[None, :], diff)
        return val, grad

    def far_field(self, directions):
        th = np.asarray(directions, dtype=float)
        xh = np.stack([np.cos(th), np.sin(th)], axis=-1) if th.ndim == 1 else th
        pref = np.exp(1j * np.pi / 4) / np.sqrt(8 * np.pi * self.wavenumber)
        E = np.exp(-1j * self.wavenumber * xh @ self.grid.points.T)
        return pref * E @ (self.grid.weights * self.density)


def nystrom_solve(grid, bc_type, boundary_data, k, alpha=1.0, lam=0.0, operator=None):
    """Solve an exterior problem with prescribed data by the Nystrom method.

    Parameters
    ----------
    grid : BoundaryGrid
    bc_type : {"soft_data", "hard_data", "impedance_data"} (suffix optional)
    boundary_data : array_like (n,)
        u (soft), alpha d_n u (hard) or alpha d_n u + i lam u (impedance).
    k, alpha, lam : float
    operator : NystromOperator, optional
        Reused operator (and its cached factorizations).
    """
    kind = bc_type.replace("_data", "")
    bc = BoundaryCondition(kind, alpha=alpha, lam=lam)
    if operator is None:
        operator = NystromOperator(grid, k / np.sqrt(alpha))
    data = np.asarray(boundary_data.values if isinstance(boundary_data, BoundaryScalar)
                      else boundary_data, dtype=complex)
    if not np.any(data):
        return NystromSolution(operator, np.zeros(grid.n, dtype=complex), k, bc)
    psi = operator.solve(kind, data, alpha, lam)
    return NystromSolution(operator, psi, k, bc)


def incident_data(bc, incident, grid):
    """Boundary data of the scattered field that cancels the incident field."""
    f, g = incident.cauchy(grid)
    if bc.kind == "soft":
        return -f
    if bc.kind == "hard":
        return -bc.alpha * g
    if bc.kind == "impedance":
        return -(bc.alpha * g + 1j * bc.lam * f)
    return -f, -bc.alpha * g


def nystrom_scatter(grid, bc, k, incident, operator=None):
    """Scattered field of ``incident`` for a soft, hard or impedance obstacle."""
    return nystrom_solve(grid, bc.kind, incident_data(bc, incident, grid), k,
                         bc.alpha, bc.lam, operator)


class TransmissionNystromSolution(ScatterSolution):
    """Two single layers: u_ext = S_e[psi_e] outside, u_int = S_i[psi_i] inside."""

    backend = "nystrom"

    def __init__(self, ext_op, int_op, psi_e, psi_i, k, bc):
        self.ext = NystromSolution(ext_op, psi_e, k, bc)
        self.int_op = int_op
        self.psi_i = psi_i
        self.grid = ext_op.grid
        self.k = k
        self.bc = bc

    def trace(self):
        return self.ext.trace()

    def normal_trace(self):
        return self.ext.normal_trace()

    def interior_cauchy_data(self):
        op = self.int_op
        return op.S @ self.psi_i, op.Kp @ self.psi_i + 0.5 * self.psi_i

    def evaluate(self, points, gradient=False):
        return self.ext.evaluate(points, gradient)

    def far_field(self, directions):
        return self.ext.far_field(directions)


def nystrom_transmission_solve(grid, bc, k, data):
    """Transmission problem with jump data (f, g) on a general smooth curve.

    Used as a reference solver for direct solves on perturbed curves.
    """
    ext = NystromOperator(grid, k / np.sqrt(bc.alpha))
    inn = NystromOperator(grid, k / np.sqrt(bc.alpha_int))
    n = grid.n
    I = np.eye(n)
    A = np.block([[ext.S, -inn.S],
                  [bc.alpha * (ext.Kp - 0.5 * I), -bc.alpha_int * (inn.Kp + 0.5 * I)]])
    cond = np.linalg.cond(A)
    if cond > 1e12:
        raise NearResonanceError(f"condition number {cond:.2e}; try a different k")
    f, g = data
    x = np.linalg.solve(A, np.concatenate([f, g]).astype(complex))
    return TransmissionNystromSolution(ext, inn, x[:n], x[n:], k, bc)


def evaluate_field(sol, points, gradient=False):
    """Exterior values (and gradients) of a solution at ``points`` (m, 2)."""
    return sol.evaluate(points, gradient)


def far_field(sol, directions):
    """Far-field pattern u_inf with u ~ e^{i kappa r} / sqrt(r) u_inf."""
    return sol.far_field(directions)
