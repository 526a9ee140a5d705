"""Spectral calculus of boundary traces and Helmholtz boundary jets.

Derivatives along the curve are exact derivatives of the trigonometric
interpolant.  Normal derivatives beyond the Cauchy data come from the
Helmholtz equation written in curvilinear coordinates (s, nu) around the
curve, x = gamma(s) + nu n(s), with metric factor h = 1 + nu kappa.
"""

from dataclasses import dataclass, fields

import numpy as np

__all__ = [
    "BoundaryScalar",
    "BoundaryJet",
    "IncompleteJetError",
    "spectral_derivative",
    "trace_decompose",
    "build_jet",
    "jet_from_cartesian",
]


class IncompleteJetError(ValueError):
    """A jet is missing entries needed by a computation."""


class BoundaryScalar:
    """Complex samples on a boundary grid with cached Fourier coefficients."""

    def __init__(self, values, grid):
        values = np.asarray(values, dtype=complex)
        if values.shape != (grid.n,):
            raise ValueError(f"expected {grid.n} samples, got shape {values.shape}")
        self.values = values
        self.grid = grid
        self._coeffs = None

    @classmethod
    def from_function(cls, func, grid):
        """Sample ``func(points)`` at the grid nodes."""
        return cls(func(grid.points), grid)

    @property
    def coeffs(self):
        """FFT coefficients (numpy ordering, normalized by n)."""
        if self._coeffs is None:
            self._coeffs = np.fft.fft(self.values) / self.grid.n
        return self._coeffs

    def roundtrip_error(self):
        return float(np.abs(np.fft.ifft(self.coeffs * self.grid.n) - self.values).max())

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __len__(self):
        return self.values.size


def _values(f):
    return f.values if isinstance(f, BoundaryScalar) else np.asarray(f)


def _dtheta(f, order):
    n = f.shape[0]
    m = np.fft.fftfreq(n, 1.0 / n)
    F = np.fft.fft(f)
    if order % 2:
        F[n // 2] = 0.0
    out = np.fft.ifft(F * (1j * m) ** order)
    return out if np.iscomplexobj(f) else out.real


def spectral_derivative(f, grid, wrt="s", order=1):
    """Differentiate boundary samples along the curve.

    Parameters
    ----------
    f : BoundaryScalar or array_like (n,)
    grid : BoundaryGrid
    wrt : {"theta", "s"}
        Parameter or arclength derivative; the arclength derivative applies
        (1/|x'|) d/dtheta recursively.
    order : {1, 2, 3}
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    vals = _values(f)
    if vals.shape[0] != grid.n:
        raise ValueError("sample count does not match grid")
    if wrt == "theta":
        out = _dtheta(vals, order)
    elif wrt == "s":
        out = vals
        for _ in range(order):
            out = _dtheta(out, 1) / grid.speed
    else:
        raise ValueError("wrt must be 'theta' or 's'")
    return BoundaryScalar(out, grid) if isinstance(f, BoundaryScalar) else out


def trace_decompose(field, grid):
    """Split boundary vector samples E (n, 2) into n (n.E) and E - n (n.E)."""
    E = np.asarray(field)
    if E.shape != (grid.n, 2):
        raise ValueError("field must have shape (n, 2) matching the grid")
    nE = np.einsum("ij,ij->i", grid.normal, E)
    normal_part = grid.normal * nE[:, None]
    return normal_part, E - normal_part


@dataclass(frozen=True)
class BoundaryJet:
    """Curvilinear derivatives d_nu^a d_s^b u at nu = 0 on a grid.

    Entries are complex arrays of length n; ``k`` and ``alpha`` record the
    Helmholtz equation div(alpha grad u) + k^2 u = 0 that generated them.
    """

    u: np.ndarray
    u_s: np.ndarray
    u_ss: np.ndarray
    u_n: np.ndarray
    u_ns: np.ndarray
    u_nn: np.ndarray
    u_nss: np.ndarray
    u_nns: np.ndarray
    u_nnn: np.ndarray
    k: float
    alpha: float = 1.0

    ENTRIES = ("u", "u_s", "u_ss", "u_n", "u_ns", "u_nn", "u_nss", "u_nns", "u_nnn")

    def __add__(self, other):
        if (self.k, self.alpha) != (other.k, other.alpha):
            raise ValueError("jets of different equations cannot be added")
        return BoundaryJet(*(getattr(self, e) + getattr(other, e) for e in self.ENTRIES),
                           k=self.k, alpha=self.alpha)

    def helmholtz_residual(self, grid):
        """Max |u_nn + kappa u_n + u_ss + (k^2/alpha) u|."""
        q = self.k ** 2 / self.alpha
        r = self.u_nn + grid.curvature * self.u_n + self.u_ss + q * self.u
        return float(np.abs(r).max())

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def zeros(cls, n, k, alpha=1.0):
        z = np.zeros(n, dtype=complex)
        return cls(*([z] * 9), k=k, alpha=alpha)


def _complete(grid, k, alpha, u, u_s, u_ss, u_n, u_ns, u_nss):
    q = k ** 2 / alpha
    kap, kap_s = grid.curvature, grid.curvature_s
    u_nn = -q * u - kap * u_n - u_ss
    u_nns = spectral_derivative(u_nn, grid, "s", 1)
    u_nnn = (-kap * u_nn + kap ** 2 * u_n + 2 * kap * u_ss + kap_s * u_s
             - u_nss - q * u_n)
    return BoundaryJet(u, u_s, u_ss, u_n, u_ns, u_nn, u_nss, u_nns, u_nnn, k=k, alpha=alpha)


def build_jet(cauchy, grid, k, alpha=1.0):
    """Boundary jet of a Helmholtz solution from its Cauchy data.

    Parameters
    ----------
    cauchy : (u, u_n)
        Trace and normal derivative on the grid (BoundaryScalar or arrays).
    grid : BoundaryGrid
    k, alpha : float
        The field solves div(alpha grad u) + k^2 u = 0 near the curve.

    Notes
    -----
    u_nn = -(k^2/alpha) u - kappa u_n - u_ss, and differentiating the
    curvilinear equation once in nu gives
    u_nnn = -kappa u_nn + kappa^2 u_n + 2 kappa u_ss + kappa_s u_s - u_nss
    - (k^2/alpha) u_n.
    """
    u, u_n = (np.asarray(_values(c), dtype=complex) for c in cauchy)
    if u.shape != (grid.n,) or u_n.shape != (grid.n,):
        raise ValueError("Cauchy data must have one sample per grid node")
    u_s = spectral_derivative(u, grid, "s", 1)
    u_ss = spectral_derivative(u, grid, "s", 2)
    u_ns = spectral_derivative(u_n, grid, "s", 1)
    u_nss = spectral_derivative(u_n, grid, "s", 2)
    return _complete(grid, k, alpha, u, u_s, u_ss, u_n, u_ns, u_nss)


def jet_from_cartesian(grid, value, grad, hess, third, k, alpha=1.0):
    """Boundary jet from Cartesian derivative tensors of an ambient field.

    Parameters
    ----------
    value : (n,)
    grad : (n, 2)
    hess : (n, 2, 2)
    third : (n, 2, 2, 2)
        Field value and Cartesian derivatives at the grid nodes.
    """
    t, nv = grid.tangent, grid.normal
    kap, kap_s = grid.curvature, grid.curvature_s

    def d1(a):
        return np.einsum("ij,ij->i", grad, a)

    def d2(a, b):
        return np.einsum("ijk,ij,ik->i", hess, a, b)

    def d3(a, b, c):
        return np.einsum("ijkl,ij,ik,il->i", third, a, b, c)

    u_s = d1(t)
    u_n = d1(nv)
    u_ss = d2(t, t) - kap * u_n
    u_ns = kap * u_s + d2(nv, t)
    u_nn = d2(nv, nv)
    u_nss = (kap_s * u_s - kap ** 2 * u_n + 2 * kap * d2(t, t)
             + d3(nv, t, t) - kap * d2(nv, nv))
    u_nns = 2 * kap * d2(t, nv) + d3(nv, nv, t)
    u_nnn = d3(nv, nv, nv)
    c = lambda a: np.asarray(a, dtype=complex)
    return BoundaryJet(c(value), c(u_s), c(u_ss), c(u_n), c(u_ns), c(u_nn),
                       c(u_nss), c(u_nns), c(u_nnn), k=k, alpha=alpha)
