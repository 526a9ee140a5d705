"""Closed curves, quadrature grids, normal-speed fields and boundary flows.

Curves are stored as truncated Fourier series of x(theta) and y(theta), so all
geometric quantities on a grid come from exact differentiation of the series.
Boundary scalars and the normal field are extended off the curve as constants
along straight normal lines; under that convention the flow of v(x) n(x) is
the normal offset x + t v n.
"""

import numpy as np

__all__ = [
    "GeometryError",
    "DegenerateCurveError",
    "PerturbationTooLargeError",
    "AccuracyError",
    "ClosedCurve",
    "BoundaryGrid",
    "NormalSpeedField",
    "build_grid",
    "offset_curve",
    "composed_flow_curve",
    "normal_shape_derivative",
    "mixed_normal_closed_form",
    "curve_from_spec",
    "velocity_from_spec",
]

REACH_FACTOR = 0.8


class GeometryError(ValueError):
    """Base class for geometry errors."""


class DegenerateCurveError(GeometryError):
    """The parameterization has a vanishing Jacobian."""


class PerturbationTooLargeError(GeometryError):
    """A boundary perturbation leaves the tubular neighbourhood of the curve."""


class AccuracyError(RuntimeError):
    """A finite-difference estimate failed to converge."""


def _real_to_complex(coeffs):
    """Interleaved [a0, a1, b1, a2, b2, ...] -> complex coefficients for m = -M..M."""
    c = np.asarray(coeffs, dtype=float).ravel()
    if c.size == 0:
        c = np.zeros(1)
    if c.size % 2 == 0:
        c = np.append(c, 0.0)
    M = (c.size - 1) // 2
    a = c[1::2]
    b = c[2::2]
    out = np.zeros(2 * M + 1, dtype=complex)
    out[M] = c[0]
    out[M + 1:] = 0.5 * (a - 1j * b)
    out[:M] = (0.5 * (a + 1j * b))[::-1]
    return out


def _complex_to_real(chat):
    M = (chat.size - 1) // 2
    pos = chat[M + 1:]
    out = np.empty(2 * M + 1)
    out[0] = chat[M].real
    out[1::2] = 2 * pos.real
    out[2::2] = -2 * pos.imag
    return out


def _trim(chat, rel=1e-15):
    """Drop high modes whose magnitude is below rel * max."""
    M = (chat.size - 1) // 2
    mags = np.maximum(np.abs(chat[M:]), np.abs(chat[:M + 1][::-1]))
    tol = rel * max(mags.max(), 1e-300)
    keep = np.nonzero(mags > tol)[0]
    K = int(keep.max()) if keep.size else 0
    return chat[M - K:M + K + 1]


def _pad(chat, M):
    K = (chat.size - 1) // 2
    if K == M:
        return chat
    out = np.zeros(2 * M + 1, dtype=complex)
    out[M - K:M + K + 1] = chat
    return out


def _samples_to_coeffs(values):
    """Trigonometric interpolation coefficients (m = -M..M) of uniform samples."""
    values = np.asarray(values)
    N = values.shape[0]
    F = np.fft.fft(values, axis=0) / N
    M = (N - 1) // 2
    idx = np.concatenate([np.arange(N - M, N), np.arange(0, M + 1)])
    chat = F[idx]
    if N % 2 == 0:
        # split the Nyquist mode symmetrically so real samples stay real
        nyq = 0.5 * F[N // 2]
        chat = np.concatenate([[nyq], chat, [nyq]])
    return chat


def _eval_series(chat, theta, derivative=0):
    theta = np.asarray(theta, dtype=float)
    M = (chat.size - 1) // 2
    m = np.arange(-M, M + 1)
    E = np.exp(1j * np.multiply.outer(theta, m))
    return E @ (chat * (1j * m) ** derivative)


class ClosedCurve:
    """Smooth closed curve theta -> (x(theta), y(theta)), counterclockwise.

    Parameters
    ----------
    x_coeffs, y_coeffs : sequence of float
        Interleaved real Fourier coefficients ``[a0, a1, b1, a2, b2, ...]``
        with x(theta) = a0 + sum_m a_m cos(m theta) + b_m sin(m theta).
    """

    def __init__(self, x_coeffs, y_coeffs):
        self._init_complex(_real_to_complex(x_coeffs), _real_to_complex(y_coeffs))
        self._spec = None

    def _init_complex(self, xhat, yhat):
        M = max(xhat.size, yhat.size) // 2
        self._xhat = _pad(np.asarray(xhat, dtype=complex), M)
        self._yhat = _pad(np.asarray(yhat, dtype=complex), M)

    @classmethod
    def _from_complex(cls, xhat, yhat, spec=None):
        obj = cls.__new__(cls)
        obj._init_complex(xhat, yhat)
        obj._spec = spec
        return obj

    @classmethod
    def star(cls, a0=1.0, cos=(), sin=()):
        """Star-shaped curve with radius r(theta) = a0 + sum a_m cos + b_m sin."""
        cos = [float(c) for c in cos]
        sin = [float(s) for s in sin]
        M = max(len(cos), len(sin))
        cos = cos + [0.0] * (M - len(cos))
        sin = sin + [0.0] * (M - len(sin))
        rhat = np.zeros(2 * M + 1, dtype=complex)
        rhat[M] = a0
        for m in range(1, M + 1):
            rhat[M + m] = 0.5 * (cos[m - 1] - 1j * sin[m - 1])
            rhat[M - m] = 0.5 * (cos[m - 1] + 1j * sin[m - 1])
        # z = r e^{i theta}: shift by one mode
        zhat = np.zeros(2 * (M + 1) + 1, dtype=complex)
        zhat[2:] = rhat
        zm = zhat[::-1].conj()
        xhat = 0.5 * (zhat + zm)
        yhat = (zhat - zm) / 2j
        spec = {"star": {"a0": float(a0), "cos": cos, "sin": sin}}
        return cls._from_complex(xhat, yhat, spec)

    @classmethod
    def circle(cls, radius=1.0):
        """Circle of the given radius centred at the origin."""
        return cls.star(radius)

    @classmethod
    def from_samples(cls, points):
        """Curve interpolating uniform samples theta_j = 2 pi j / N, shape (N, 2)."""
        points = np.asarray(points, dtype=float)
        z = points[:, 0] + 1j * points[:, 1]
        zhat = _samples_to_coeffs(z)
        zhat = _trim(zhat)
        zm = zhat[::-1].conj()
        return cls._from_complex(0.5 * (zhat + zm), (zhat - zm) / 2j)

    @property
    def n_modes(self):
        return (self._xhat.size - 1) // 2

    @property
    def x_coeffs(self):
        return _complex_to_real(self._xhat)

    @property
    def y_coeffs(self):
        return _complex_to_real(self._yhat)

    def spec(self):
        """Serializable description (round-trips through :func:`curve_from_spec`)."""
        if self._spec is not None:
            return self._spec
        return {"fourier": {"x": self.x_coeffs.tolist(), "y": self.y_coeffs.tolist()}}

    def evaluate(self, theta, derivative=0):
        """Points (or theta-derivatives) on the curve, shape (len(theta), 2)."""
        x = _eval_series(self._xhat, theta, derivative).real
        y = _eval_series(self._yhat, theta, derivative).real
        return np.stack([x, y], axis=-1)

    def is_circle(self, tol=1e-13):
        """True if the curve is a circle centred at the origin (returns radius)."""
        M = self.n_modes
        z = self._xhat + 1j * self._yhat
        if M < 1:
            return False
        rest = np.abs(np.delete(z, M + 1)).max(initial=0.0)
        zm = self._xhat - 1j * self._yhat
        rest = max(rest, np.abs(np.delete(zm, M - 1)).max(initial=0.0))
        a = abs(z[M + 1])
        return a > 0 and rest <= tol * a

    def radius(self):
        """Radius if the curve is an origin-centred circle, else None."""
        if not self.is_circle():
            return None
        M = self.n_modes
        return float(abs(self._xhat[M + 1] + 1j * self._yhat[M + 1]))

    def __repr__(self):
        return f"ClosedCurve(n_modes={self.n_modes})"


def _rotate_minus90(v):
    return np.stack([v[..., 1], -v[..., 0]], axis=-1)


class BoundaryGrid:
    """Uniform quadrature nodes on a closed curve with spectral geometry.

    Attributes
    ----------
    theta : ndarray (n,)
    points, d1, d2, d3 : ndarray (n, 2)
        Positions and theta-derivatives of the parameterization.
    speed : ndarray (n,)
        |x'(theta)|.
    tangent, normal : ndarray (n, 2)
        Unit tangent and outward unit normal (tangent rotated by -90 deg).
    curvature, curvature_s : ndarray (n,)
        kappa with dn/ds = kappa tau, and its arclength derivative.
    """

    def __init__(self, curve, n_nodes):
        n_nodes = int(n_nodes)
        if n_nodes < 16 or n_nodes % 2:
            raise ValueError("n_nodes must be an even integer >= 16")
        self.curve = curve
        self.n = n_nodes
        self.theta = 2 * np.pi * np.arange(n_nodes) / n_nodes
        self.points = curve.evaluate(self.theta, 0)
        self.d1 = curve.evaluate(self.theta, 1)
        self.d2 = curve.evaluate(self.theta, 2)
        self.d3 = curve.evaluate(self.theta, 3)
        self.speed = np.hypot(self.d1[:, 0], self.d1[:, 1])
        scale = max(np.abs(self.points).max(), 1.0)
        if self.speed.min() <= 1e-12 * scale:
            raise DegenerateCurveError("curve Jacobian vanishes at a grid node")
        self.tangent = self.d1 / self.speed[:, None]
        self.normal = _rotate_minus90(self.tangent)
        cross2 = self.d1[:, 0] * self.d2[:, 1] - self.d1[:, 1] * self.d2[:, 0]
        cross3 = self.d1[:, 0] * self.d3[:, 1] - self.d1[:, 1] * self.d3[:, 0]
        J = self.speed
        Jp = np.einsum("ij,ij->i", self.d1, self.d2) / J
        self.curvature = cross2 / J ** 3
        self.curvature_s = (cross3 / J ** 3 - 3 * cross2 * Jp / J ** 4) / J
        self.weights = (2 * np.pi / n_nodes) * J
        self.length = float(self.weights.sum())
        self.spacing = self.length / n_nodes

    def distance(self, points):
        """Distance from each point to the nearest grid node (coarse)."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        d = np.linalg.norm(p[:, None, :] - self.points[None, :, :], axis=-1)
        return d.min(axis=1)

    def __repr__(self):
        return f"BoundaryGrid(n={self.n})"


def build_grid(curve, n_nodes):
    """Quadrature grid with nodes theta_j = 2 pi j / n on ``curve``."""
    return BoundaryGrid(curve, n_nodes)


class NormalSpeedField:
    """Normal speed v(theta), a truncated Fourier series in the curve parameter.

    Parameters
    ----------
    cos : sequence of float
        Coefficients of cos(m theta) for m = 0, 1, ...
    sin : sequence of float
        Coefficients of sin(m theta) for m = 1, 2, ...
    """

    def __init__(self, cos=(0.0,), sin=()):
        self.cos = np.atleast_1d(np.asarray(cos, dtype=float)).copy()
        self.sin = np.atleast_1d(np.asarray(sin, dtype=float)).copy()
        if not (np.all(np.isfinite(self.cos)) and np.all(np.isfinite(self.sin))):
            raise ValueError("velocity coefficients must be finite")

    @classmethod
    def constant(cls, c):
        return cls(cos=[float(c)])

    @classmethod
    def cosine(cls, m, amplitude=1.0):
        c = np.zeros(m + 1)
        c[m] = amplitude
        return cls(cos=c)

    @classmethod
    def sine(cls, m, amplitude=1.0):
        s = np.zeros(m)
        s[m - 1] = amplitude
        return cls(cos=[0.0], sin=s)

    @classmethod
    def from_samples(cls, values):
        """Band-limited interpolant of real samples on a uniform theta grid."""
        values = np.asarray(values, dtype=float)
        chat = _samples_to_coeffs(values)
        r = _complex_to_real(chat)
        return cls(cos=np.concatenate([[r[0]], r[1::2]]), sin=r[2::2])

    def __call__(self, theta, derivative=0):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta)
        for m, c in enumerate(self.cos):
            if c:
                out = out + c * m ** derivative * np.cos(m * theta + derivative * np.pi / 2)
        for m, s in enumerate(self.sin, start=1):
            if s:
                out = out + s * m ** derivative * np.sin(m * theta + derivative * np.pi / 2)
        return out

    def on(self, grid, derivative=0):
        """Samples of d^p v / d theta^p at the grid nodes."""
        return self(grid.theta, derivative)

    def s_derivative(self, grid, order=1):
        """Arclength derivatives (order 1 or 2) at the grid nodes."""
        v1 = self.on(grid, 1) / grid.speed
        if order == 1:
            return v1
        if order == 2:
            Jp = np.einsum("ij,ij->i", grid.d1, grid.d2) / grid.speed
            return (self.on(grid, 2) - v1 * Jp) / grid.speed ** 2
        raise ValueError("order must be 1 or 2")

    def is_constant(self):
        return not (np.any(self.cos[1:]) or np.any(self.sin))

    def spec(self):
        return {"cos": self.cos.tolist(), "sin": self.sin.tolist()}

    def _combine(self, other, a, b):
        nc = max(self.cos.size, other.cos.size)
        ns = max(self.sin.size, other.sin.size)
        c = a * np.pad(self.cos, (0, nc - self.cos.size)) + b * np.pad(other.cos, (0, nc - other.cos.size))
        s = a * np.pad(self.sin, (0, ns - self.sin.size)) + b * np.pad(other.sin, (0, ns - other.sin.size))
        return NormalSpeedField(c, s)

    def __add__(self, other):
        return self._combine(other, 1.0, 1.0)

    def __mul__(self, scalar):
        return NormalSpeedField(scalar * self.cos, scalar * self.sin)

    __rmul__ = __mul__

    def __repr__(self):
        return f"NormalSpeedField(cos={self.cos.tolist()}, sin={self.sin.tolist()})"


def _reach_check(grid, vmax, t):
    limit = REACH_FACTOR / np.abs(grid.curvature).max()
    if abs(t) * vmax >= limit:
        raise PerturbationTooLargeError(
            f"|t| max|v| = {abs(t) * vmax:.3g} exceeds reach bound {limit:.3g}")


def _fine_theta(grid, n_samples):
    N = n_samples or max(4 * grid.n, 256)
    return 2 * np.pi * np.arange(N) / N


def offset_curve(grid, v, t, n_samples=None):
    """Normal offset {x(theta) + t v(theta) n(theta)} of the grid's curve.

    The offset is resampled on ``n_samples`` uniform parameter values (default
    ``max(4 n, 256)``) and returned as a trimmed Fourier curve.
    """
    th = _fine_theta(grid, n_samples)
    vals = v(th)
    _reach_check(grid, max(np.abs(vals).max(), np.abs(v.on(grid)).max()), t)
    if t == 0:
        return grid.curve
    x = grid.curve.evaluate(th)
    d1 = grid.curve.evaluate(th, 1)
    nrm = _rotate_minus90(d1 / np.linalg.norm(d1, axis=1)[:, None])
    return ClosedCurve.from_samples(x + t * vals[:, None] * nrm)


def _nearest_parameter(curve, y, theta0, iters=30):
    """Newton iteration for the foot point of y on the curve, started at theta0."""
    th = np.array(theta0, dtype=float)
    for _ in range(iters):
        x = curve.evaluate(th)
        x1 = curve.evaluate(th, 1)
        x2 = curve.evaluate(th, 2)
        r = x - y
        g = np.einsum("ij,ij->i", r, x1)
        gp = np.einsum("ij,ij->i", x1, x1) + np.einsum("ij,ij->i", r, x2)
        step = g / gp
        th = th - step
        if np.abs(step).max() < 1e-15:
            break
    return th


def composed_flow_curve(grid, v1, t1, v2, t2, n_samples=None):
    """Image of the curve under T^{v2}_{t2} o T^{v1}_{t1} of the extended fields.

    The second flow moves each point along the normal through its nearest
    point on the original curve, with the speed of ``v2`` at that foot point.
    """
    th = _fine_theta(grid, n_samples)
    vmax = np.abs(v1(th)).max() * abs(t1) + np.abs(v2(th)).max() * abs(t2)
    _reach_check(grid, vmax, 1.0)
    c = grid.curve
    x = c.evaluate(th)
    d1 = c.evaluate(th, 1)
    nrm = _rotate_minus90(d1 / np.linalg.norm(d1, axis=1)[:, None])
    y = x + t1 * v1(th)[:, None] * nrm
    foot = _nearest_parameter(c, y, th)
    f1 = c.evaluate(foot, 1)
    nfoot = _rotate_minus90(f1 / np.linalg.norm(f1, axis=1)[:, None])
    z = y + t2 * v2(foot)[:, None] * nfoot
    return ClosedCurve.from_samples(z)


def _normals_on(curve, n):
    return BoundaryGrid(curve, n).normal


def normal_shape_derivative(grid, v1, order=1, v2=None, step=None, levels=3,
                            tol=1e-5):
    """Shape derivative of the unit normal field at the grid nodes.

    Parameters
    ----------
    grid : BoundaryGrid
    v1 : NormalSpeedField
    order : {1, 2}
        1 returns delta_v n = -v_s tau in closed form.  2 returns the mixed
        derivative of the normal of T^{v2}_{t2} o T^{v1}_{t1}(Gamma), pulled
        back by node index, from a nested central difference with Richardson
        extrapolation.
    v2 : NormalSpeedField, optional
        Second field for ``order=2`` (defaults to ``v1``).
    step, levels, tol
        Initial step, number of halvings, and convergence tolerance of the
        Richardson table for ``order=2``.

    Returns
    -------
    ndarray (n, 2), or for ``order=2`` a tuple (estimate, error_estimate).
    """
    if order == 1:
        return -v1.s_derivative(grid)[:, None] * grid.tangent
    if order != 2:
        raise ValueError("order must be 1 or 2")
    v2 = v1 if v2 is None else v2
    th = _fine_theta(grid, None)
    vmax = np.abs(v1(th)).max() + np.abs(v2(th)).max()
    if vmax == 0:
        return np.zeros_like(grid.normal), 0.0
    reach = REACH_FACTOR / np.abs(grid.curvature).max()
    h = step if step is not None else min(2e-2, 0.2 * reach / vmax)

    def mixed(h):
        acc = 0.0
        for s1, s2, w in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)):
            c = composed_flow_curve(grid, v1, s1 * h, v2, s2 * h)
            acc = acc + w * _normals_on(c, grid.n)
        return acc / (4 * h * h)

    table = [[mixed(h / 2 ** i)] for i in range(levels)]
    for i in range(1, levels):
        for j in range(1, i + 1):
            f = 4.0 ** j
            table[i].append((f * table[i][j - 1] - table[i - 1][j - 1]) / (f - 1))
    est = table[-1][-1]
    err = float(np.abs(table[-1][-1] - table[-2][-1]).max()) if levels > 1 else np.inf
    if err > tol:
        raise AccuracyError(f"mixed normal derivative did not converge (residual {err:.2e})")
    return est, err


def mixed_normal_closed_form(grid, v1, v2):
    """delta_{v1,v2} n = kappa (v1 v2)_s tau - v1_s v2_s n for the extended flow."""
    a, b = v1.on(grid), v2.on(grid)
    as_, bs = v1.s_derivative(grid), v2.s_derivative(grid)
    kap = grid.curvature
    return (kap * (as_ * b + a * bs))[:, None] * grid.tangent - (as_ * bs)[:, None] * grid.normal


def curve_from_spec(spec):
    """Build a curve from ``{"star": {...}}``, ``{"fourier": {...}}`` or ``{"circle": r}``."""
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ValueError("curve spec must be a mapping with exactly one of 'star', 'fourier', 'circle'")
    (kind, body), = spec.items()
    if kind == "star":
        return ClosedCurve.star(float(body.get("a0", 1.0)), body.get("cos", []), body.get("sin", []))
    if kind == "circle":
        r = body.get("radius", 1.0) if isinstance(body, dict) else body
        return ClosedCurve.circle(float(r))
    if kind == "fourier":
        return ClosedCurve(body["x"], body["y"])
    raise ValueError(f"unknown curve kind {kind!r}")


def velocity_from_spec(spec):
    """Build a :class:`NormalSpeedField` from ``{"const": c}`` or ``{"cos": [...], "sin": [...]}``."""
    if isinstance(spec, (int, float)):
        return NormalSpeedField.constant(spec)
    if not isinstance(spec, dict):
        raise ValueError("velocity spec must be a number or a mapping")
    if "const" in spec:
        return NormalSpeedField.constant(float(spec["const"]))
    return NormalSpeedField(spec.get("cos", [0.0]), spec.get("sin", []))
