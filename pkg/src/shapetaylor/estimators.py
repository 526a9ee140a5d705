"""scikit-learn style wrappers around the solvers and the shape Taylor expansion.

``fit`` takes an obstacle (a curve spec or :class:`ClosedCurve`) instead of
a design matrix; ``predict`` takes observation points of shape (m, 2).
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .geometry import ClosedCurve, curve_from_spec, velocity_from_spec
from .recursion import Scene, shape_derivative_solve
from .solvers import BoundaryCondition, IncidentField


def _curve(obstacle):
    return obstacle if isinstance(obstacle, ClosedCurve) else curve_from_spec(obstacle)


class ScatteringEstimator(BaseEstimator):
    """Scattered field of a plane wave off one obstacle.

    Parameters
    ----------
    bc : {"soft", "hard", "impedance", "transmission"}
    k : float
        Equation coefficient (wavenumber k / sqrt(alpha)).
    direction : float
        Incidence angle in radians.
    alpha, alpha_int, lam : float
        Exterior and interior coefficients and the impedance parameter.
    n_nodes : int
        Boundary discretization.
    """

    def __init__(self, bc="soft", k=1.0, direction=0.0, alpha=1.0, alpha_int=1.0, lam=0.0,
                 n_nodes=256):
        self.bc = bc
        self.k = k
        self.direction = direction
        self.alpha = alpha
        self.alpha_int = alpha_int
        self.lam = lam
        self.n_nodes = n_nodes

    def _scene(self, curve):
        bc = BoundaryCondition(self.bc, alpha=self.alpha, lam=self.lam, alpha_int=self.alpha_int)
        inc = IncidentField.plane_wave(self.k, (np.cos(self.direction), np.sin(self.direction)),
                                       alpha=self.alpha)
        return Scene(curve, bc, self.k, inc, n_nodes=self.n_nodes)

    def fit(self, obstacle, y=None):
        self.record_ = shape_derivative_solve(self._scene(_curve(obstacle)), [], order=0)
        return self

    def _check(self):
        if not hasattr(self, "record_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted; call fit(obstacle)")

    def predict(self, X):
        """Scattered field at points ``X`` (m, 2)."""
        self._check()
        return self.record_.base.evaluate(np.atleast_2d(np.asarray(X, dtype=float)))

    def far_field(self, angles):
        self._check()
        return self.record_.base.far_field(np.asarray(angles, dtype=float))


class ShapeTaylorEstimator(ScatteringEstimator):
    """Shape Taylor polynomial of the scattered field for perturbed obstacles.

    Additional parameters
    ---------------------
    velocities : list of velocity specs
        Normal speeds ``{"const": c}`` or ``{"cos": [...], "sin": [...]}``.
    order : {0, 1, 2}
    t : float or tuple
        Perturbation size(s) used by ``predict``; a tuple gives one size per
        velocity (multivariable expansion).
    """

    def __init__(self, bc="soft", k=1.0, direction=0.0, alpha=1.0, alpha_int=1.0, lam=0.0,
                 n_nodes=256, velocities=({"const": 1.0},), order=2, t=0.0):
        super().__init__(bc, k, direction, alpha, alpha_int, lam, n_nodes)
        self.velocities = velocities
        self.order = order
        self.t = t

    def fit(self, obstacle, y=None):
        vels = [velocity_from_spec(v) for v in self.velocities]
        self.record_ = shape_derivative_solve(self._scene(_curve(obstacle)), vels, self.order)
        return self

    def predict(self, X):
        """Taylor polynomial at points ``X`` for perturbation size ``self.t``."""
        self._check()
        return self.record_.evaluate(np.atleast_2d(np.asarray(X, dtype=float)), self.t)

    def derivative(self, X, key=(0,)):
        """Shape derivative field ``delta_{v_i} u`` or ``delta_{v_i, v_j} u`` at ``X``."""
        self._check()
        return self.record_.derivatives[tuple(key)].evaluate(np.atleast_2d(np.asarray(X, dtype=float)))
