"""Shape derivatives and shape Taylor expansions for 2D time-harmonic scattering.

Modules
-------
specfun            Bessel and Hankel functions of integer order
geometry           Fourier curves, boundary grids, normal speeds, perturbed curves
boundary_calculus  Tangential calculus and boundary jets
solvers            Series (circle) and Nystrom solvers of exterior problems
recursion          Shape-derivative data, solves and Taylor expansions
symbolic           Exterior-calculus generation of shape-derivative data
harness            Run configuration, pipelines, FD oracle, reports
verify             Acceptance checks
"""

from .convergence import fit_order
from .estimators import ScatteringEstimator, ShapeTaylorEstimator
from .geometry import ClosedCurve, NormalSpeedField, build_grid
from .harness import RunConfig, StudyReport, fd_oracle, run
from .recursion import Scene, shape_derivative_solve, taylor_evaluate
from .solvers import BoundaryCondition, IncidentField, nystrom_scatter, series_solve

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition", "ClosedCurve", "IncidentField", "NormalSpeedField", "RunConfig",
    "ScatteringEstimator", "Scene", "ShapeTaylorEstimator", "StudyReport", "build_grid",
    "fd_oracle", "fit_order", "nystrom_scatter", "run", "series_solve",
    "shape_derivative_solve", "taylor_evaluate",
]
