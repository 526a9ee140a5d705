import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from shapetaylor import ScatteringEstimator, ShapeTaylorEstimator
from shapetaylor.geometry import ClosedCurve
from shapetaylor.solvers import BoundaryCondition, IncidentField, series_solve

X = np.array([[2.0, 0.5], [-1.5, 1.8], [0.0, -3.0]])


def test_params_and_clone():
    est = ShapeTaylorEstimator(bc="hard", k=2.0, order=1, t=0.05)
    params = est.get_params()
    assert params["bc"] == "hard" and params["order"] == 1 and params["t"] == 0.05
    other = clone(est).set_params(k=3.0)
    assert other.k == 3.0 and est.k == 2.0
    assert not hasattr(other, "record_")


@pytest.mark.parametrize("bc", ["soft", "hard"])
def test_predict_matches_series(bc):
    est = ScatteringEstimator(bc=bc, k=2.0, n_nodes=128).fit({"circle": 1.0})
    ref = series_solve(1.0, BoundaryCondition(bc), 2.0, IncidentField.plane_wave(2.0, (1.0, 0.0)))
    assert np.abs(est.predict(X) - ref.evaluate(X)).max() < 1e-9


def test_taylor_estimator_at_zero_is_base_field():
    curve = ClosedCurve.circle(1.0)
    base = ScatteringEstimator(k=2.0, n_nodes=64).fit(curve)
    est = ShapeTaylorEstimator(k=2.0, n_nodes=64, t=0.0).fit(curve)
    assert np.allclose(est.predict(X), base.predict(X), rtol=0, atol=1e-14)


def test_taylor_estimator_tracks_radius_change():
    est = ShapeTaylorEstimator(k=2.0, n_nodes=64, t=0.01).fit({"circle": 1.0})
    exact = ScatteringEstimator(k=2.0, n_nodes=64).fit({"circle": 1.01})
    assert np.abs(est.predict(X) - exact.predict(X)).max() < 1e-5
    assert est.derivative(X, (0, 0)).shape == (3,)


def test_unfitted_raises():
    with pytest.raises(NotFittedError):
        ScatteringEstimator().predict(X)
    with pytest.raises(NotFittedError):
        ShapeTaylorEstimator().derivative(X)
