"""Least-squares convergence-order fits on log-log data."""

import numpy as np

__all__ = ["InsufficientDataError", "fit_order", "ROUNDING_FLOOR", "RESIDUAL_LIMIT"]

ROUNDING_FLOOR = 1e-12
RESIDUAL_LIMIT = 0.15


class InsufficientDataError(ValueError):
    """Too few samples above the rounding floor to fit a slope."""


def fit_order(ts, errors, floor=ROUNDING_FLOOR):
    """Fit log(err) = slope * log(t) + intercept.

    Parameters
    ----------
    ts, errors : array_like
        At least four samples; errors below ``floor`` are dropped.

    Returns
    -------
    dict with ``slope``, ``intercept``, ``residual`` (root-mean-square of the
    natural-log residuals), ``n_used`` and ``reliable`` (residual below 0.15).
    """
    ts = np.asarray(ts, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if ts.shape != errors.shape or ts.ndim != 1:
        raise ValueError("ts and errors must be 1-D arrays of equal length")
    if ts.size < 4:
        raise InsufficientDataError("fit_order needs at least 4 samples")
    if np.any(ts <= 0):
        raise ValueError("step sizes must be positive")
    keep = np.isfinite(errors) & (errors >= floor)
    if keep.sum() < 3:
        raise InsufficientDataError(
            f"only {int(keep.sum())} samples above the floor {floor:g}; need 3")
    x, y = np.log(ts[keep]), np.log(errors[keep])
    A = np.stack([x, np.ones_like(x)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((y - A @ [slope, intercept]) ** 2)))
    return {
        "slope": float(slope),
        "intercept": float(intercept),
        "residual": resid,
        "n_used": int(keep.sum()),
        "reliable": resid < RESIDUAL_LIMIT,
    }
