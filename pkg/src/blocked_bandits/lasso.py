"""Lasso and ridge estimators for the explore-then-commit fit.

The Lasso objective is the plain sum of squares plus an l1 penalty,

    F(theta) = ||r - X theta||_2^2 + lam * ||theta||_1,

with no 1/n in front. The coordinate minimiser is therefore a soft threshold
at lam / 2 divided by the squared column norm.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, check_X_y, validate_data

__all__ = [
    "Regression",
    "LassoConfig",
    "default_lambda",
    "soft_threshold",
    "lasso_objective",
    "lasso_fit",
    "ridge_fit",
    "BlockedLasso",
]


@dataclass(frozen=True)
class Regression:
    X: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        X, r = check_X_y(self.X, self.r, dtype=np.float64, y_numeric=True)
        if np.any(np.abs(X) > 1.0 + 1e-12):
            raise ValueError("design entries must satisfy |X_ij| <= 1")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "r", r)

    @property
    def n_samples(self):
        return self.X.shape[0]

    @property
    def dim(self):
        return self.X.shape[1]


@dataclass(frozen=True)
class LassoConfig:
    lam: float
    max_sweeps: int = 10_000
    tol: float = 1e-8

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ValueError("lam must be finite and nonnegative")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


def default_lambda(n, d):
    """sqrt(log(d) / n) with the natural log."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if d < 2:
        raise ValueError("d must be >= 2")
    return float(np.sqrt(np.log(d) / n))


def soft_threshold(x, t):
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def lasso_objective(X, r, theta, lam):
    resid = r - X @ theta
    return float(resid @ resid + lam * np.abs(theta).sum())


def _cd_pass(G, c, theta, q, coords, half_lam):
    """One cyclic pass over ``coords``; keeps q = G @ theta current."""
    max_step = 0.0
    for j in coords:
        gjj = G[j, j]
        old = theta[j]
        if gjj <= 0.0:
            new = 0.0
        else:
            rho = c[j] - q[j] + gjj * old
            if rho > half_lam:
                new = (rho - half_lam) / gjj
            elif rho < -half_lam:
                new = (rho + half_lam) / gjj
            else:
                new = 0.0
        step = new - old
        if step != 0.0:
            theta[j] = new
            q += G[j] * step
            max_step = max(max_step, abs(step))
    return max_step


def lasso_fit(reg, cfg):
    """Cyclic coordinate descent from zero with an active-set inner loop.

    Returns ``(theta_hat, info)`` where ``info`` holds the sweep count, the
    final objective and whether the tolerance was met.
    """
    return _coordinate_descent(reg.X, reg.r, cfg)


def _coordinate_descent(X, r, cfg):
    X = np.asarray(X, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(r))):
        raise ValueError("design and observations must be finite")
    d = X.shape[1]
    G = X.T @ X
    c = X.T @ r
    theta = np.zeros(d)
    q = np.zeros(d)
    half_lam = 0.5 * cfg.lam
    all_coords = range(d)

    sweeps = 0
    converged = False
    while sweeps < cfg.max_sweeps:
        sweeps += 1
        if _cd_pass(G, c, theta, q, all_coords, half_lam) < cfg.tol:
            converged = True
            break
        active = np.flatnonzero(theta).tolist()
        while sweeps < cfg.max_sweeps:
            sweeps += 1
            if _cd_pass(G, c, theta, q, active, half_lam) < cfg.tol:
                break

    info = {
        "sweeps": sweeps,
        "converged": converged,
        "objective": lasso_objective(X, r, theta, cfg.lam),
    }
    return theta, info


def ridge_fit(X, r, lam):
    """argmin ||r - X theta||^2 + lam ||theta||^2."""
    X = np.asarray(X, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    d = X.shape[1]
    A = X.T @ X + lam * np.eye(d)
    try:
        return np.linalg.solve(A, X.T @ r)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(A, X.T @ r, rcond=None)[0]


class BlockedLasso(RegressorMixin, BaseEstimator):
    """Lasso on the unnormalised sum of squares, no intercept.

    Parameters
    ----------
    lam : float or None
        Penalty weight. ``None`` uses ``default_lambda(n_samples, n_features)``.
    max_sweeps : int
    tol : float
        Stop once no coordinate moves by more than ``tol`` in a full sweep.
    """

    def __init__(self, lam=None, max_sweeps=10_000, tol=1e-8):
        self.lam = lam
        self.max_sweeps = max_sweeps
        self.tol = tol

    def fit(self, X, y):
        X, y = validate_data(self, X, y, dtype=np.float64, y_numeric=True)
        n, d = X.shape
        lam = default_lambda(n, max(d, 2)) if self.lam is None else float(self.lam)
        cfg = LassoConfig(lam, self.max_sweeps, self.tol)
        self.coef_, info = _coordinate_descent(X, y, cfg)
        self.lam_ = lam
        self.n_sweeps_ = info["sweeps"]
        self.objective_ = info["objective"]
        self.converged_ = info["converged"]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        return X @ self.coef_

