"""Numeric kernels: weighted Gram matrices, smallest eigenpairs, capped simplex."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._validation import check_symmetric_matrix

__all__ = [
    "WeightedCovariance",
    "weighted_covariance",
    "min_eigpair",
    "min_eigenvalue",
    "project_capped_simplex",
    "capped_simplex_threshold",
]


@dataclass(frozen=True)
class WeightedCovariance:
    matrix: np.ndarray
    weight_sum: float

    @property
    def min_eigenvalue(self):
        return min_eigenvalue(self.matrix)


def _as_matrix(arms):
    return getattr(arms, "arms", arms)


def weighted_covariance(arms, weights):
    """Sum_j w_j a_j a_j^T for nonnegative weights, symmetrised after accumulation."""
    A = np.asarray(_as_matrix(arms), dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64).ravel()
    if w.shape[0] != A.shape[0]:
        raise ValueError(f"expected {A.shape[0]} weights, got {w.shape[0]}")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValueError("weights must be finite and nonnegative")
    S = (A * w[:, None]).T @ A
    S = 0.5 * (S + S.T)
    return WeightedCovariance(S, float(w.sum()))


def min_eigpair(matrix, check=True):
    """Smallest eigenvalue of a symmetric matrix and a unit eigenvector.

    The eigenvector sign is fixed so that its largest-magnitude entry is
    positive, which keeps downstream traces deterministic.
    """
    if check:
        matrix = check_symmetric_matrix(matrix)
    else:
        matrix = np.asarray(matrix, dtype=np.float64)
    w, V = scipy.linalg.eigh(matrix, subset_by_index=[0, 0], check_finite=check)
    v = V[:, 0]
    v = v / np.linalg.norm(v)
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return float(w[0]), v


def min_eigenvalue(matrix):
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.shape == (1, 1):
        return float(matrix[0, 0])
    return float(scipy.linalg.eigh(matrix, eigvals_only=True, subset_by_index=[0, 0])[0])


def capped_simplex_threshold(v, cap):
    """Shift tau with sum_i clip(v_i - tau, 0, cap) == 1.

    The clipped sum is piecewise linear and nonincreasing in tau with kinks at
    v_i and v_i - cap; it is evaluated at every kink from prefix sums of the
    sorted values, and the crossing is interpolated inside the bracketing
    segment.
    """
    v = np.asarray(v, dtype=np.float64).ravel()
    M = v.shape[0]
    vs = np.sort(v)
    prefix = np.concatenate([[0.0], np.cumsum(vs)])
    total = prefix[-1]

    def clipped_sum(tau):
        ia = np.searchsorted(vs, tau, side="right")
        iu = np.searchsorted(vs, tau + cap, side="left")
        n_active, n_capped = M - ia, M - iu
        sum_active = total - prefix[ia]
        sum_capped = total - prefix[iu]
        return cap * n_capped + (sum_active - sum_capped) - tau * (n_active - n_capped)

    kinks = np.unique(np.concatenate([vs - cap, vs]))
    values = clipped_sum(kinks)
    j = int(np.argmax(values <= 1.0))
    if j == 0:
        # only possible when M * cap == 1: every entry sits at the cap
        return float(kinks[0])
    t0, t1 = kinks[j - 1], kinks[j]
    f0, f1 = values[j - 1], values[j]
    return float(t0 + (f0 - 1.0) * (t1 - t0) / (f0 - f1))


def project_capped_simplex(v, cap):
    """Euclidean projection onto {mu : sum(mu) = 1, 0 <= mu_i <= cap}."""
    v = np.asarray(v, dtype=np.float64).ravel()
    if not np.all(np.isfinite(v)):
        raise ValueError("v must be finite")
    cap = float(cap)
    if not 0 < cap <= 1:
        raise ValueError(f"cap must lie in (0, 1], got {cap}")
    M = v.shape[0]
    if M * cap < 1.0 - 1e-12:
        raise ValueError(f"infeasible cap: M * cap = {M * cap:.6g} < 1")
    if M * cap <= 1.0 + 1e-12:
        return np.full(M, 1.0 / M)
    tau = capped_simplex_threshold(v, cap)
    return np.clip(v - tau, 0.0, cap)
