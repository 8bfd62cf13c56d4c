"""Exploration subset selection by maximising the smallest eigenvalue.

The discrete problem picks a subset G of arms maximising
lambda_min(|G|^-1 sum_{a in G} a a^T). It is attacked through a concave
relaxation over capped distributions, solved by projected supergradient
ascent, followed by independent randomized rounding and (optionally) an
exhaustive search over small subsets.
"""

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_arms, check_positive_int, check_random_state
from .linalg import min_eigenvalue, min_eigpair, project_capped_simplex

__all__ = [
    "RelaxationSolution",
    "Design",
    "subset_min_eigenvalue",
    "relaxation_objective",
    "solve_relaxation",
    "randomized_round",
    "subset_search",
    "get_good_subset",
    "choose_u_hat",
    "MinEigenvalueDesign",
    "DEFAULT_ENUMERATION_CAP",
]

DEFAULT_ENUMERATION_CAP = 2_000_000
MAX_ROUNDING_RETRIES = 100


def _arm_matrix(arm_set):
    return check_arms(getattr(arm_set, "arms", arm_set))


@dataclass
class RelaxationSolution:
    mu: np.ndarray
    u_hat: int
    objective: float
    n_iter: int = 0
    history: list = field(default_factory=list, repr=False)


@dataclass
class Design:
    subset: np.ndarray
    lambda_hat: float
    provenance: str
    retries: int = 0

    def __post_init__(self):
        self.subset = np.asarray(self.subset, dtype=np.intp)
        if len(np.unique(self.subset)) != len(self.subset):
            raise ValueError("design subset has repeated indices")
        if self.provenance not in ("rounded", "brute_force"):
            raise ValueError(f"unknown provenance {self.provenance!r}")

    @property
    def size(self):
        return len(self.subset)

    def to_dict(self):
        return {
            "subset": [int(i) for i in self.subset],
            "lambda_hat": float(self.lambda_hat),
            "provenance": self.provenance,
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc):
        return cls(np.asarray(doc["subset"], dtype=np.intp), float(doc["lambda_hat"]), doc["provenance"])


def subset_min_eigenvalue(arms, subset):
    """lambda_min of the size-normalised Gram matrix of ``arms[subset]``, floored at 0.

    The Gram matrix is PSD, so a negative value can only be roundoff.
    """
    A = np.asarray(getattr(arms, "arms", arms), dtype=np.float64)[np.asarray(subset, dtype=np.intp)]
    if A.shape[0] == 0:
        return 0.0
    S = A.T @ A / A.shape[0]
    return max(min_eigenvalue(0.5 * (S + S.T)), 0.0)


def relaxation_objective(arms, mu):
    A = np.asarray(getattr(arms, "arms", arms), dtype=np.float64)
    S = (A * mu[:, None]).T @ A
    return min_eigenvalue(0.5 * (S + S.T))


def solve_relaxation(arm_set, u_hat, max_iters=500, step_rule="sqrt", tol=1e-10,
                     eta0=None, callback=None):
    """Maximise lambda_min(A^T diag(mu) A) over the simplex with mu_i <= 1 / u_hat.

    Projected supergradient ascent from the uniform distribution. At each
    iterate the supergradient is g_j = (v^T a_j)^2 for a unit eigenvector v
    of the smallest eigenvalue. Step sizes are ``eta0 / sqrt(t)``
    (``step_rule="sqrt"``) or ``eta0`` (``"constant"``); ``eta0`` defaults to
    ``1 / max_j ||a_j||^2``. The best of all iterates and of their running average is
    returned.
    """
    A = _arm_matrix(arm_set)
    M = A.shape[0]
    u_hat = check_positive_int(u_hat, "u_hat")
    if u_hat > M:
        raise ValueError(f"infeasible cap: u_hat={u_hat} exceeds M={M}")
    if step_rule not in ("sqrt", "constant"):
        raise ValueError(f"unknown step_rule {step_rule!r}")
    cap = 1.0 / u_hat
    if eta0 is None:
        eta0 = 1.0 / max(float(np.max(np.einsum("ij,ij->i", A, A))), 1e-300)

    def evaluate(mu):
        S = (A * mu[:, None]).T @ A
        return min_eigpair(0.5 * (S + S.T), check=False)

    mu = np.full(M, 1.0 / M)
    avg = mu.copy()
    lam, v = evaluate(mu)
    best_mu, best_obj = mu.copy(), lam
    history = [lam]
    n_iter = 0
    for t in range(1, max_iters + 1):
        n_iter = t
        g = (A @ v) ** 2
        step = eta0 / math.sqrt(t) if step_rule == "sqrt" else eta0
        new_mu = project_capped_simplex(mu + step * g, cap)
        moved = float(np.max(np.abs(new_mu - mu)))
        mu = new_mu
        if callback is not None:
            callback(mu)
        avg += (mu - avg) / (t + 1)
        lam, v = evaluate(mu)
        history.append(lam)
        if lam > best_obj:
            best_mu, best_obj = mu.copy(), lam
        if moved < tol:
            break

    avg_obj = evaluate(avg)[0]
    if avg_obj > best_obj:
        best_mu, best_obj = avg, avg_obj
    return RelaxationSolution(best_mu, u_hat, float(best_obj), n_iter, history)


def randomized_round(arm_set, sol, rng=None, max_retries=MAX_ROUNDING_RETRIES):
    """Keep arm j independently with probability min(u_hat * mu_j, 1)."""
    A = _arm_matrix(arm_set)
    rng = check_random_state(rng)
    probs = np.minimum(sol.u_hat * np.asarray(sol.mu, dtype=np.float64), 1.0)
    for attempt in range(max_retries + 1):
        keep = rng.random(A.shape[0]) < probs
        if keep.any():
            subset = np.flatnonzero(keep)
            return Design(subset, subset_min_eigenvalue(A, subset), "rounded", retries=attempt)
    raise RuntimeError(f"rounding degenerate: empty subset after {max_retries} retries")


def _enumeration_count(M, size_lo, size_hi):
    return sum(math.comb(M, s) for s in range(size_lo, size_hi + 1))


def subset_search(arm_set, size_lo, size_hi, enumeration_cap=DEFAULT_ENUMERATION_CAP,
                  batch_size=20_000):
    """Exhaustive maximisation over subsets with size in [size_lo, size_hi].

    Sizes are visited in increasing order and subsets lexicographically; a
    candidate replaces the incumbent only if strictly better.
    """
    A = _arm_matrix(arm_set)
    M, d = A.shape
    size_lo = check_positive_int(size_lo, "size_lo")
    size_hi = min(check_positive_int(size_hi, "size_hi"), M)
    if size_lo > size_hi:
        raise ValueError(f"empty size range [{size_lo}, {size_hi}] for M={M}")
    count = _enumeration_count(M, size_lo, size_hi)
    if count > enumeration_cap:
        raise ValueError(f"search too large: {count} subsets exceed the cap {enumeration_cap}")

    outer = np.einsum("ij,ik->ijk", A, A)
    best_subset, best_val = None, -np.inf
    for size in range(size_lo, size_hi + 1):
        combos = itertools.combinations(range(M), size)
        while True:
            chunk = np.array(list(itertools.islice(combos, batch_size)), dtype=np.intp)
            if chunk.size == 0:
                break
            grams = outer[chunk].sum(axis=1) / size
            vals = np.linalg.eigvalsh(grams)[:, 0]
            i = int(np.argmax(vals))
            if vals[i] > best_val:
                best_val, best_subset = float(vals[i]), chunk[i].copy()
    return Design(best_subset, subset_min_eigenvalue(A, best_subset), "brute_force")


def get_good_subset(arm_set, u_hat, rounding_repeats=1, enable_search=False, rng=None,
                    enumeration_cap=DEFAULT_ENUMERATION_CAP, relaxation_kwargs=None,
                    solution=None):
    """Relax, round ``rounding_repeats`` times, optionally search; keep the best.

    A precomputed ``solution`` of the relaxation may be passed to skip the
    solve. The search over sizes [d, u_hat] only runs when it fits under
    ``enumeration_cap``.
    """
    A = _arm_matrix(arm_set)
    M, d = A.shape
    rng = check_random_state(rng)
    rounding_repeats = check_positive_int(rounding_repeats, "rounding_repeats")
    if solution is None:
        solution = solve_relaxation(A, u_hat, **(relaxation_kwargs or {}))

    best = None
    for _ in range(rounding_repeats):
        cand = randomized_round(A, solution, rng)
        if best is None or cand.lambda_hat > best.lambda_hat:
            best = cand

    if enable_search and d <= min(u_hat, M):
        hi = min(u_hat, M)
        if _enumeration_count(M, d, hi) <= enumeration_cap:
            searched = subset_search(A, d, hi, enumeration_cap)
            if searched.lambda_hat > best.lambda_hat:
                best = searched
    return best


def choose_u_hat(d, lambda_lower, mode="quality", c_u=1.0, M=None):
    """Subset-size parameter from a lower bound on the optimal min eigenvalue.

    ``quality`` uses c_u * d / lambda_lower^(2/3); ``linear_time`` uses
    c_u * d / lambda_lower^2. With ``M`` given the result is clamped to [d, M].
    """
    if not 0 < lambda_lower <= 1:
        raise ValueError("lambda_lower must lie in (0, 1]")
    if mode == "quality":
        raw = c_u * d / lambda_lower ** (2.0 / 3.0)
    elif mode == "linear_time":
        raw = c_u * d / lambda_lower ** 2
    else:
        raise ValueError(f"unknown mode {mode!r}")
    # absorb floating noise such as 0.125 ** (2/3) = 0.25000000000000006
    u = max(1, math.ceil(raw - 1e-9 * raw))
    if M is not None:
        u = min(max(u, d), M)
    return u


class MinEigenvalueDesign(TransformerMixin, BaseEstimator):
    """Select a well-conditioned subset of rows (arms).

    ``fit(arms)`` solves the relaxation and rounds it; ``transform(arms)``
    returns the selected rows.

    Attributes
    ----------
    mu_ : ndarray of shape (n_arms,)
        Relaxation distribution.
    relaxation_objective_ : float
    subset_ : ndarray of int
    lambda_hat_ : float
    design_ : Design
    """

    def __init__(self, u_hat=None, rounding_repeats=1, enable_search=False, max_iters=500,
                 enumeration_cap=DEFAULT_ENUMERATION_CAP, random_state=None):
        self.u_hat = u_hat
        self.rounding_repeats = rounding_repeats
        self.enable_search = enable_search
        self.max_iters = max_iters
        self.enumeration_cap = enumeration_cap
        self.random_state = random_state

    def fit(self, X, y=None):
        A = check_arms(X, name="X")
        M, d = A.shape
        u_hat = min(d, M) if self.u_hat is None else self.u_hat
        sol = solve_relaxation(A, u_hat, max_iters=self.max_iters)
        self.design_ = get_good_subset(
            A, u_hat, self.rounding_repeats, self.enable_search,
            check_random_state(self.random_state), self.enumeration_cap, solution=sol,
        )
        self.n_features_in_ = d
        self.mu_ = sol.mu
        self.relaxation_objective_ = sol.objective
        self.subset_ = self.design_.subset
        self.lambda_hat_ = self.design_.lambda_hat
        return self

    def transform(self, X):
        check_is_fitted(self, "subset_")
        return np.asarray(X)[self.subset_]
