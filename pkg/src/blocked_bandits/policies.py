"""Explore-then-commit policies for the blocked bandit, plus baselines.

Every policy pulls each arm at most once. The explore-then-commit family
shares one state machine (:class:`EtcAgent`): explore for a fixed number of
rounds, fit an estimator once, then pull the remaining arms in decreasing
order of estimated reward.
"""

import logging
import math

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_positive_int, check_random_state
from .design import DEFAULT_ENUMERATION_CAP, get_good_subset, solve_relaxation
from .lasso import LassoConfig, _coordinate_descent, default_lambda, ridge_fit

logger = logging.getLogger(__name__)

__all__ = [
    "explore_budget",
    "EtcAgent",
    "BSLB",
    "RandomPolicy",
    "ESTCRejection",
    "RidgeETC",
    "run_bslb",
    "run_random",
    "run_estc_rejection",
    "run_ridge_etc",
]


def explore_budget(k, T, r_max_hat, lambda_hat, c_explore=1.0, k_exponent=2.0 / 3.0):
    """c * R^(-2/3) * lambda^(-2/3) * k^(2/3) * T^(2/3), rounded, clamped to [1, T - 1]."""
    T = check_positive_int(T, "T", minimum=2)
    if r_max_hat <= 0 or lambda_hat <= 0:
        return T - 1
    raw = (c_explore * r_max_hat ** (-2.0 / 3.0) * lambda_hat ** (-2.0 / 3.0)
           * k ** k_exponent * T ** (2.0 / 3.0))
    if not math.isfinite(raw):
        return T - 1
    # snap float noise such as 8 ** (2/3) = 3.9999999999999996 before rounding
    n = math.floor(round(raw, 9) + 0.5)
    return int(min(max(n, 1), T - 1))


def lasso_estimator(lam=None):
    def fit(X, r):
        n, d = X.shape
        penalty = default_lambda(n, max(d, 2)) if lam is None else lam
        return _coordinate_descent(X, r, LassoConfig(penalty))[0]
    return fit


def ridge_estimator(lam=None):
    def fit(X, r):
        n, d = X.shape
        penalty = default_lambda(n, max(d, 2)) if lam is None else lam
        return ridge_fit(X, r, penalty)
    return fit


class EtcAgent:
    """Explore-then-commit state machine over a fixed arm matrix.

    Exploration draws either follow ``explore_order`` (skipping arms that are
    no longer available) or are sampled from ``explore_weights`` restricted to
    available arms. When the exploration source runs dry the agent falls
    back to a uniform draw over the available arms and sets ``overflow``.
    After ``n_explore`` observations it fits ``estimator`` once and then
    proposes arms in decreasing order of estimated reward, ties to the lower
    index.
    """

    def __init__(self, arms, n_explore, estimator, rng, explore_order=None, explore_weights=None):
        if (explore_order is None) == (explore_weights is None):
            raise ValueError("give exactly one of explore_order or explore_weights")
        self.arms = arms
        self.n_explore = int(n_explore)
        self.estimator = estimator
        self.rng = rng
        self.explore_order = None if explore_order is None else np.asarray(explore_order, dtype=np.intp)
        self.explore_weights = None if explore_weights is None else np.asarray(explore_weights, dtype=np.float64)
        self._cursor = 0
        self.X, self.r = [], []
        self.theta_hat = None
        self.exploit_order = None
        self._exploit_cursor = 0
        self.overflow = 0

    @property
    def exploring(self):
        return self.theta_hat is None

    @property
    def n_observed(self):
        return len(self.r)

    def _uniform(self, available):
        self.overflow += 1
        return int(self.rng.choice(np.flatnonzero(available)))

    def _propose_explore(self, available):
        if self.explore_order is not None:
            order = self.explore_order
            while self._cursor < len(order) and not available[order[self._cursor]]:
                self._cursor += 1
            if self._cursor < len(order):
                return int(order[self._cursor])
            return self._uniform(available)
        w = np.where(available, self.explore_weights, 0.0)
        total = w.sum()
        if total <= 0:
            return self._uniform(available)
        # rejection of pulled arms is the same as renormalising over the rest
        return int(self.rng.choice(len(w), p=w / total))

    def _propose_exploit(self, available):
        order = self.exploit_order
        while not available[order[self._exploit_cursor]]:
            self._exploit_cursor += 1
        return int(order[self._exploit_cursor])

    def propose(self, available):
        if self.exploring:
            return self._propose_explore(available)
        return self._propose_exploit(available)

    def observe(self, arm_index, reward):
        if not self.exploring:
            return
        self.X.append(arm_index)
        self.r.append(reward)
        if len(self.r) >= self.n_explore:
            self.commit()

    def commit(self):
        X = self.arms[np.asarray(self.X, dtype=np.intp)]
        self.theta_hat = self.estimator(X, np.asarray(self.r, dtype=np.float64))
        scores = self.arms @ self.theta_hat
        self.exploit_order = np.argsort(-scores, kind="stable")
        self._exploit_cursor = 0


def _run_agent(env, agent, T):
    M = env.n_arms
    T = check_positive_int(T, "T")
    if T > M:
        raise ValueError(f"horizon T={T} exceeds the number of arms M={M}")
    for _ in range(T - env.round):
        arm = agent.propose(env.available)
        agent.observe(arm, env.pull(arm))


def _r_max_hat(arms):
    return float(np.max(np.linalg.norm(arms, axis=1)))


class _EtcPolicy(BaseEstimator):
    """Shared plumbing for the explore-then-commit policies."""

    def _budget(self, env, T, lambda_hat):
        if self.explore_budget is not None:
            n = check_positive_int(self.explore_budget, "explore_budget")
            return min(n, T - 1) if T > 1 else 1
        if T < 2:
            return 1
        r_max = self.r_max_hat if self.r_max_hat is not None else _r_max_hat(env.arms)
        return explore_budget(self.sparsity_k, T, r_max, lambda_hat, self.c_explore,
                              self.k_exponent)

    def _check_k(self, env):
        k = check_positive_int(self.sparsity_k, "sparsity_k")
        if k > env.instance.dim:
            raise ValueError(f"sparsity_k={k} exceeds d={env.instance.dim}")

    def compute_design(self, arms, rng):
        u_hat = self.u_hat if self.u_hat is not None else min(2 * arms.shape[1], arms.shape[0])
        return get_good_subset(
            arms, min(u_hat, arms.shape[0]), self.rounding_repeats, self.enable_search, rng,
            self.enumeration_cap, relaxation_kwargs={"max_iters": self.max_iters},
        )

    def _explore_from_design(self, env, T, estimator, design, rng):
        self._check_k(env)
        if design is None:
            design = self.compute_design(env.arms, rng)
        n_explore = self._budget(env, T, design.lambda_hat)
        agent = EtcAgent(env.arms, n_explore, estimator, rng,
                         explore_order=rng.permutation(design.subset))
        _run_agent(env, agent, T)
        meta = {
            "n_explore": n_explore,
            "design_size": design.size,
            "lambda_hat": design.lambda_hat,
            "explore_overflow": agent.overflow,
        }
        if agent.overflow:
            logger.warning("exploration budget %d exceeded the design subset (%d arms); "
                           "%d draws were uniform over unpulled arms",
                           n_explore, design.size, agent.overflow)
        return env.trace(**meta), agent


class BSLB(_EtcPolicy):
    """Explore-then-commit with a min-eigenvalue exploration subset and Lasso.

    Parameters
    ----------
    sparsity_k : int
        Sparsity level used to size the exploration phase.
    u_hat : int or None
        Subset-size parameter of the design; ``None`` uses min(2d, M).
    explore_budget : int or None
        Fixed exploration length; ``None`` derives it from ``sparsity_k``,
        the horizon and the design's min eigenvalue.
    lam : float or None
        Lasso penalty; ``None`` uses sqrt(log d / n_explore).
    rounding_repeats, enable_search, enumeration_cap, max_iters
        Passed to :func:`get_good_subset` / :func:`solve_relaxation`.
    c_explore : float
        Constant in front of the exploration-budget formula.
    r_max_hat : float or None
        Reward scale in the budget formula; ``None`` uses max_j ||a_j||.
    k_exponent : float
        Exponent of ``sparsity_k`` in the budget formula.
    random_state : None, int or Generator
    """

    def __init__(self, sparsity_k=1, u_hat=None, explore_budget=None, lam=None,
                 rounding_repeats=1, enable_search=False, c_explore=1.0, r_max_hat=None,
                 max_iters=500, enumeration_cap=DEFAULT_ENUMERATION_CAP, k_exponent=2.0 / 3.0,
                 random_state=None):
        self.sparsity_k = sparsity_k
        self.u_hat = u_hat
        self.explore_budget = explore_budget
        self.lam = lam
        self.rounding_repeats = rounding_repeats
        self.enable_search = enable_search
        self.c_explore = c_explore
        self.r_max_hat = r_max_hat
        self.max_iters = max_iters
        self.enumeration_cap = enumeration_cap
        self.k_exponent = k_exponent
        self.random_state = random_state

    def estimator(self):
        return lasso_estimator(self.lam)

    def run(self, env, T, design=None):
        rng = check_random_state(self.random_state)
        trace, self.agent_ = self._explore_from_design(env, T, self.estimator(), design, rng)
        return trace


class RidgeETC(BSLB):
    """BSLB with ridge regression in place of the Lasso (same penalty value)."""

    def estimator(self):
        return ridge_estimator(self.lam)


class ESTCRejection(_EtcPolicy):
    """Uncapped E-optimal design sampled with rejection of pulled arms.

    The design distribution maximises lambda_min over the whole simplex;
    exploration draws from it renormalised over unpulled arms. Exploitation
    is the same Lasso commit step as :class:`BSLB`.
    """

    def __init__(self, sparsity_k=1, explore_budget=None, lam=None, c_explore=1.0,
                 r_max_hat=None, max_iters=500, k_exponent=2.0 / 3.0, random_state=None):
        self.sparsity_k = sparsity_k
        self.explore_budget = explore_budget
        self.lam = lam
        self.c_explore = c_explore
        self.r_max_hat = r_max_hat
        self.max_iters = max_iters
        self.k_exponent = k_exponent
        self.random_state = random_state

    def compute_design(self, arms, rng=None):
        return solve_relaxation(arms, 1, max_iters=self.max_iters)

    def run(self, env, T, design=None):
        self._check_k(env)
        rng = check_random_state(self.random_state)
        sol = design if design is not None else self.compute_design(env.arms)
        n_explore = self._budget(env, T, sol.objective)
        agent = EtcAgent(env.arms, n_explore, lasso_estimator(self.lam), rng,
                         explore_weights=sol.mu)
        _run_agent(env, agent, T)
        self.agent_ = agent
        return env.trace(n_explore=n_explore, lambda_hat=sol.objective,
                         explore_overflow=agent.overflow)


class RandomPolicy(BaseEstimator):
    """Uniform over unpulled arms, i.e. a random permutation prefix."""

    def __init__(self, random_state=None):
        self.random_state = random_state

    def run(self, env, T, design=None):
        rng = check_random_state(self.random_state)
        T = check_positive_int(T, "T")
        if T > env.n_arms:
            raise ValueError(f"horizon T={T} exceeds the number of arms M={env.n_arms}")
        for _ in range(T - env.round):
            env.pull(rng.choice(env.available_indices()))
        return env.trace()


def run_bslb(env, T, design=None, **params):
    return BSLB(**params).run(env, T, design)


def run_random(env, T, random_state=None):
    return RandomPolicy(random_state).run(env, T)


def run_estc_rejection(env, T, design=None, **params):
    return ESTCRejection(**params).run(env, T, design)


def run_ridge_etc(env, T, design=None, **params):
    return RidgeETC(**params).run(env, T, design)
