"""Corralling explore-then-commit learners over an exponential sparsity grid.

The meta-learner is CORRAL (Agarwal, Luo, Neyshabur and Schapire, 2017):
log-barrier online mirror descent on importance-weighted losses, mixed with
the uniform distribution, with per-learner learning rates that grow each
time a learner's importance weight exceeds its running cap.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_positive_int, check_random_state
from .design import DEFAULT_ENUMERATION_CAP, get_good_subset
from .policies import EtcAgent, _r_max_hat, explore_budget, lasso_estimator, ridge_estimator

__all__ = [
    "CorralState",
    "CorralConfig",
    "sparsity_grid",
    "default_eta",
    "init_corral_state",
    "log_barrier_omd",
    "importance_weighted_losses",
    "omd_update",
    "reward_to_loss",
    "proxy_pool_size",
    "CorralPolicy",
    "run_cbslb",
]

BISECTION_TOL = 1e-12


@dataclass(frozen=True)
class CorralState:
    """Meta-learner state.

    ``probs`` is the mirror-descent iterate; ``sampling_probs`` is the
    distribution actually sampled from, ``(1 - gamma) * probs + gamma / B``.
    """

    probs: np.ndarray
    sampling_probs: np.ndarray
    rho: np.ndarray
    eta: np.ndarray
    gamma: float
    beta: float
    round: int = 0

    @property
    def n_bases(self):
        return len(self.probs)


@dataclass
class CorralConfig:
    grid: list
    eta_init: float
    reward_scale: float
    gamma: float = None
    beta: float = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = [int(k) for k in self.grid]
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] < 1:
            raise ValueError("grid must be strictly increasing positive integers")
        self.grid = grid
        if not self.eta_init > 0:
            raise ValueError("eta_init must be positive")
        if not self.reward_scale > 0:
            raise ValueError("reward_scale must be positive")


def sparsity_grid(d):
    """Powers of two 1, 2, 4, ..., 2^floor(log2 d)."""
    d = check_positive_int(d, "d")
    return [2 ** i for i in range(d.bit_length())]


def default_eta(d, T, r_best_bound):
    """min(1 / (40 T R_best), sqrt(floor(log2 d) / T)).

    For d = 1 the second branch would be zero; it is evaluated with
    floor(log2 d) = 1 instead so the rate stays positive.
    """
    d = check_positive_int(d, "d")
    T = check_positive_int(T, "T")
    if not r_best_bound > 0:
        raise ValueError("r_best_bound must be positive")
    levels = max(d.bit_length() - 1, 1)
    return min(1.0 / (40.0 * T * r_best_bound), math.sqrt(levels / T))


def init_corral_state(n_bases, eta_init, T, gamma=None, beta=None):
    B = check_positive_int(n_bases, "n_bases")
    T = check_positive_int(T, "T")
    if gamma is None:
        gamma = 1.0 / T
    if beta is None:
        beta = math.exp(1.0 / math.log(T)) if T > 1 else math.e
    p = np.full(B, 1.0 / B)
    return CorralState(
        probs=p,
        sampling_probs=p.copy(),
        rho=np.full(B, 2.0 * B),
        eta=np.full(B, float(eta_init)),
        gamma=float(gamma),
        beta=float(beta),
    )


def log_barrier_omd(probs, eta, losses, tol=BISECTION_TOL):
    """One log-barrier mirror-descent step on the simplex.

    Solves 1/p'_i = 1/p_i + eta_i (loss_i - nu) for the normaliser nu with
    sum(p') = 1. The sum is increasing in nu, at most 1 at nu = min(loss)
    and at least 1 at nu = max(loss), so bisection on that bracket (cut at
    the pole where a denominator vanishes) always converges.
    """
    p = np.asarray(probs, dtype=np.float64)
    eta = np.asarray(eta, dtype=np.float64)
    losses = np.asarray(losses, dtype=np.float64)
    if not np.all(np.isfinite(losses)):
        raise ValueError("losses must be finite")
    inv_p = 1.0 / p
    lo, hi = float(losses.min()), float(losses.max())
    if hi - lo == 0.0:
        return p.copy()
    pole = float(np.min(inv_p / eta + losses))
    hi = min(hi, pole)

    def excess(nu):
        denom = inv_p + eta * (losses - nu)
        if np.any(denom <= 0):
            return math.inf
        return float(np.sum(1.0 / denom) - 1.0)

    if excess(lo) > 1e-12:
        raise ArithmeticError("log-barrier normaliser is not bracketed")
    while hi - lo > tol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if excess(mid) > 0:
            hi = mid
        else:
            lo = mid
    new = 1.0 / (inv_p + eta * (losses - lo))
    return new / new.sum()


def importance_weighted_losses(sampling_probs, index, loss):
    """Loss estimate vector: loss / p_index at the played learner, zero elsewhere."""
    est = np.zeros(len(sampling_probs))
    est[index] = loss / sampling_probs[index]
    return est


def omd_update(state, base_index, importance_weighted_loss):
    """Advance the meta-learner after learner ``base_index`` was played.

    ``importance_weighted_loss`` is the already reweighted loss
    (raw loss / sampling probability).
    """
    if not math.isfinite(importance_weighted_loss) or importance_weighted_loss < 0:
        raise ValueError("importance-weighted loss must be finite and nonnegative")
    losses = np.zeros(state.n_bases)
    losses[base_index] = importance_weighted_loss
    probs = log_barrier_omd(state.probs, state.eta, losses)
    B = state.n_bases
    sampling = (1.0 - state.gamma) * probs + state.gamma / B
    rho = state.rho.copy()
    eta = state.eta.copy()
    grow = 1.0 / sampling > rho
    rho[grow] = 2.0 / sampling[grow]
    eta[grow] *= state.beta
    return replace(state, probs=probs, sampling_probs=sampling, rho=rho, eta=eta,
                   round=state.round + 1)


def reward_to_loss(reward, scale):
    """(scale - reward) / (2 scale) clipped to [0, 1]."""
    return min(max((scale - reward) / (2.0 * scale), 0.0), 1.0)


def proxy_pool_size(M, d, T, c_pool=1.0):
    return int(min(M, math.ceil(c_pool * d ** (1.0 / 3.0) * T ** (2.0 / 3.0))))


class CorralPolicy(BaseEstimator):
    """CORRAL over explore-then-commit learners, one per grid sparsity.

    Parameters
    ----------
    grid : list of int or None
        Sparsity levels; ``None`` uses :func:`sparsity_grid`.
    eta : float or None
        Initial learning rate; ``None`` uses :func:`default_eta` with
        ``r_best``.
    r_best : float
        Regret bound of the best learner fed to :func:`default_eta`.
    reward_scale : float or None
        Scale for mapping rewards to losses; ``None`` uses max_j ||a_j||.
    base : {"lasso", "ridge"}
        Estimator of the learners.
    k_exponent : float
        Exponent of k in the exploration budget (2/3 by default, 1/3 for the
        alternative schedule).
    c_explore, u_hat, lam, rounding_repeats, max_iters
        Learner and design settings, as in :class:`~blocked_bandits.policies.BSLB`.
    c_pool : float
        Proxy pool size is c_pool * d^(1/3) * T^(2/3), capped at M.
    shared_blocking : bool
        Learners propose only globally unpulled arms. When False each learner
        only avoids its own past proposals and collisions are redirected to a
        uniformly random unpulled arm.
    random_state : None, int or Generator
    """

    def __init__(self, grid=None, eta=None, r_best=1.0, reward_scale=None, base="lasso",
                 k_exponent=2.0 / 3.0, c_explore=1.0, u_hat=None, lam=None,
                 rounding_repeats=1, max_iters=500, c_pool=1.0, gamma=None,
                 shared_blocking=True, random_state=None):
        self.grid = grid
        self.eta = eta
        self.r_best = r_best
        self.reward_scale = reward_scale
        self.base = base
        self.k_exponent = k_exponent
        self.c_explore = c_explore
        self.u_hat = u_hat
        self.lam = lam
        self.rounding_repeats = rounding_repeats
        self.max_iters = max_iters
        self.c_pool = c_pool
        self.gamma = gamma
        self.shared_blocking = shared_blocking
        self.random_state = random_state

    def compute_design(self, arms, rng):
        M, d = arms.shape
        u_hat = self.u_hat if self.u_hat is not None else min(2 * d, M)
        return get_good_subset(arms, min(u_hat, M), self.rounding_repeats, False, rng,
                               DEFAULT_ENUMERATION_CAP,
                               relaxation_kwargs={"max_iters": self.max_iters})

    def config(self, env, T):
        d = env.instance.dim
        grid = self.grid if self.grid is not None else sparsity_grid(d)
        if grid and max(grid) > d:
            raise ValueError(f"grid values must not exceed d={d}")
        eta = self.eta if self.eta is not None else default_eta(d, T, self.r_best)
        scale = self.reward_scale if self.reward_scale is not None else _r_max_hat(env.arms)
        return CorralConfig(grid, eta, scale, self.gamma)

    def run(self, env, T, design=None):
        rng = check_random_state(self.random_state)
        M, d = env.instance.n_arms, env.instance.dim
        T = check_positive_int(T, "T")
        if T > M:
            raise ValueError(f"horizon T={T} exceeds the number of arms M={M}")
        if self.base not in ("lasso", "ridge"):
            raise ValueError(f"unknown base estimator {self.base!r}")
        cfg = self.config(env, T)
        if design is None:
            design = self.compute_design(env.arms, rng)

        pool_size = proxy_pool_size(M, d, T, self.c_pool)
        in_design = rng.permutation(design.subset)
        rest = rng.permutation(np.setdiff1d(np.arange(M), design.subset))
        pool = np.concatenate([in_design, rest])[:pool_size]

        make = lasso_estimator if self.base == "lasso" else ridge_estimator
        r_max = _r_max_hat(env.arms)
        budgets = [
            explore_budget(k, T, r_max, design.lambda_hat, self.c_explore, self.k_exponent)
            if T > 1 else 1
            for k in cfg.grid
        ]
        agents = [
            EtcAgent(env.arms, n, make(self.lam), rng, explore_order=rng.permutation(pool))
            for n in budgets
        ]
        own_masks = [np.ones(M, dtype=bool) for _ in agents]
        state = init_corral_state(len(agents), cfg.eta_init, T, cfg.gamma)

        history = np.empty((T, len(agents)))
        chosen = np.empty(T, dtype=np.intp)
        collisions = 0
        observed = {}
        for t in range(T):
            history[t] = state.sampling_probs
            i = int(rng.choice(len(agents), p=state.sampling_probs))
            chosen[t] = i
            agent = agents[i]
            view = env.available if self.shared_blocking else own_masks[i]
            proposal = agent.propose(view)
            own_masks[i][proposal] = False
            if env.available[proposal]:
                reward = env.pull(proposal)
                observed[proposal] = reward
            else:
                collisions += 1
                fallback = int(rng.choice(env.available_indices()))
                observed[fallback] = env.pull(fallback)
                reward = observed[proposal]
            agent.observe(proposal, reward)
            loss = reward_to_loss(reward, cfg.reward_scale)
            state = omd_update(state, i, loss / state.sampling_probs[i])

        self.state_ = state
        self.agents_ = agents
        return env.trace(
            grid=list(cfg.grid),
            explore_budgets=budgets,
            eta_init=cfg.eta_init,
            gamma=state.gamma,
            beta=state.beta,
            rho_init=2.0 * len(agents),
            pool_size=int(pool_size),
            collisions=collisions,
            chosen=chosen,
            probs=history,
        )


def run_cbslb(env, T, design=None, **params):
    return CorralPolicy(**params).run(env, T, design)
