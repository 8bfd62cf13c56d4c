"""Simulated blocked linear bandit and regret accounting."""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_random_state
from .model import sorted_expected_rewards

__all__ = ["BlockingViolation", "Environment", "RunTrace", "pull", "regret_trace"]


class BlockingViolation(ValueError):
    """An arm was requested a second time."""


class Environment:
    """One run of the blocked bandit: every arm may be pulled at most once.

    Rewards are <theta, a> + sigma * z with z standard normal drawn from the
    environment's own generator, so the reward stream depends only on the
    seed and the pull sequence.
    """

    def __init__(self, instance, rng=None):
        self.instance = instance
        self.rng = check_random_state(rng)
        self.available = np.ones(instance.n_arms, dtype=bool)
        self.pulled = []
        self.rewards = []
        self._expected = instance.expected_rewards()

    @property
    def round(self):
        return len(self.pulled)

    @property
    def n_arms(self):
        return self.instance.n_arms

    @property
    def arms(self):
        return self.instance.arms

    def available_indices(self):
        return np.flatnonzero(self.available)

    def pull(self, arm_index):
        arm_index = int(arm_index)
        if not 0 <= arm_index < self.n_arms:
            raise IndexError(f"arm index {arm_index} out of range")
        if self.round >= self.n_arms:
            raise BlockingViolation("all arms have been pulled")
        if not self.available[arm_index]:
            raise BlockingViolation(f"blocking violation: arm {arm_index} was already pulled")
        noise = self.instance.noise_sigma * self.rng.standard_normal()
        reward = float(self._expected[arm_index] + noise)
        self.available[arm_index] = False
        self.pulled.append(arm_index)
        self.rewards.append(reward)
        return reward

    def trace(self, **meta):
        idx = np.asarray(self.pulled, dtype=np.intp)
        return RunTrace(
            arm_indices=idx,
            rewards=np.asarray(self.rewards, dtype=np.float64),
            expected_rewards=self._expected[idx],
            cum_regret=regret_trace(self.instance, idx),
            meta=meta,
        )


def pull(env, arm_index):
    return env.pull(arm_index)


@dataclass
class RunTrace:
    arm_indices: np.ndarray
    rewards: np.ndarray
    expected_rewards: np.ndarray
    cum_regret: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.arm_indices)
        if not (len(self.rewards) == len(self.expected_rewards) == len(self.cum_regret) == n):
            raise ValueError("trace columns must have equal length")
        if len(np.unique(self.arm_indices)) != n:
            raise BlockingViolation("trace contains a repeated arm index")

    def __len__(self):
        return len(self.arm_indices)

    @property
    def final_regret(self):
        return float(self.cum_regret[-1]) if len(self) else 0.0


def regret_trace(instance, arm_indices):
    """Cumulative regret against the best t distinct arms, for every t.

    Under blocking this is not monotone: the benchmark for round t is the
    t-th best arm, which can be worse than an arm pulled earlier.
    """
    idx = np.asarray(arm_indices, dtype=np.intp)
    T = len(idx)
    if len(np.unique(idx)) != T:
        raise BlockingViolation("arm_indices contain duplicates")
    if T > instance.n_arms:
        raise ValueError("more pulls than arms")
    if T == 0:
        return np.zeros(0)
    bench = np.cumsum(sorted_expected_rewards(instance)[:T])
    got = np.cumsum(instance.expected_rewards()[idx])
    return bench - got
