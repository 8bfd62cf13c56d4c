"""Arms, parameters and synthetic instance generators."""

import json
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_arms, check_positive_int, check_random_state

__all__ = [
    "ArmSet",
    "Parameter",
    "Instance",
    "tail_ratio",
    "top_k_indices",
    "gen_sparse_theta",
    "gen_sphere_arms",
    "gen_hard_instance",
    "gen_sparse_instance",
    "top_t_value",
    "sorted_expected_rewards",
]


@dataclass(frozen=True)
class ArmSet:
    """M arms in R^d, each inside the unit l2 ball and the unit l_inf box."""

    arms: np.ndarray

    def __post_init__(self):
        arms = check_arms(self.arms)
        arms.setflags(write=False)
        object.__setattr__(self, "arms", arms)

    @property
    def n_arms(self):
        return self.arms.shape[0]

    @property
    def dim(self):
        return self.arms.shape[1]

    def __len__(self):
        return self.arms.shape[0]


@dataclass(frozen=True)
class Parameter:
    theta: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=np.float64).ravel().copy()
        if not np.all(np.isfinite(theta)):
            raise ValueError("theta must have finite entries")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    @property
    def dim(self):
        return self.theta.shape[0]


@dataclass(frozen=True)
class Instance:
    """Ground truth for one simulated problem.

    ``metadata`` carries generator choices (support rule, head indices, ...)
    and is not part of the JSON replay format.
    """

    arm_set: ArmSet
    theta: Parameter
    noise_sigma: float = 0.0
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not isinstance(self.arm_set, ArmSet):
            object.__setattr__(self, "arm_set", ArmSet(self.arm_set))
        if not isinstance(self.theta, Parameter):
            object.__setattr__(self, "theta", Parameter(self.theta))
        if self.arm_set.dim != self.theta.dim:
            raise ValueError(
                f"dimension mismatch: arms have d={self.arm_set.dim}, "
                f"theta has d={self.theta.dim}"
            )
        sigma = float(self.noise_sigma)
        if not np.isfinite(sigma) or sigma < 0:
            raise ValueError("noise_sigma must be a finite nonnegative number")
        object.__setattr__(self, "noise_sigma", sigma)

    @property
    def arms(self):
        return self.arm_set.arms

    @property
    def n_arms(self):
        return self.arm_set.n_arms

    @property
    def dim(self):
        return self.arm_set.dim

    def expected_rewards(self):
        return self.arm_set.arms @ self.theta.theta

    def to_dict(self):
        return {
            "dim": self.dim,
            "arms": self.arms.tolist(),
            "theta": self.theta.theta.tolist(),
            "sigma": self.noise_sigma,
        }

    @classmethod
    def from_dict(cls, doc):
        arms = np.asarray(doc["arms"], dtype=np.float64)
        if arms.ndim != 2 or arms.shape[1] != int(doc["dim"]):
            raise ValueError("arms must be a list of length-`dim` vectors")
        return cls(ArmSet(arms), Parameter(doc["theta"]), float(doc["sigma"]))

    def to_json(self):
        # json writes floats with repr(), which round-trips exactly
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(fh.read())


def _theta_array(theta):
    if isinstance(theta, Parameter):
        return theta.theta
    return np.asarray(theta, dtype=np.float64).ravel()


def top_k_indices(values, k):
    """Indices of the k largest entries, ties going to the lower index."""
    order = np.argsort(-np.asarray(values), kind="stable")
    return order[:k]


def tail_ratio(theta, k):
    """l1 mass outside the top-k coordinates over the l1 mass inside them."""
    theta = np.abs(_theta_array(theta))
    k = check_positive_int(k, "k")
    if k > theta.shape[0]:
        raise ValueError(f"k={k} exceeds the dimension {theta.shape[0]}")
    head = top_k_indices(theta, k)
    head_mass = theta[head].sum()
    if head_mass == 0:
        raise ValueError("degenerate parameter: top-k l1 norm is zero")
    tail_mass = np.delete(theta, head).sum()
    return float(tail_mass / head_mass)


def gen_sparse_theta(d, k, beta_target, rng=None):
    """Random parameter whose tail ratio at sparsity ``k`` equals ``beta_target``.

    Head magnitudes are uniform on [0.5, 1] with random signs. The tail mass
    is spread evenly over the remaining d - k coordinates, each with a random
    sign. The uniform tail can only sit below the smallest head entry when
    ``beta_target <= (d - k) / k``; if a random head violates this, the head
    magnitudes are flattened to their mean.
    """
    d = check_positive_int(d, "d")
    k = check_positive_int(k, "k")
    if k > d:
        raise ValueError(f"k={k} exceeds d={d}")
    beta_target = float(beta_target)
    if beta_target < 0:
        raise ValueError("beta_target must be nonnegative")
    if beta_target > 0 and k == d:
        raise ValueError("no tail coordinates: beta_target > 0 requires k < d")
    if beta_target > (d - k) / k:
        raise ValueError(
            f"beta_target={beta_target} exceeds (d - k) / k = {(d - k) / k:.6g}; "
            "a uniform tail cannot stay below the head"
        )
    rng = check_random_state(rng)

    head_idx = np.sort(rng.choice(d, size=k, replace=False))
    head = rng.uniform(0.5, 1.0, size=k)
    theta = np.zeros(d)
    if beta_target > 0:
        tail_each = beta_target * head.sum() / (d - k)
        if tail_each > head.min():
            head = np.full(k, head.mean())
            tail_each = beta_target * head.sum() / (d - k)
        tail_idx = np.setdiff1d(np.arange(d), head_idx)
        theta[tail_idx] = tail_each * rng.choice([-1.0, 1.0], size=d - k)
    theta[head_idx] = head * rng.choice([-1.0, 1.0], size=k)
    return Parameter(theta)


def gen_sphere_arms(n, d, rng=None, norm=1.0):
    """``n`` directions uniform on the sphere, scaled to l2 norm ``norm``."""
    rng = check_random_state(rng)
    arms = rng.standard_normal((n, d))
    arms /= np.linalg.norm(arms, axis=1, keepdims=True)
    # a unit vector already lies in the l_inf box; the clip only guards rounding
    np.clip(arms, -1.0, 1.0, out=arms)
    return arms * float(norm)


def gen_hard_instance(M, d, l, low_norm, rng=None, k=5, sigma=0.1):
    """Few long arms among many short ones.

    ``l`` arms are uniform on the unit sphere, the other ``M - l`` arms are
    uniform directions of l2 norm ``low_norm``. ``theta`` is ``k``-sparse and
    supported on the coordinates where the long arms carry the most mass
    (largest summed |entry|), with head magnitudes uniform on [0.5, 1] and
    random signs.
    """
    M = check_positive_int(M, "M")
    d = check_positive_int(d, "d")
    l = check_positive_int(l, "l")
    k = check_positive_int(k, "k")
    if l >= M:
        raise ValueError(f"need l < M, got l={l}, M={M}")
    if not 0 < low_norm <= 1:
        raise ValueError("low_norm must lie in (0, 1]")
    if k > d:
        raise ValueError(f"k={k} exceeds d={d}")
    rng = check_random_state(rng)

    long_arms = gen_sphere_arms(l, d, rng)
    short_arms = gen_sphere_arms(M - l, d, rng, norm=low_norm)
    arms = np.vstack([long_arms, short_arms])
    perm = rng.permutation(M)
    arms = arms[perm]
    long_idx = np.sort(np.flatnonzero(perm < l))

    support = np.sort(top_k_indices(np.abs(long_arms).sum(axis=0), k))
    theta = np.zeros(d)
    theta[support] = rng.uniform(0.5, 1.0, size=k) * rng.choice([-1.0, 1.0], size=k)
    meta = {
        "generator": "hard",
        "support_rule": "top-k coordinates by summed |entry| of the long arms",
        "support": support.tolist(),
        "long_arms": long_idx.tolist(),
    }
    return Instance(ArmSet(arms), Parameter(theta), sigma, metadata=meta)


def gen_sparse_instance(M, d, k, beta, rng=None, sigma=0.1):
    """Sphere-uniform arms with a softly sparse parameter."""
    rng = check_random_state(rng)
    arms = gen_sphere_arms(check_positive_int(M, "M"), check_positive_int(d, "d"), rng)
    theta = gen_sparse_theta(d, k, beta, rng)
    meta = {"generator": "sparse", "k": int(k), "beta": float(beta)}
    return Instance(ArmSet(arms), theta, sigma, metadata=meta)


def sorted_expected_rewards(instance):
    """Expected rewards in benchmark order (descending, ties by lower index)."""
    rewards = instance.expected_rewards()
    return rewards[np.argsort(-rewards, kind="stable")]


def top_t_value(instance, t):
    """Sum of the ``t`` largest expected rewards over distinct arms."""
    t = check_positive_int(t, "t")
    if t > instance.n_arms:
        raise ValueError(f"t={t} exceeds the number of arms {instance.n_arms}")
    return float(sorted_expected_rewards(instance)[:t].sum())
