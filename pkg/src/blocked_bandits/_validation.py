"""Input validation helpers shared by the estimators and simulators."""

import numbers

import numpy as np
from sklearn.utils import check_array

__all__ = [
    "check_arms",
    "check_symmetric_matrix",
    "check_positive_int",
    "check_random_state",
]

# slack for arms that were normalised in floating point
NORM_SLACK = 1e-12


def check_arms(arms, name="arms"):
    """Validate an (M, d) arm matrix against the unit-ball / unit-box constraints."""
    arms = check_array(arms, dtype=np.float64, ensure_2d=True, input_name=name)
    if np.any(np.abs(arms) > 1.0 + NORM_SLACK):
        raise ValueError(f"{name}: every entry must satisfy |a_ij| <= 1")
    norms = np.linalg.norm(arms, axis=1)
    if np.any(norms > 1.0 + NORM_SLACK):
        bad = int(np.argmax(norms))
        raise ValueError(f"{name}: arm {bad} has l2 norm {norms[bad]:.6g} > 1")
    return arms


def check_symmetric_matrix(matrix, atol=1e-9, name="matrix"):
    matrix = check_array(matrix, dtype=np.float64, ensure_2d=True, input_name=name)
    if matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"{name} must be square, got shape {matrix.shape}")
    scale = max(1.0, float(np.max(np.abs(matrix))))
    if not np.allclose(matrix, matrix.T, rtol=0.0, atol=atol * scale):
        raise ValueError(f"{name} is not symmetric")
    return matrix


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_random_state(seed):
    """Coerce None, an int, a SeedSequence or a Generator into a Generator."""
    if isinstance(seed, np.random.RandomState):
        raise TypeError("pass a numpy Generator, not a legacy RandomState")
    return np.random.default_rng(seed)
