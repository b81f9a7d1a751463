"""Closed-form reference quantities for permuted low-rank signals.

All functions here are pure and exact to floating rounding: no iteration,
no randomness.  The trace-moment coefficients ``c_k`` bound the expected
Schatten moments of a permuted rank-one matrix built from a unit vector v;
``a_nk`` composes them across several spikes.  The remaining functions are
explicit thresholds and heuristic scales used to annotate experiments; the
heuristics are reported alongside observations, never asserted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNIT_NORM_ATOL = 1e-10
SUPPORTED_ORDERS = (2, 3, 4)


def _check_unit(v: np.ndarray, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or len(v) == 0:
        raise ValueError(f"{name} must be a nonempty 1-D vector")
    if abs(np.linalg.norm(v) - 1.0) > UNIT_NORM_ATOL:
        raise ValueError(f"{name} must have unit l2 norm (within {UNIT_NORM_ATOL})")
    return v


def c_k(v: np.ndarray, n: int, k: int) -> float:
    """Moment coefficient of order k in {2, 3, 4} for unit vector v and n rows.

    c_2 = 1/(n-1) + |v|_4^4
    c_3 = 1/(n-1)^2 + 9/n * |v|_4^4 + |v|_6^6
    c_4 = 1/(n-1)^3 + 4/(n-1)^2 * |v|_4^4 + 12/n * (|v|_4^8 + |v|_6^6) + |v|_8^8
    """
    v = _check_unit(v, "v")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if k not in SUPPORTED_ORDERS:
        raise ValueError(f"k must be one of {SUPPORTED_ORDERS}, got {k}")
    v4 = float(np.sum(v**4))
    if k == 2:
        return 1.0 / (n - 1) + v4
    v6 = float(np.sum(v**6))
    if k == 3:
        return 1.0 / (n - 1) ** 2 + 9.0 / n * v4 + v6
    v8 = float(np.sum(v**8))
    return 1.0 / (n - 1) ** 3 + 4.0 / (n - 1) ** 2 * v4 + 12.0 / n * (v4**2 + v6) + v8


def a_nk(strengths, vectors, n: int, k: int) -> float:
    """Sum over spikes of strength_i * c_k(v_i)^(1/(2k))."""
    strengths = np.asarray(strengths, dtype=float)
    if strengths.ndim != 1 or len(strengths) != len(vectors):
        raise ValueError("strengths and vectors must have equal length")
    if np.any(strengths < 0):
        raise ValueError("spike strengths must be nonnegative")
    return float(sum(th * c_k(v, n, k) ** (1.0 / (2 * k)) for th, v in zip(strengths, vectors)))


@dataclass(frozen=True)
class BoundReport:
    """Echo of a moment-bound evaluation for one spike configuration."""

    k: int
    c_value: float
    a_value: float
    n: int
    strengths: tuple
    v_fourth_norms: tuple  # |v_i|_4^4 echo per spike


def bound_report(strengths, vectors, n: int, k: int) -> BoundReport:
    vs = [_check_unit(v, f"v[{i}]") for i, v in enumerate(vectors)]
    return BoundReport(
        k=k,
        c_value=c_k(vs[0], n, k),
        a_value=a_nk(strengths, vs, n, k),
        n=n,
        strengths=tuple(float(t) for t in strengths),
        v_fourth_norms=tuple(float(np.sum(v**4)) for v in vs),
    )


def bbp_threshold_identity_noise(gamma: float) -> float:
    """Critical spike strength sqrt(gamma) for identity noise covariance, gamma = p/n.

    Stated for the normalization where the noise is Y/sqrt(n) with unit-variance
    entries.  See also the empirical-transition reporting in the test-suite:
    the classical singular-value analysis of the same model gives gamma^(1/4),
    and the package asserts neither value.
    """
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return float(np.sqrt(gamma))


def permuted_norm_heuristic(theta_total: float, n: int, p: int) -> float:
    """Heuristic operator-norm scale theta * (n^-1/2 + p^-1/2) of a permuted spike."""
    if theta_total < 0:
        raise ValueError(f"theta_total must be nonnegative, got {theta_total}")
    if n < 1 or p < 1:
        raise ValueError(f"need n >= 1 and p >= 1, got n={n}, p={p}")
    return float(theta_total * (n**-0.5 + p**-0.5))


def shadowing_ratio(n: int, p: int) -> float:
    """Relative strength n^-1/2 + p^-1/2 below which a factor can be masked
    by stronger ones inflating the permutation threshold."""
    if n < 1 or p < 1:
        raise ValueError(f"need n >= 1 and p >= 1, got n={n}, p={p}")
    return float(n**-0.5 + p**-0.5)
