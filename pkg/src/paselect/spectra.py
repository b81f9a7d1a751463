"""Singular-value computation and norm utilities.

Only singular values are ever needed in this package; singular vectors are
never computed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Relative accuracy we rely on from the LAPACK divide-and-conquer SVD backend.
SVD_RTOL = 1e-10
# Tolerance for the sum-of-squares consistency check on a full spectrum.
FROBENIUS_RTOL = 1e-8


@dataclass(frozen=True)
class SingularSpectrum:
    """Singular values of an n x p matrix, in nonincreasing order."""

    values: np.ndarray
    n: int
    p: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or len(values) > min(self.n, self.p):
            raise ValueError(f"expected at most min(n, p) values, got shape {values.shape}")
        if np.any(values < 0):
            raise ValueError("singular values must be nonnegative")
        if np.any(np.diff(values) > 0):
            raise ValueError("singular values must be nonincreasing")

    def sum_of_squares(self) -> float:
        return float(np.dot(self.values, self.values))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]


def singular_values(X: np.ndarray, k: int | None = None) -> SingularSpectrum:
    """Top ``min(k, min(n, p))`` singular values of X, descending.

    Backed by a full dense SVD (values only).  Raises on non-finite entries.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-D, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite entries")
    n, p = X.shape
    vals = np.linalg.svd(X, compute_uv=False)
    frob_sq = float(np.sum(X * X))
    got = float(np.dot(vals, vals))
    if abs(got - frob_sq) > FROBENIUS_RTOL * max(frob_sq, 1.0):
        raise ArithmeticError(
            f"SVD backend inconsistency: sum of squared singular values {got} "
            f"vs squared Frobenius norm {frob_sq}"
        )
    if k is not None:
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        vals = vals[: min(k, len(vals))]
    return SingularSpectrum(values=vals, n=n, p=p)


def operator_norm(X: np.ndarray) -> float:
    """Largest singular value of X."""
    return float(singular_values(X, k=1).values[0])
