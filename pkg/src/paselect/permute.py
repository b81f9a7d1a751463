"""Per-column permutation arrays: the randomization at the heart of parallel analysis.

A permutation array holds one permutation of the row indices per column of an
``n x p`` matrix.  Applying it rearranges the entries within each column
independently, which preserves every column as a multiset (and hence the
Frobenius norm bit-exactly) while scrambling cross-column structure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PermutationArray:
    """p independent permutations of {0..n-1}, one per column.

    ``perms[j]`` is a forward index map: row ``i`` of the permuted column ``j``
    reads row ``perms[j][i]`` of the original.  Indices are 0-based.
    """

    n: int
    perms: np.ndarray  # shape (p, n), integer dtype

    def __post_init__(self):
        perms = np.asarray(self.perms, dtype=np.intp)
        object.__setattr__(self, "perms", perms)
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if perms.ndim != 2 or perms.shape[1] != self.n:
            raise ValueError(f"perms must have shape (p, n={self.n}), got {perms.shape}")
        if perms.shape[0] < 1:
            raise ValueError("permutation array needs at least one column (p >= 1)")
        if not np.array_equal(np.sort(perms, axis=1), np.tile(np.arange(self.n), (perms.shape[0], 1))):
            raise ValueError("each row of perms must be a bijection of {0..n-1}")

    @property
    def p(self) -> int:
        return self.perms.shape[0]


def sample_uniform(n: int, p: int, rng: np.random.Generator) -> PermutationArray:
    """Draw p independent uniform permutations of {0..n-1} from ``rng``.

    Uses numpy's vectorized in-place shuffle; deterministic given the
    generator state.
    """
    if n < 1 or p < 1:
        raise ValueError(f"need n >= 1 and p >= 1, got n={n}, p={p}")
    perms = rng.permuted(np.tile(np.arange(n), (p, 1)), axis=1)
    return PermutationArray(n=n, perms=perms)


def identity_array(n: int, p: int) -> PermutationArray:
    """Permutation array where every column permutation is the identity."""
    if n < 1 or p < 1:
        raise ValueError(f"need n >= 1 and p >= 1, got n={n}, p={p}")
    return PermutationArray(n=n, perms=np.tile(np.arange(n), (p, 1)))


def apply(X: np.ndarray, pa: PermutationArray) -> np.ndarray:
    """Permute the entries within each column of X: ``Y[i, j] = X[perms[j][i], j]``.

    X is not modified; a new array is returned.
    """
    X = np.asarray(X)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-D, got shape {X.shape}")
    n, p = X.shape
    if n != pa.n or p != pa.p:
        raise ValueError(f"X has shape {X.shape} but permutation array expects ({pa.n}, {pa.p})")
    return X[pa.perms.T, np.arange(p)]


def invert(pa: PermutationArray) -> PermutationArray:
    """Inverse array: applying it after ``pa`` restores the original matrix."""
    inv = np.argsort(pa.perms, axis=1)
    return PermutationArray(n=pa.n, perms=inv)
