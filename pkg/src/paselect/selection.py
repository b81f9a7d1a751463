"""Parallel analysis: stepwise selection of factors against permutation thresholds.

The procedure compares the k-th singular value of the data matrix X with a
percentile of the k-th singular values of matrices obtained by independently
permuting the entries within each column of X.  Ranks are accepted stepwise,
stopping at the first failure; comparisons are strict, so ties reject.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import permute
from .spectra import SingularSpectrum, singular_values

MAX_SEED = 2**64


@dataclass(frozen=True)
class PAConfig:
    """Configuration for a parallel-analysis run.

    Parameters
    ----------
    num_permutations : number of independent permutation arrays drawn (K).
        The default 19 gives a conventional 1/(K+1) = 5% null level at the
        100th percentile.
    percentile : which percentile of the K permuted singular values forms
        each threshold, in (0, 100].  100 means the max over permutations.
    max_rank : cap on the number of ranks examined; None means min(n, p).
    stepwise : if True (default), stop at the first rank not selected.  If
        False, count every rank whose singular value beats its threshold,
        regardless of earlier failures (diagnostic mode).
    demean_columns : shift every column of X to mean zero before the run.
    seed : 64-bit seed from which the K permutation streams are derived.
    """

    num_permutations: int = 19
    percentile: float = 100.0
    max_rank: int | None = None
    stepwise: bool = True
    demean_columns: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.num_permutations < 1:
            raise ValueError(f"num_permutations must be >= 1, got {self.num_permutations}")
        if not (0.0 < self.percentile <= 100.0):
            raise ValueError(f"percentile must be in (0, 100], got {self.percentile}")
        if self.max_rank is not None and self.max_rank < 1:
            raise ValueError(f"max_rank must be >= 1, got {self.max_rank}")
        if not (0 <= int(self.seed) < MAX_SEED):
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass
class SelectionResult:
    """Outcome of one parallel-analysis run.

    ``thresholds[k]`` is the configured percentile of the k-th singular
    values over the permuted copies; ``selected_mask[k]`` records the strict
    comparison at rank k (regardless of stepwise stopping).
    """

    selected_rank: int
    observed: SingularSpectrum
    thresholds: np.ndarray
    perm_spectra: list[SingularSpectrum]
    selected_mask: np.ndarray
    config: PAConfig
    seed: int


def percentile_nearest_rank(values, q: float) -> float:
    """Nearest-rank percentile: smallest v with at least ceil(q*len/100) values <= v."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or len(values) == 0:
        raise ValueError("values must be a nonempty 1-D sequence")
    if not (0.0 < q <= 100.0):
        raise ValueError(f"q must be in (0, 100], got {q}")
    rank = math.ceil(q * len(values) / 100.0)
    return float(np.sort(values)[rank - 1])


def demean(X: np.ndarray) -> np.ndarray:
    """Shift every column of X to mean zero."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-D, got shape {X.shape}")
    return X - X.mean(axis=0, keepdims=True)


def pa_select(X: np.ndarray, config: PAConfig = PAConfig()) -> SelectionResult:
    """Run parallel analysis on X and return the selected rank with diagnostics.

    Draws ``config.num_permutations`` independent permutation arrays (their
    streams derived from ``config.seed`` by permutation index), computes the
    singular spectrum of each permuted copy of X, forms per-rank percentile
    thresholds, and selects ranks stepwise with strict inequality.
    Deterministic given (X, config).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-D, got shape {X.shape}")
    n, p = X.shape
    if n < 2:
        raise ValueError(f"need at least 2 rows to permute columns, got n={n}")
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite entries")
    if config.demean_columns:
        X = demean(X)

    observed = singular_values(X)
    limit = min(n, p)
    max_rank = limit if config.max_rank is None else min(config.max_rank, limit)

    streams = np.random.SeedSequence(config.seed).spawn(config.num_permutations)
    perm_spectra = []
    for child in streams:
        rng = np.random.default_rng(child)
        pa = permute.sample_uniform(n, p, rng)
        perm_spectra.append(singular_values(permute.apply(X, pa)))

    perm_values = np.stack([s.values for s in perm_spectra])  # (K, limit)
    thresholds = np.array(
        [percentile_nearest_rank(perm_values[:, k], config.percentile) for k in range(max_rank)]
    )
    selected_mask = observed.values[:max_rank] > thresholds

    if config.stepwise:
        failures = np.nonzero(~selected_mask)[0]
        selected_rank = int(failures[0]) if len(failures) else max_rank
    else:
        selected_rank = int(np.count_nonzero(selected_mask))

    return SelectionResult(
        selected_rank=selected_rank,
        observed=observed,
        thresholds=thresholds,
        perm_spectra=perm_spectra,
        selected_mask=selected_mask,
        config=config,
        seed=config.seed,
    )
