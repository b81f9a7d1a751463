"""Monte Carlo and exhaustive verification of trace moments of permuted rank-one matrices.

With A = (u v^T) permuted column-wise, u a centered unit vector and v a unit
vector, the quantities of interest are E tr((A^T A)^k) for k in {1, 2, 3, 4}
and the entry moments E A_ij, E A_ij^2, E A_ij A_kj.  The trace moments are
bounded above by the closed forms in :mod:`paselect.oracles`; the entry
moments have exact values v_j^2 / n and -v_j^2 / (n (n-1)).

Two independent routes are provided: plain Monte Carlo over permutation
arrays, and exhaustive enumeration of all (n!)^p arrays when that count is
small enough.  Enumeration is exact and carries no standard error.

Replicates are processed in fixed-size batches so results are reproducible
for a given seed; means and standard errors use numpy's pairwise summation.
The batched sampler permutes copies of u by sorting independent 64-bit random
keys, which draws from the same uniform distribution as an in-place shuffle
but is an order of magnitude faster at the millions-of-permutations scale
used here.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .oracles import c_k

UNIT_NORM_ATOL = 1e-10
CENTERING_ATOL = 1e-8
TRACE_ORDERS = (1, 2, 3, 4)
ENUMERATION_LIMIT = 10**6  # max (n!)^p for the exhaustive mode
SE_MARGIN = 3.0  # standard-error margin for bound checks (<1% flake accepted)
_BATCH = 256  # replicates per batch; fixed so streams replay identically


@dataclass(frozen=True)
class MomentEstimate:
    """Estimate of E tr((A^T A)^k) with its closed-form reference bound."""

    k: int
    estimate: float
    std_error: float
    replicates: int
    bound: float
    n: int
    p: int
    method: str  # "mc" or "exhaustive"

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "estimate": self.estimate,
            "std_error": self.std_error,
            "replicates": self.replicates,
            "bound": self.bound,
            "n": self.n,
            "p": self.p,
            "method": self.method,
        }


@dataclass(frozen=True)
class EntryPairMoments:
    """Estimates of (E A_ij, E A_ij^2, E A_ij A_kj) with standard errors."""

    first: float
    second: float
    cross: float
    se_first: float
    se_second: float
    se_cross: float
    replicates: int

    def as_triple(self) -> tuple:
        return (self.first, self.second, self.cross)


@dataclass(frozen=True)
class BoundCheck:
    """Pass/fail record of one trace-moment bound check."""

    k: int
    estimate: float
    std_error: float
    bound: float
    slack: float
    passed: bool
    method: str
    replicates: int
    n: int
    p: int

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "estimate": self.estimate,
            "std_error": self.std_error,
            "bound": self.bound,
            "slack": self.slack,
            "passed": self.passed,
            "method": self.method,
            "replicates": self.replicates,
            "n": self.n,
            "p": self.p,
        }


def check_vectors(u: np.ndarray, v: np.ndarray) -> tuple:
    """Validate the preconditions on (u, v); raise naming the failed condition."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.ndim != 1 or len(u) < 2:
        raise ValueError("u must be a 1-D vector with at least 2 entries")
    if v.ndim != 1 or len(v) < 1:
        raise ValueError("v must be a nonempty 1-D vector")
    if abs(np.linalg.norm(u) - 1.0) > UNIT_NORM_ATOL:
        raise ValueError(f"u is not unit norm within {UNIT_NORM_ATOL}")
    if abs(np.linalg.norm(v) - 1.0) > UNIT_NORM_ATOL:
        raise ValueError(f"v is not unit norm within {UNIT_NORM_ATOL}")
    if abs(float(np.sum(u))) > CENTERING_ATOL:
        raise ValueError(f"u entries do not sum to zero within {CENTERING_ATOL}")
    return u, v


def random_centered_unit(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random unit vector orthogonal to the all-ones vector (n >= 2)."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    g = rng.standard_normal(n)
    g -= g.mean()
    return g / np.linalg.norm(g)


def random_unit(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random unit vector."""
    g = rng.standard_normal(n)
    return g / np.linalg.norm(g)


def exhaustive_count(n: int, p: int) -> int:
    return math.factorial(n) ** p


def exhaustive_mode_active(n: int, p: int) -> bool:
    """Whether (n!)^p is small enough to enumerate every permutation array."""
    return exhaustive_count(n, p) <= ENUMERATION_LIMIT


def _batch_traces(At: np.ndarray, k: int, out: np.ndarray) -> None:
    """Fill ``out`` with tr((A^T A)^k) for each A^T slice in At (batch, p, n)."""
    for i in range(At.shape[0]):
        a = At[i]
        G = a @ a.T
        if k == 2:
            out[i] = np.einsum("ij,ij->", G, G)
        elif k == 3:
            H = G @ a
            out[i] = np.einsum("ij,ij->", H, H)
        else:  # k == 4
            G2 = G @ G
            out[i] = np.einsum("ij,ij->", G2, G2)


def _sample_permuted_rows(u: np.ndarray, rows: int, rng: np.random.Generator) -> np.ndarray:
    """(rows, n) array whose rows are independent uniform permutations of u."""
    keys = rng.integers(0, np.iinfo(np.uint64).max, size=(rows, len(u)), dtype=np.uint64)
    return u[np.argsort(keys, axis=1)]


def trace_moment_mc(
    u: np.ndarray,
    v: np.ndarray,
    k: int,
    reps: int = 10_000,
    rng: np.random.Generator | None = None,
) -> MomentEstimate:
    """Monte Carlo estimate of E tr((A^T A)^k) over ``reps`` permutation arrays.

    For k = 1 the trace equals |u|^2 |v|^2 for every array (permutations move
    entries without altering them), so the exact value is returned with zero
    standard error and no sampling.
    """
    u, v = check_vectors(u, v)
    if k not in TRACE_ORDERS:
        raise ValueError(f"k must be one of {TRACE_ORDERS}, got {k}")
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    n, p = len(u), len(v)
    if k == 1:
        exact = float(np.dot(u, u) * np.dot(v, v))
        return MomentEstimate(k=1, estimate=exact, std_error=0.0, replicates=reps,
                              bound=1.0, n=n, p=p, method="mc")
    if rng is None:
        raise ValueError("rng is required for k >= 2")
    vals = np.empty(reps)
    done = 0
    while done < reps:
        b = min(_BATCH, reps - done)
        At = _sample_permuted_rows(u, b * p, rng).reshape(b, p, n)
        At *= v[None, :, None]
        _batch_traces(At, k, vals[done:done + b])
        done += b
    est = float(vals.mean())
    se = float(vals.std(ddof=1) / np.sqrt(reps)) if reps > 1 else 0.0
    return MomentEstimate(k=k, estimate=est, std_error=se, replicates=reps,
                          bound=c_k(v, n, k), n=n, p=p, method="mc")


def _enumerate_permuted(u: np.ndarray, v: np.ndarray, batch: int = 4096):
    """Yield (count, p, n) batches of A^T covering every permutation array once."""
    n, p = len(u), len(v)
    total = exhaustive_count(n, p)
    if total > ENUMERATION_LIMIT:
        raise ValueError(
            f"(n!)^p = {total} exceeds the enumeration limit {ENUMERATION_LIMIT}"
        )
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    pu = u[perms]  # (n!, n)
    nfact = len(perms)
    combo_iter = itertools.product(range(nfact), repeat=p)
    while True:
        chunk = np.array(list(itertools.islice(combo_iter, batch)), dtype=np.intp)
        if chunk.size == 0:
            return
        At = pu[chunk] * v[None, :, None]  # (b, p, n)
        yield At


def trace_moment_exhaustive(u: np.ndarray, v: np.ndarray, k: int) -> MomentEstimate:
    """Exact E tr((A^T A)^k) by enumerating all (n!)^p permutation arrays."""
    u, v = check_vectors(u, v)
    if k not in TRACE_ORDERS:
        raise ValueError(f"k must be one of {TRACE_ORDERS}, got {k}")
    n, p = len(u), len(v)
    if k == 1:
        exact = float(np.dot(u, u) * np.dot(v, v))
        return MomentEstimate(k=1, estimate=exact, std_error=0.0,
                              replicates=exhaustive_count(n, p), bound=1.0,
                              n=n, p=p, method="exhaustive")
    total = 0
    acc = 0.0
    for At in _enumerate_permuted(u, v):
        out = np.empty(At.shape[0])
        _batch_traces(At, k, out)
        acc += float(out.sum())
        total += At.shape[0]
    return MomentEstimate(k=k, estimate=acc / total, std_error=0.0, replicates=total,
                          bound=c_k(v, n, k), n=n, p=p, method="exhaustive")


def _check_entry_indices(n: int, p: int, i: int, j: int, k_row: int) -> None:
    if not (0 <= i < n and 0 <= k_row < n):
        raise ValueError(f"row indices must lie in [0, {n}), got i={i}, k_row={k_row}")
    if not (0 <= j < p):
        raise ValueError(f"column index must lie in [0, {p}), got j={j}")
    if i == k_row:
        raise ValueError("i and k_row must be distinct rows")


def entry_pair_moment_mc(
    u: np.ndarray,
    v: np.ndarray,
    i: int,
    j: int,
    k_row: int,
    reps: int = 100_000,
    rng: np.random.Generator | None = None,
) -> EntryPairMoments:
    """Monte Carlo estimates of (E A_ij, E A_ij^2, E A_ij A_k_row,j).

    Exact values under the preconditions: 0, v_j^2 / n, and
    -v_j^2 / (n (n - 1)).
    """
    u, v = check_vectors(u, v)
    _check_entry_indices(len(u), len(v), i, j, k_row)
    if reps < 2:
        raise ValueError(f"reps must be >= 2, got {reps}")
    if rng is None:
        raise ValueError("rng is required")
    up = _sample_permuted_rows(u, reps, rng)
    a = v[j] * up[:, i]
    b = v[j] * up[:, k_row]
    sq = a * a
    cr = a * b
    root = np.sqrt(reps)
    return EntryPairMoments(
        first=float(a.mean()),
        second=float(sq.mean()),
        cross=float(cr.mean()),
        se_first=float(a.std(ddof=1) / root),
        se_second=float(sq.std(ddof=1) / root),
        se_cross=float(cr.std(ddof=1) / root),
        replicates=reps,
    )


def entry_pair_moment_exhaustive(
    u: np.ndarray, v: np.ndarray, i: int, j: int, k_row: int
) -> EntryPairMoments:
    """Exact entry moments by enumerating all (n!)^p permutation arrays."""
    u, v = check_vectors(u, v)
    _check_entry_indices(len(u), len(v), i, j, k_row)
    total = 0
    s1 = s2 = s3 = 0.0
    for At in _enumerate_permuted(u, v):
        a = At[:, j, i]
        b = At[:, j, k_row]
        s1 += float(a.sum())
        s2 += float((a * a).sum())
        s3 += float((a * b).sum())
        total += At.shape[0]
    return EntryPairMoments(
        first=s1 / total, second=s2 / total, cross=s3 / total,
        se_first=0.0, se_second=0.0, se_cross=0.0, replicates=total,
    )


def check_bound(
    u: np.ndarray,
    v: np.ndarray,
    k: int,
    reps: int = 10_000,
    rng: np.random.Generator | None = None,
    mode: str = "auto",
) -> BoundCheck:
    """Check E tr((A^T A)^k) <= c_k(v) and report the slack.

    ``mode`` is "auto" (exhaustive when (n!)^p <= 10^6, else Monte Carlo),
    "exhaustive", or "mc".  A Monte Carlo check passes when
    estimate - 3 * std_error <= bound; an exhaustive check is exact.
    """
    u, v = check_vectors(u, v)
    n, p = len(u), len(v)
    if mode not in ("auto", "exhaustive", "mc"):
        raise ValueError(f"mode must be auto, exhaustive, or mc, got {mode!r}")
    if mode == "auto":
        mode = "exhaustive" if exhaustive_mode_active(n, p) else "mc"
    if mode == "exhaustive":
        est = trace_moment_exhaustive(u, v, k)
    else:
        est = trace_moment_mc(u, v, k, reps=reps, rng=rng)
    passed = est.estimate - SE_MARGIN * est.std_error <= est.bound
    return BoundCheck(
        k=k,
        estimate=est.estimate,
        std_error=est.std_error,
        bound=est.bound,
        slack=est.bound - est.estimate,
        passed=bool(passed),
        method=est.method,
        replicates=est.replicates,
        n=n,
        p=p,
    )
