"""Generators for factor models and signal-plus-noise spiked models.

All generators take an explicit ``numpy.random.Generator``; nothing touches
global RNG state, so runs are deterministic given a seed and replicates can
be parallelized by handing each task its own stream.

Noise is generated per sample as ``Phi^(1/2) z`` with independent standardized
entries and diagonal variance profile, which makes its distribution invariant
under independent column permutations by construction.  The optional common
shift shared by all samples (which such invariance also allows) is not
generated: it only inflates the noise level, and the practically interesting
scenarios have none; de-meaning removes it anyway.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectra import operator_norm

DISTRIBUTIONS = ("gaussian", "rademacher", "student_t")
MIN_STUDENT_DF = 7.0
UNIT_NORM_ATOL = 1e-10
# guards against float dust in sparsity * p landing just below an integer
_SUPPORT_EPS = 1e-9


def _draw(dist: str, size, rng: np.random.Generator, t_df: float) -> np.ndarray:
    """iid draws with mean 0 and variance 1."""
    if dist == "gaussian":
        return rng.standard_normal(size)
    if dist == "rademacher":
        return rng.integers(0, 2, size=size).astype(float) * 2.0 - 1.0
    if dist == "student_t":
        if t_df < MIN_STUDENT_DF:
            raise ValueError(f"student_t needs df >= {MIN_STUDENT_DF}, got {t_df}")
        return rng.standard_t(t_df, size=size) / np.sqrt(t_df / (t_df - 2.0))
    raise ValueError(f"unknown distribution {dist!r}; expected one of {DISTRIBUTIONS}")


@dataclass(frozen=True)
class LoadingSpec:
    """Recipe for a p x m loading matrix with column norm ``strength``.

    Nonzero entries are iid Gaussian before normalization; the support of each
    column is the first floor(sparsity * p) coordinates (optionally shuffled).
    """

    p: int
    m: int = 1
    strength: float = 1.0
    sparsity: float = 1.0
    shuffle_support: bool = False

    def __post_init__(self):
        if self.p < 1 or self.m < 1:
            raise ValueError(f"need p >= 1 and m >= 1, got p={self.p}, m={self.m}")
        if self.strength < 0:
            raise ValueError(f"strength must be nonnegative, got {self.strength}")
        if not (0.0 < self.sparsity <= 1.0):
            raise ValueError(f"sparsity must be in (0, 1], got {self.sparsity}")
        if self.support_size() < 1:
            raise ValueError(
                f"floor(sparsity * p) = 0: sparsity {self.sparsity} too small for p={self.p}"
            )

    def support_size(self) -> int:
        return int(np.floor(self.sparsity * self.p + _SUPPORT_EPS))


def gen_loadings(spec: LoadingSpec, rng: np.random.Generator) -> np.ndarray:
    """Draw a p x m loading matrix per ``spec``; every column has l2 norm == strength."""
    k = spec.support_size()
    cols = np.zeros((spec.p, spec.m))
    cols[:k] = rng.standard_normal((k, spec.m))
    norms = np.linalg.norm(cols, axis=0)
    norms[norms == 0] = 1.0  # only reachable at strength 0 (columns stay zero)
    cols = cols / norms * spec.strength
    if spec.shuffle_support:
        for j in range(spec.m):
            cols[:, j] = cols[rng.permutation(spec.p), j]
    return cols


@dataclass(frozen=True)
class FactorModelSpec:
    """Common-factor model: X = U Psi^(1/2) Lambda^T + Z Phi^(1/2).

    U (n x r) and Z (n x p) have iid standardized entries from the configured
    distributions.  ``factor_cov`` defaults to the identity and ``idio_var``
    to all ones.
    """

    n: int
    p: int
    r: int
    loadings: np.ndarray  # (p, r)
    factor_cov: np.ndarray | None = None  # (r, r) symmetric PSD
    idio_var: np.ndarray | None = None  # (p,) nonnegative
    factor_dist: str = "gaussian"
    noise_dist: str = "gaussian"
    t_df: float = 8.0

    def __post_init__(self):
        if self.n < 1 or self.p < 1 or self.r < 1:
            raise ValueError(f"need n, p, r >= 1, got n={self.n}, p={self.p}, r={self.r}")
        loadings = np.asarray(self.loadings, dtype=float)
        object.__setattr__(self, "loadings", loadings)
        if loadings.shape != (self.p, self.r):
            raise ValueError(f"loadings must have shape ({self.p}, {self.r}), got {loadings.shape}")
        if self.factor_cov is not None:
            cov = np.asarray(self.factor_cov, dtype=float)
            object.__setattr__(self, "factor_cov", cov)
            if cov.shape != (self.r, self.r):
                raise ValueError(f"factor_cov must have shape ({self.r}, {self.r})")
            if not np.allclose(cov, cov.T, atol=1e-12):
                raise ValueError("factor_cov must be symmetric")
            if np.linalg.eigvalsh(cov).min() < -1e-10:
                raise ValueError("factor_cov must be positive semidefinite")
        if self.idio_var is not None:
            phi = np.atleast_1d(np.asarray(self.idio_var, dtype=float))
            if phi.shape == (1,):
                phi = np.full(self.p, phi[0])
            object.__setattr__(self, "idio_var", phi)
            if phi.shape != (self.p,):
                raise ValueError(f"idio_var must have {self.p} entries, got shape {phi.shape}")
            if np.any(phi < 0):
                raise ValueError("idio_var entries must be nonnegative")
        for dist in (self.factor_dist, self.noise_dist):
            if dist not in DISTRIBUTIONS:
                raise ValueError(f"unknown distribution {dist!r}; expected one of {DISTRIBUTIONS}")


def simulate_factor_model(spec: FactorModelSpec, rng: np.random.Generator) -> np.ndarray:
    """Draw one n x p data matrix from the factor model."""
    U = _draw(spec.factor_dist, (spec.n, spec.r), rng, spec.t_df)
    if spec.factor_cov is not None:
        w, V = np.linalg.eigh(spec.factor_cov)
        U = U @ (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T
    X = U @ spec.loadings.T
    Z = _draw(spec.noise_dist, (spec.n, spec.p), rng, spec.t_df)
    if spec.idio_var is None:
        X += Z
    else:
        X += Z * np.sqrt(spec.idio_var)
    return X


@dataclass(frozen=True)
class SpikedModelSpec:
    """Signal-plus-noise model: X = sum_k strength_k u_k v_k^T + Y diag(T)^(1/2) / sqrt(n).

    Direction vectors may be given explicitly (rows of ``u`` / ``v``, unit
    norm) or left as None to be drawn uniformly from the sphere (random
    delocalized directions).  ``noise_variances`` is the diagonal profile T,
    defaulting to all ones.
    """

    n: int
    p: int
    strengths: np.ndarray  # (r,)
    u: np.ndarray | None = None  # (r, n) unit rows
    v: np.ndarray | None = None  # (r, p) unit rows
    noise_variances: np.ndarray | None = None  # (p,)
    noise_dist: str = "gaussian"
    t_df: float = 8.0

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise ValueError(f"need n >= 1 and p >= 1, got n={self.n}, p={self.p}")
        strengths = np.atleast_1d(np.asarray(self.strengths, dtype=float))
        object.__setattr__(self, "strengths", strengths)
        if np.any(strengths < 0):
            raise ValueError("spike strengths must be nonnegative")
        r = len(strengths)
        for name, arr, dim in (("u", self.u, self.n), ("v", self.v, self.p)):
            if arr is None:
                continue
            arr = np.asarray(arr, dtype=float)
            object.__setattr__(self, name, arr)
            if arr.shape != (r, dim):
                raise ValueError(f"{name} must have shape ({r}, {dim}), got {arr.shape}")
            norms = np.linalg.norm(arr, axis=1)
            if np.any(np.abs(norms - 1.0) > UNIT_NORM_ATOL):
                raise ValueError(f"rows of {name} must have unit norm (within {UNIT_NORM_ATOL})")
        if self.noise_variances is not None:
            T = np.asarray(self.noise_variances, dtype=float)
            object.__setattr__(self, "noise_variances", T)
            if T.shape != (self.p,):
                raise ValueError(f"noise_variances must have {self.p} entries")
            if np.any(T < 0):
                raise ValueError("noise_variances must be nonnegative")
        if self.noise_dist not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.noise_dist!r}")

    @property
    def r(self) -> int:
        return len(self.strengths)


def _random_unit_rows(r: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((r, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def simulate_spiked(spec: SpikedModelSpec, rng: np.random.Generator) -> np.ndarray:
    """Draw one n x p matrix from the spiked model."""
    u = spec.u if spec.u is not None else _random_unit_rows(spec.r, spec.n, rng)
    v = spec.v if spec.v is not None else _random_unit_rows(spec.r, spec.p, rng)
    X = (u.T * spec.strengths) @ v
    Y = _draw(spec.noise_dist, (spec.n, spec.p), rng, spec.t_df)
    if spec.noise_variances is not None:
        Y = Y * np.sqrt(spec.noise_variances)
    return X + Y / np.sqrt(spec.n)


def localization(vec: np.ndarray) -> float:
    """l4 norm over l2 norm of a nonzero vector: 1 for a basis vector,
    p^(-1/4) for a flat one."""
    vec = np.asarray(vec, dtype=float)
    l2 = np.linalg.norm(vec)
    if l2 == 0:
        raise ValueError("localization is undefined for the zero vector")
    return float(np.sum(vec**4) ** 0.25 / l2)


def empirical_noise_level(
    n: int,
    p: int,
    noise_variances: np.ndarray | None = None,
    reps: int = 20,
    rng: np.random.Generator | None = None,
    noise_dist: str = "gaussian",
    t_df: float = 8.0,
) -> float:
    """Median operator norm of the pure-noise matrix Y diag(T)^(1/2) / sqrt(n).

    The limiting noise level has no closed form for a general variance
    profile, so it is exposed only as this empirical estimate.
    """
    rng = np.random.default_rng() if rng is None else rng
    spec = SpikedModelSpec(
        n=n, p=p, strengths=[0.0], noise_variances=noise_variances,
        noise_dist=noise_dist, t_df=t_df,
    )
    norms = [operator_norm(simulate_spiked(spec, rng)) for _ in range(reps)]
    return float(np.median(norms))


# --- JSON-config serialization (field names mirror the dataclasses) ---

def _reject_unknown(d: dict, allowed: set, what: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ValueError(f"unknown fields in {what} config: {sorted(unknown)}")


def factor_spec_to_config(spec: FactorModelSpec) -> dict:
    cfg = {
        "model": "factor",
        "n": spec.n,
        "p": spec.p,
        "r": spec.r,
        "loadings": np.asarray(spec.loadings).tolist(),
        "factor_dist": spec.factor_dist,
        "noise_dist": spec.noise_dist,
        "t_df": spec.t_df,
    }
    if spec.factor_cov is not None:
        cfg["factor_cov"] = np.asarray(spec.factor_cov).tolist()
    if spec.idio_var is not None:
        cfg["idio_var"] = np.asarray(spec.idio_var).tolist()
    return cfg


def factor_spec_from_config(cfg: dict) -> FactorModelSpec:
    _reject_unknown(cfg, {"model", "n", "p", "r", "loadings", "factor_cov", "idio_var",
                          "factor_dist", "noise_dist", "t_df"}, "factor model")
    return FactorModelSpec(
        n=int(cfg["n"]),
        p=int(cfg["p"]),
        r=int(cfg["r"]),
        loadings=np.asarray(cfg["loadings"], dtype=float),
        factor_cov=None if cfg.get("factor_cov") is None else np.asarray(cfg["factor_cov"], dtype=float),
        idio_var=None if cfg.get("idio_var") is None else np.asarray(cfg["idio_var"], dtype=float),
        factor_dist=cfg.get("factor_dist", "gaussian"),
        noise_dist=cfg.get("noise_dist", "gaussian"),
        t_df=float(cfg.get("t_df", 8.0)),
    )


def spiked_spec_to_config(spec: SpikedModelSpec) -> dict:
    cfg = {
        "model": "spiked",
        "n": spec.n,
        "p": spec.p,
        "strengths": np.asarray(spec.strengths).tolist(),
        "noise_dist": spec.noise_dist,
        "t_df": spec.t_df,
    }
    if spec.u is not None:
        cfg["u"] = np.asarray(spec.u).tolist()
    if spec.v is not None:
        cfg["v"] = np.asarray(spec.v).tolist()
    if spec.noise_variances is not None:
        cfg["noise_variances"] = np.asarray(spec.noise_variances).tolist()
    return cfg


def spiked_spec_from_config(cfg: dict) -> SpikedModelSpec:
    _reject_unknown(cfg, {"model", "n", "p", "strengths", "u", "v", "noise_variances",
                          "noise_dist", "t_df"}, "spiked model")
    return SpikedModelSpec(
        n=int(cfg["n"]),
        p=int(cfg["p"]),
        strengths=np.asarray(cfg["strengths"], dtype=float),
        u=None if cfg.get("u") is None else np.asarray(cfg["u"], dtype=float),
        v=None if cfg.get("v") is None else np.asarray(cfg["v"], dtype=float),
        noise_variances=None if cfg.get("noise_variances") is None
        else np.asarray(cfg["noise_variances"], dtype=float),
        noise_dist=cfg.get("noise_dist", "gaussian"),
        t_df=float(cfg.get("t_df", 8.0)),
    )
