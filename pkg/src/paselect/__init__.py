"""paselect: parallel analysis for selecting the number of factors/components.

Submodules
----------
permute    per-column permutation arrays and their application
spectra    singular values and operator norms
selection  the parallel-analysis selection procedure
simulate   factor-model and spiked-model generators
oracles    closed-form thresholds, bounds, and heuristic scales
moments    Monte Carlo / exhaustive verification of permuted-signal moments
harness    sweep runner, study presets, CSV/JSON/SVG reporting, CLI backend
"""

__version__ = "0.1.0"

from .oracles import a_nk, bbp_threshold_identity_noise, c_k, permuted_norm_heuristic, shadowing_ratio
from .permute import PermutationArray, identity_array, sample_uniform
from .selection import PAConfig, SelectionResult, pa_select
from .simulate import (
    FactorModelSpec,
    LoadingSpec,
    SpikedModelSpec,
    gen_loadings,
    localization,
    simulate_factor_model,
    simulate_spiked,
)
from .spectra import SingularSpectrum, operator_norm, singular_values

__all__ = [
    "__version__",
    "PermutationArray", "identity_array", "sample_uniform",
    "SingularSpectrum", "singular_values", "operator_norm",
    "PAConfig", "SelectionResult", "pa_select",
    "LoadingSpec", "FactorModelSpec", "SpikedModelSpec",
    "gen_loadings", "simulate_factor_model", "simulate_spiked", "localization",
    "c_k", "a_nk", "bbp_threshold_identity_noise", "permuted_norm_heuristic",
    "shadowing_ratio",
]
