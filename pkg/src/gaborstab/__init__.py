"""Numerical toolkit for stability of phase retrieval from Gabor magnitudes.

Submodules:

* ``tfcore``: signals, windows, grids and the short-time Fourier transform.
* ``weights``: the smoothing weight gamma, control functions, admissibility.
* ``norms``: chi-weighted norms, the metric d and phase-aligned distances.
* ``poincare``: weighted Poincare and Cheeger constants on grids.
* ``stabilitylab``: end-to-end stability experiments and identity checks.
* ``cli``: the ``gaborstab`` command line tool.
"""

__version__ = "0.1.0"

from .norms import ChiWeight, NormKind, metric_d, mixed_norm, phase_aligned_distance
from .poincare import (
    EigenSolverError,
    WeightPair,
    estimate_cheeger,
    estimate_poincare,
    weight_from_spectrogram,
)
from .stabilitylab import ExperimentConfig, StabilityReport, run_stability_experiment
from .tfcore import Grid2D, Signal1D, WindowSpec, make_window, spectrogram, stft
from .weights import GammaWeight, NotAdmissibleError, check_admissibility

__all__ = [
    "ChiWeight",
    "EigenSolverError",
    "ExperimentConfig",
    "GammaWeight",
    "Grid2D",
    "NormKind",
    "NotAdmissibleError",
    "Signal1D",
    "StabilityReport",
    "WeightPair",
    "WindowSpec",
    "check_admissibility",
    "estimate_cheeger",
    "estimate_poincare",
    "make_window",
    "metric_d",
    "mixed_norm",
    "phase_aligned_distance",
    "run_stability_experiment",
    "spectrogram",
    "stft",
    "weight_from_spectrogram",
]
