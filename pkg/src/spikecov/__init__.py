"""Spike-count estimation for high-dimensional sample covariance spectra."""

from .diagnostics import (
    EnvelopeBundle,
    SupportComparison,
    esd_histogram,
    psi_envelope,
    support_comparison,
)
from .estimate import (
    SpikeEstimate,
    StepRecord,
    empirical_moments,
    estimate_psd_params,
    estimate_spikes_cm,
    estimate_spikes_kn,
    estimate_spikes_py,
    tw_quantile,
)
from .estimators import SpikeRankSelector
from .ingest import ExpressionMatrix, load_matrix, transform_and_spectrum
from .psd import Discrete, PointMass, TruncatedGamma, psd_from_json, solve_gamma_from_moments
from .rmt import (
    PsiCurve,
    SupportIntervals,
    companion_stieltjes,
    enumerate_partitions,
    invert_companion,
    lsd_moment,
    lsd_support,
    mp_density,
    psi,
    psi_derivative,
)
from .simulate import (
    EigenSpectrum,
    SpikedModelSpec,
    ThresholdEstimate,
    generate_spiked_data,
    largest_noise_eigenvalue,
    sample_cov_spectrum,
    threshold,
)

__version__ = "0.1.0"
