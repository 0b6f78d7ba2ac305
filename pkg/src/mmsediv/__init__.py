"""Outage and diversity analysis of MIMO MMSE receivers.

A numpy/scipy library for computing exact per-stream MMSE SINRs in flat
and cyclic-prefix frequency-selective MIMO channels, estimating outage
probabilities by deterministic parallel Monte Carlo, fitting high-SNR
diversity exponents from the resulting curves, and checking them against
closed-form rate-regime predictions and Wishart eigenvalue tail
asymptotics.  A thin command-line front-end lives in `mmsediv.cli`.
"""

__version__ = "0.1.0"

from .diversity import (FitWindow, OutageCurve, RateRegime, SlopeFit,
                        SystemConfig, estimate_outage, fit_diversity_slope,
                        resolve_rate_regime, resolve_rate_regime_flat,
                        resolve_rate_regime_selective)
from .exceptions import (ApplicabilityError, BoundaryRateError,
                         ConfigurationError, InsufficientDataError,
                         NumericalError, NumericalHealthWarning)
from .mmse import (block_circulant_operator, capacity, flat_capacity_batch,
                   flat_sinrs, noise_scaling, selective_capacity_batch,
                   selective_sinrs, selective_sinrs_oracle,
                   spd_inverse_diagonal, transfer_function)
from .montecarlo import (BinomialCurve, CurvePoint, TrialPolicy,
                         estimate_binomial_curve, wilson_interval)
from .randmat import (HaarAngles, derive_stream, givens_rotation,
                      sample_complex_gaussian, sample_haar_angles,
                      sample_haar_qr_oracle, sample_haar_recursive,
                      sample_sin_power_angle, unitarity_residual,
                      unitary_from_angles)
from .wishart import (TailCurve, WishartSpectrum, log_density_unnormalized,
                      sample_ordered_spectrum, sample_spectra,
                      smallest_eigs_probability, tail_sum_probability)

__all__ = [
    "ApplicabilityError",
    "BinomialCurve",
    "BoundaryRateError",
    "ConfigurationError",
    "CurvePoint",
    "FitWindow",
    "HaarAngles",
    "InsufficientDataError",
    "NumericalError",
    "NumericalHealthWarning",
    "OutageCurve",
    "RateRegime",
    "SlopeFit",
    "SystemConfig",
    "TailCurve",
    "TrialPolicy",
    "WishartSpectrum",
    "block_circulant_operator",
    "capacity",
    "derive_stream",
    "estimate_binomial_curve",
    "estimate_outage",
    "fit_diversity_slope",
    "flat_capacity_batch",
    "flat_sinrs",
    "givens_rotation",
    "log_density_unnormalized",
    "noise_scaling",
    "resolve_rate_regime",
    "resolve_rate_regime_flat",
    "resolve_rate_regime_selective",
    "sample_complex_gaussian",
    "sample_haar_angles",
    "sample_haar_qr_oracle",
    "sample_haar_recursive",
    "sample_ordered_spectrum",
    "sample_sin_power_angle",
    "sample_spectra",
    "selective_capacity_batch",
    "selective_sinrs",
    "selective_sinrs_oracle",
    "smallest_eigs_probability",
    "spd_inverse_diagonal",
    "tail_sum_probability",
    "transfer_function",
    "unitarity_residual",
    "unitary_from_angles",
    "wilson_interval",
]
