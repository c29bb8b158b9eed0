"""Gravity-induced entanglement of two optomechanical mirrors under squeezed
light and causal Wiener filtering: steady-state spectra, filters, entanglement
degree, finite-time errors, SNR forecasts and a Langevin Monte Carlo oracle."""
from .entanglement import (ConditionResult, EntanglementReport, calibrate_epsilon, commutator_expectation,
                           condition_no_filter, condition_with_filter, conditional_correlators,
                           correlator_rationals, e_fil, filtered_condition_validity, mode_commutator)
from .errors import (ConfigError, DomainError, GIEError, GridError, NoSolutionError, QuadratureError,
                     ResolutionError, UnsupportedError)
from .feedback import FeedbackBounds, FeedbackParams, fb_bounds, fb_noise_condition, fb_sqq, fb_transfer
from .finitetime import (FiniteTimeReport, SNRTable, WindowedGridPoint, e_d, error_budget, integrand_poles,
                         max_snr, snr_contour, time_to_snr, windowed_moments)
from .params import (ExperimentConfig, ModeParams, SqueezeFactors, config_from_dict, derive_mode_params,
                     epsilon_to_separation, load_config, mode_pair, separation_to_epsilon, squeeze_factors)
from .spectra import SpectralDensities, position_variance, s_qq, spectral_densities, susceptibility
from .wiener import FilterResponse, causality_check, filter_poles, impulse_response, wiener_filters

__version__ = "0.1.0"

__all__ = [
    "ConditionResult", "ConfigError", "DomainError", "EntanglementReport", "ExperimentConfig",
    "FeedbackBounds", "FeedbackParams", "FilterResponse", "FiniteTimeReport", "GIEError", "GridError",
    "ModeParams", "NoSolutionError", "QuadratureError", "ResolutionError", "SNRTable", "SpectralDensities",
    "SqueezeFactors", "UnsupportedError", "WindowedGridPoint", "calibrate_epsilon", "causality_check",
    "commutator_expectation", "condition_no_filter", "condition_with_filter", "conditional_correlators",
    "config_from_dict", "correlator_rationals", "derive_mode_params", "e_d", "e_fil", "epsilon_to_separation",
    "error_budget", "fb_bounds", "fb_noise_condition", "fb_sqq", "fb_transfer", "filter_poles",
    "filtered_condition_validity", "impulse_response", "integrand_poles", "load_config", "max_snr",
    "mode_commutator", "mode_pair", "position_variance", "s_qq", "separation_to_epsilon", "snr_contour",
    "spectral_densities", "squeeze_factors", "susceptibility", "time_to_snr", "wiener_filters",
    "windowed_moments",
]
