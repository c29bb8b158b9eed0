"""Langevin Monte Carlo oracle for the analytic pipeline."""
from .estimate import (FiniteTimeEstimate, PSDAccumulator, empirical_finite_time, filtered_residual,
                       moments_from_quadratures, psd, residual_pair, window_quadratures)
from .feedback_sim import feedback_system, simulate_feedback, van_loan
from .filters import DiscreteFilter, discrete_wiener
from .noise import NoiseDraw, draw_noise, optical_covariance, sqrtm_2x2, stream_rng
from .simulate import (SimConfig, TrajectorySet, dump_trajectories, integrate, load_dump, propagator,
                       simulate, simulate_one)
from .validate import Check, OracleValidation, ValidationPlan, run_validation, stationary_variance

__all__ = [
    "Check", "DiscreteFilter", "FiniteTimeEstimate", "NoiseDraw", "OracleValidation", "PSDAccumulator",
    "SimConfig", "TrajectorySet", "ValidationPlan", "discrete_wiener", "draw_noise", "dump_trajectories",
    "empirical_finite_time", "feedback_system", "filtered_residual", "integrate", "load_dump",
    "moments_from_quadratures", "optical_covariance", "propagator", "psd", "residual_pair", "run_validation",
    "simulate", "simulate_feedback", "simulate_one", "sqrtm_2x2", "stationary_variance", "stream_rng",
    "van_loan", "window_quadratures",
]
