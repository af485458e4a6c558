"""Hyper-parameter-free Bayes and biased estimators for ridge / FIR regression.

Estimators (ML, EB-tuned ridge, sampled generalised Bayes, closed-form biased),
excess-MSE calculators, and a seeded Monte Carlo benchmark.
"""
from .bench import McConfig, MetricsReport, average_over_combos, export_results, fit_metric, load_results, run_mc_study
from .biased import bias_term, biased_estimate, biased_theta
from .data import (InputSignal, RegressionProblem, TrueSystem, build_regression_matrix, generate_noisy_outputs,
                   generate_scaled_input, generate_true_system, rng_stream)
from .eb import EbTunerConfig, eb_cost, eb_optimize, eb_regularized_estimate
from .errors import (ConfigError, DegenerateSignalError, DegenerateWeightsError, PoleError, RankDeficiencyError,
                     UndefinedFitError)
from .kernels import BACKEND
from .linear import (EstimateRecord, Method, SvdCache, build_svd_cache, ml_estimate, ml_mse_theoretical,
                     regularized_estimate)
from .prior import WeightingParams, euler_residual, grad_log_pi, hessian_log_pi, log_pi
from .sampler import SamplerConfig, bayes_estimate, sample_posterior_draws
from .xmse import XmseBreakdown, xmse_bayes_numeric, xmse_biased_numeric, xmse_eb_theoretical, xmse_empirical

__version__ = "0.1.0"
