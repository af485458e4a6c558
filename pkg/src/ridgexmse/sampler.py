"""Direct-sampling approximation of the generalised Bayes estimator."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, DegenerateWeightsError, PoleError
from .linear import EstimateRecord, Method, SvdCache, ml_theta
from .prior import WeightingParams, log_pi

DEFAULT_MS = {1: 200, 5: 500, 80: 5000}


def default_m_s(n: int) -> int:
    if n in DEFAULT_MS:
        return DEFAULT_MS[n]
    # nearest tabulated dimension
    return DEFAULT_MS[min(DEFAULT_MS, key=lambda k: abs(k - n))]


@dataclass(frozen=True)
class SamplerConfig:
    m_s: int
    deterministic_reduction: bool = True

    def __post_init__(self):
        if self.m_s < 2:
            raise ConfigError("m_s must be >= 2")


def _standard_draws(rng: np.random.Generator, m_s: int, n: int) -> np.ndarray:
    return rng.standard_normal((m_s, n))


def sample_posterior_draws(cache: SvdCache, sigma2: float, m_s: int, rng: np.random.Generator) -> np.ndarray:
    """``m_s`` rows theta_k ~ N(theta_ml, sigma^2 (Phi^T Phi)^{-1})."""
    Z = _standard_draws(rng, m_s, cache.n)
    return ml_theta(cache) + (np.sqrt(sigma2) * Z / cache.s) @ cache.V.T


def bayes_estimate(cache: SvdCache, sigma2: float, params: WeightingParams, sampler: SamplerConfig | int,
                   rng: np.random.Generator) -> EstimateRecord:
    """Self-normalised pi-weighted mean of the posterior draws.

    The weighted mean is accumulated in the right-singular basis, where each
    draw is a + (sigma / s) * z_k, and rotated back once.  Draws whose weight
    hits a pole of pi get zero weight and are counted in ``info["n_pole"]``.
    """
    m_s = sampler.m_s if isinstance(sampler, SamplerConfig) else int(sampler)
    t0 = time.perf_counter()
    Z = _standard_draws(rng, m_s, cache.n)
    a = cache.c / cache.s
    scale = np.sqrt(sigma2) / cache.s
    zbar, sum_w, sum_w2, n_pole = kernels.weighted_draw_mean(
        a, scale, Z, float(params.n), float(params.c1), float(params.c2), float(params.delta))
    if not sum_w > 0.0:
        raise DegenerateWeightsError("all posterior draws have zero weight")
    theta = cache.V @ (a + scale * zbar)
    elapsed = time.perf_counter() - t0
    return EstimateRecord(theta, Method.BAYES_EB, elapsed=elapsed,
                          info={"n_pole": int(n_pole), "ess": float(sum_w * sum_w / sum_w2)})


def normalized_weights(draws: np.ndarray, params: WeightingParams) -> np.ndarray:
    """Max-shifted, self-normalised weights pi(theta_k) / sum_j pi(theta_j) for explicit draws."""
    logw = np.empty(len(draws))
    for k, th in enumerate(draws):
        try:
            logw[k] = log_pi(th, params)
        except PoleError:
            logw[k] = -np.inf
    w = np.exp(logw - logw.max())
    return w / w.sum()
