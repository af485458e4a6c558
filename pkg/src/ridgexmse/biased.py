"""Closed-form biased estimator theta_ml + b_N(theta_ml) / N."""
from __future__ import annotations

import time

import numpy as np

from . import kernels
from .errors import PoleError
from .linear import EstimateRecord, Method, SvdCache, ml_theta
from .prior import WeightingParams, grad_log_pi


def bias_term(theta_ml, cache: SvdCache, sigma2: float, params: WeightingParams, N: int | None = None) -> np.ndarray:
    """b_N = sigma^2 N (Phi^T Phi)^{-1} grad log pi(theta_ml)."""
    N = cache.N if N is None else N
    return sigma2 * N * cache.gram_inv_apply(grad_log_pi(theta_ml, params))


def biased_theta(cache: SvdCache, sigma2: float, params: WeightingParams) -> np.ndarray:
    """theta_ml + b_N / N evaluated in the right-singular basis, where V^T theta_ml = c / s."""
    theta, ok = kernels.biased_theta(cache.c, cache.s, cache.V, float(sigma2), float(params.n),
                                     float(params.c1), float(params.c2), float(params.delta))
    if not ok:
        raise PoleError(f"weighting function vanishes at theta_ml (C1={params.c1}, C2={params.c2})")
    return theta


def biased_estimate(cache: SvdCache, sigma2: float, params: WeightingParams) -> EstimateRecord:
    t0 = time.perf_counter()
    theta = biased_theta(cache, sigma2, params)
    return EstimateRecord(theta, Method.BIASED_EB, elapsed=time.perf_counter() - t0)


def biased_estimate_reference(cache: SvdCache, sigma2: float, params: WeightingParams) -> np.ndarray:
    """Direct composition theta_ml + bias_term / N, used to cross-check :func:`biased_estimate`."""
    theta_ml = ml_theta(cache)
    return theta_ml + bias_term(theta_ml, cache, sigma2, params) / cache.N
