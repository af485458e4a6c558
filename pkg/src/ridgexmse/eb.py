"""Empirical-Bayes marginal-likelihood tuning of the ridge scale eta."""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import ConfigError
from .linear import EstimateRecord, Method, SvdCache, regularized_theta


class EbBoundaryWarning(UserWarning):
    """The EB minimiser sits on the edge of the search range."""


@dataclass(frozen=True)
class EbTunerConfig:
    grid_points: int = 81
    log10_eta_min: float = -8.0  # relative to sigma^2
    log10_eta_max: float = 8.0
    refine_tol: float = 1e-10
    max_refine_iters: int = 200

    def __post_init__(self):
        if self.grid_points < 3:
            raise ConfigError("grid_points must be >= 3")
        if not self.log10_eta_min < self.log10_eta_max:
            raise ConfigError("log10_eta_min must be < log10_eta_max")
        if self.refine_tol <= 0 or self.max_refine_iters < 1:
            raise ConfigError("refine_tol and max_refine_iters must be positive")

    @classmethod
    def from_dict(cls, d: dict | None) -> "EbTunerConfig":
        return cls(**(d or {}))

    def to_dict(self) -> dict:
        return asdict(self)


class EbResult(NamedTuple):
    eta_hat: float
    cost: float
    at_boundary: bool
    gradient: float


def _residual_const(cache: SvdCache, sigma2: float) -> float:
    # part of the cost outside the column space of Phi
    resid = max(cache.y_norm2 - float(cache.c @ cache.c), 0.0)
    return resid / sigma2 + (cache.N - cache.n) * math.log(sigma2)


def eb_cost(cache: SvdCache, eta: float, sigma2: float) -> float:
    """Y^T Q^{-1} Y + log det Q with Q = eta Phi Phi^T + sigma^2 I_N, in O(n)."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    return float(kernels.eb_cost_kernel(float(eta), cache.s**2, cache.c**2, float(sigma2),
                                        _residual_const(cache, sigma2)))


def eb_cost_derivative(cache: SvdCache, eta: float, sigma2: float) -> float:
    s2 = cache.s**2
    q = eta * s2 + sigma2
    return float(np.sum(s2 * (q - cache.c**2) / q**2))


def eb_optimize(cache: SvdCache, sigma2: float, config: EbTunerConfig | None = None,
                warn: bool = True) -> EbResult:
    """Minimise the EB cost over eta = sigma^2 * 10**x, x in [log10_eta_min, log10_eta_max]."""
    config = config or EbTunerConfig()
    x, f, edge = kernels.eb_minimize(
        cache.s**2, cache.c**2, float(sigma2), _residual_const(cache, sigma2),
        float(config.log10_eta_min), float(config.log10_eta_max), int(config.grid_points),
        float(config.refine_tol), int(config.max_refine_iters))
    eta = sigma2 * 10.0**x
    if edge and warn:
        warnings.warn(f"EB minimiser on the search-range edge (eta = {eta:.3e}); consider widening it",
                      EbBoundaryWarning, stacklevel=2)
    return EbResult(float(eta), float(f), bool(edge), eb_cost_derivative(cache, eta, sigma2))


def eb_regularized_estimate(cache: SvdCache, sigma2: float, config: EbTunerConfig | None = None,
                            warn: bool = False) -> EstimateRecord:
    t0 = time.perf_counter()
    res = eb_optimize(cache, sigma2, config, warn=warn)
    theta = regularized_theta(cache, res.eta_hat, sigma2)
    elapsed = time.perf_counter() - t0
    return EstimateRecord(theta, Method.EB_REG, eta_hat=res.eta_hat, elapsed=elapsed,
                          info={"at_boundary": res.at_boundary, "eb_gradient": res.gradient})
