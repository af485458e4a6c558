"""ML and fixed-eta ridge estimators on a shared thin SVD of the regression matrix."""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import RankDeficiencyError

RANK_RTOL = 1e-12


class Method(str, enum.Enum):
    ML = "ML"
    EB_REG = "EB_REG"
    BAYES_EB = "BAYES_EB"
    BIASED_EB = "BIASED_EB"


@dataclass(frozen=True)
class PhiFactor:
    """Thin SVD  Phi = U diag(s) V^T, computed once per regression matrix."""

    U: np.ndarray
    s: np.ndarray
    V: np.ndarray

    @property
    def N(self) -> int:
        return self.U.shape[0]

    @property
    def n(self) -> int:
        return self.s.size

    def cache(self, Y) -> "SvdCache":
        Y = np.asarray(Y, dtype=float)
        return SvdCache(self.s, self.V, self.U.T @ Y, float(Y @ Y), self.N)


def factorize(phi) -> PhiFactor:
    phi = np.asarray(phi, dtype=float)
    U, s, Vt = np.linalg.svd(phi, full_matrices=False)
    if s[-1] < RANK_RTOL * s[0] or s[0] == 0.0:
        raise RankDeficiencyError(
            f"regression matrix is rank deficient (s_min/s_max = {s[-1] / s[0] if s[0] else 0.0:.3e})")
    # C-contiguous V so compiled kernels see a single array layout
    return PhiFactor(U, s, np.ascontiguousarray(Vt.T))


@dataclass(frozen=True)
class SvdCache:
    """Spectral summary of (Phi, Y) consumed by every estimator.

    ``c`` holds U^T Y and ``y_norm2`` is ||Y||^2; ``N`` is the sample size.
    """

    s: np.ndarray
    V: np.ndarray
    c: np.ndarray
    y_norm2: float
    N: int

    @property
    def n(self) -> int:
        return self.s.size

    def gram_inv_apply(self, x) -> np.ndarray:
        """(Phi^T Phi)^{-1} x."""
        return self.V @ ((self.V.T @ x) / self.s**2)

    def gram_inv(self) -> np.ndarray:
        return (self.V / self.s**2) @ self.V.T

    def gram(self) -> np.ndarray:
        return (self.V * self.s**2) @ self.V.T


def build_svd_cache(problem) -> SvdCache:
    """Factorise ``problem.phi`` and project ``problem.Y``."""
    return factorize(problem.phi).cache(problem.Y)


@dataclass
class EstimateRecord:
    theta_hat: np.ndarray
    method: Method
    eta_hat: float | None = None
    elapsed: float = 0.0
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.method = Method(self.method)
        if (self.eta_hat is not None) != (self.method is Method.EB_REG):
            raise ValueError("eta_hat must be given exactly for EB_REG estimates")

    def to_json_row(self) -> dict:
        return {
            "method": self.method.value,
            "theta_hat": [float(x) for x in self.theta_hat],
            "eta_hat": self.eta_hat,
            "elapsed": self.elapsed,
            **self.info,
        }


def ml_theta(cache: SvdCache) -> np.ndarray:
    return cache.V @ (cache.c / cache.s)


def ml_estimate(cache: SvdCache) -> EstimateRecord:
    t0 = time.perf_counter()
    theta = ml_theta(cache)
    return EstimateRecord(theta, Method.ML, elapsed=time.perf_counter() - t0)


def ml_mse_theoretical(cache: SvdCache, sigma2: float) -> float:
    """sigma^2 Tr[(Phi^T Phi)^{-1}]."""
    return float(sigma2 * np.sum(1.0 / cache.s**2))


def regularized_theta(cache: SvdCache, eta: float, sigma2: float) -> np.ndarray:
    s = cache.s
    return cache.V @ (s * cache.c / (s**2 + sigma2 / eta))


def regularized_estimate(cache: SvdCache, eta: float, sigma2: float) -> EstimateRecord:
    """[Phi^T Phi + (sigma^2/eta) I]^{-1} Phi^T Y, tagged as an EB_REG record with the given eta."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    t0 = time.perf_counter()
    theta = regularized_theta(cache, eta, sigma2)
    return EstimateRecord(theta, Method.EB_REG, eta_hat=float(eta), elapsed=time.perf_counter() - t0)
