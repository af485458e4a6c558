"""Radial weighting family pi(theta) = r^(2-n) (C1 r + C2 / r)^2 and its log-derivatives.

Everything is computed through log(pi) so that large n (r^(2-n)) never
under- or overflows.  The radius is guarded as r = max(||theta||, delta).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, PoleError
from .kernels import POLE_RTOL


@dataclass(frozen=True)
class WeightingParams:
    c1: float
    c2: float
    n: int
    delta: float = 1e-8

    def __post_init__(self):
        if self.c1 == 0 and self.c2 == 0:
            raise ConfigError("(C1, C2) must not both be zero")
        if not self.delta > 0:
            raise ConfigError("delta must be positive")
        if self.n < 1:
            raise ConfigError("n must be >= 1")

    def scaled(self, k: float) -> "WeightingParams":
        return WeightingParams(k * self.c1, k * self.c2, self.n, self.delta)

    @property
    def pole_radius(self) -> float | None:
        """Radius where C1 r + C2 / r = 0, if any."""
        if self.c1 * self.c2 < 0:
            return math.sqrt(-self.c2 / self.c1)
        return None


def _inner(r: float, p: WeightingParams) -> float:
    inner = p.c1 * r + p.c2 / r
    r0 = p.pole_radius
    if inner == 0.0 or (r0 is not None and abs(r - r0) <= POLE_RTOL * r):
        raise PoleError(f"weighting function vanishes at r = {r!r} (C1={p.c1}, C2={p.c2})")
    return inner


def guarded_radius(theta, p: WeightingParams) -> float:
    return max(float(np.linalg.norm(theta)), p.delta)


def radial_factor(r: float, p: WeightingParams) -> float:
    """g(r) = (2 - n) + 2 (C1 r - C2/r) / (C1 r + C2/r), so grad log pi = g(r) theta / r^2."""
    return (2.0 - p.n) + 2.0 * (p.c1 * r - p.c2 / r) / _inner(r, p)


def radial_factor_derivative(r: float, p: WeightingParams) -> float:
    inner = _inner(r, p)
    return 8.0 * p.c1 * p.c2 / (r * inner * inner)


def log_pi(theta, p: WeightingParams) -> float:
    theta = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(theta)):
        raise ValueError("theta must be finite")
    r = guarded_radius(theta, p)
    return (2.0 - p.n) * math.log(r) + 2.0 * math.log(abs(_inner(r, p)))


def grad_log_pi(theta, p: WeightingParams) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    r = guarded_radius(theta, p)
    return radial_factor(r, p) * theta / r**2


def hessian_log_pi(theta, p: WeightingParams) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    r = guarded_radius(theta, p)
    g = radial_factor(r, p)
    dg = radial_factor_derivative(r, p)
    outer = np.outer(theta, theta) / r**2
    H = (dg / r - 2.0 * g / r**2) * outer + (g / r**2) * np.eye(theta.size)
    return H


def euler_terms(r: float, p: WeightingParams) -> tuple[float, float, float]:
    """w = sqrt(pi) and its first two radial derivatives.

    Locally w = sign * (C1 r^((4-n)/2) + C2 r^(-n/2)), the sign fixed by C1 r + C2/r.
    """
    sign = math.copysign(1.0, _inner(r, p))
    e1, e2 = (4.0 - p.n) / 2.0, -p.n / 2.0
    w = p.c1 * r**e1 + p.c2 * r**e2
    dw = p.c1 * e1 * r**(e1 - 1) + p.c2 * e2 * r**(e2 - 1)
    d2w = p.c1 * e1 * (e1 - 1) * r**(e1 - 2) + p.c2 * e2 * (e2 - 1) * r**(e2 - 2)
    return sign * w, sign * dw, sign * d2w


def euler_residual(r: float, p: WeightingParams) -> tuple[float, float]:
    """Residual of r^2 w'' + (n-1) r w' + (n^2 - 4n)/4 w = 0 and the matching magnitude scale."""
    if not r > p.delta:
        raise ValueError("radius must exceed the guard delta")
    w, dw, d2w = euler_terms(r, p)
    n = p.n
    a, b = n - 1.0, (n * n - 4.0 * n) / 4.0
    res = r * r * d2w + a * r * dw + b * w
    scale = abs(w) + r * abs(dw) + r * r * abs(d2w)
    return res, scale


def euler_exponent(n: int) -> float:
    """mu = sqrt(|(1-a)^2 - 4b|)/2 with a = n - 1, b = (n^2 - 4n)/4."""
    a, b = n - 1.0, (n * n - 4.0 * n) / 4.0
    return math.sqrt(abs((1.0 - a) ** 2 - 4.0 * b)) / 2.0
