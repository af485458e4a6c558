"""Test systems, SNR-scaled inputs, FIR regression matrices and noisy outputs."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.linalg import toeplitz

from .errors import ConfigError, DegenerateSignalError

# Stream tags mixed into the seed sequence so that every (collection, rep)
# pair owns independent, reproducible generators.
STREAM_SYSTEM = 0
STREAM_INPUT = 1
STREAM_NOISE = 2
STREAM_SAMPLER = 3

DELAY_CONVENTIONS = ("a", "b")


def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by ``seed`` and an integer path."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class InputSignal:
    """Known input u(1..N); u(t) = 0 for t <= 0 is implied."""

    samples: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.samples, dtype=float)
        if u.ndim != 1 or u.size < 1:
            raise ConfigError("input must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(u)):
            raise ConfigError("input contains non-finite samples")
        object.__setattr__(self, "samples", u)

    @property
    def N(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class TrueSystem:
    theta0: np.ndarray
    norm_target: float = 1.0

    @property
    def n(self) -> int:
        return self.theta0.size


def build_regression_matrix(u, n: int, delay_convention: str = "a") -> np.ndarray:
    """Lower-triangular Toeplitz FIR regression matrix.

    Convention ``"a"``: entry (t, k) = u(t - k + 1), so column 1 is u(1..N).
    Convention ``"b"``: one extra step of delay, column 1 is u(0..N-1) with u(0) = 0.
    """
    u = u.samples if isinstance(u, InputSignal) else np.asarray(u, dtype=float)
    N = u.size
    if n < 1 or N < n:
        raise ConfigError(f"need 1 <= n <= N, got n={n}, N={N}")
    if delay_convention == "a":
        col = u
    elif delay_convention == "b":
        col = np.concatenate(([0.0], u[:-1]))
    else:
        raise ConfigError(f"unknown delay convention {delay_convention!r}")
    return toeplitz(col, np.zeros(n))


@dataclass
class RegressionProblem:
    input: InputSignal
    n: int
    Y: np.ndarray
    sigma2: float
    delay_convention: str = "a"

    def __post_init__(self):
        self.Y = np.asarray(self.Y, dtype=float)
        if self.Y.shape != (self.input.N,):
            raise ConfigError("Y must have one entry per input sample")
        if self.sigma2 <= 0:
            raise ConfigError("sigma2 must be positive")

    @property
    def N(self) -> int:
        return self.input.N

    @cached_property
    def phi(self) -> np.ndarray:
        return build_regression_matrix(self.input, self.n, self.delay_convention)


def scale_to_norm(raw, norm_target: float = 1.0) -> TrueSystem:
    raw = np.asarray(raw, dtype=float)
    return TrueSystem(raw * (norm_target / np.linalg.norm(raw)), norm_target)


def generate_true_system(n: int, rng: np.random.Generator) -> TrueSystem:
    """theta0 ~ N(0, I_n) rescaled to unit Euclidean norm."""
    return scale_to_norm(rng.standard_normal(n))


def sample_snr(z, sigma2: float) -> float:
    return float(np.var(z, ddof=1)) / sigma2


def input_scale(z, snr: float, sigma2: float) -> float:
    """Multiplier m_u making the sample SNR of ``m_u * z`` equal ``snr``."""
    var_z = float(np.var(z, ddof=1))
    if not var_z > 0.0:
        raise DegenerateSignalError("noise-free output has zero sample variance")
    return float(np.sqrt(snr * sigma2 / var_z))


def generate_scaled_input(N: int, n: int, system: TrueSystem, snr: float, sigma2: float,
                          rng: np.random.Generator, delay_convention: str = "a") -> InputSignal:
    if N < n:
        raise ConfigError(f"need N >= n, got N={N}, n={n}")
    u_raw = rng.standard_normal(N)
    z = build_regression_matrix(u_raw, n, delay_convention) @ system.theta0
    return InputSignal(input_scale(z, snr, sigma2) * u_raw)


def noisy_output(z, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return z + np.sqrt(sigma2) * rng.standard_normal(z.size)


def generate_noisy_outputs(z, sigma2: float, n_mc: int, seed: int, collection: int = 0) -> list[np.ndarray]:
    """``n_mc`` realisations Y = z + E, each drawn from its own (seed, collection, rep) stream."""
    if n_mc < 1:
        raise ConfigError("n_mc must be >= 1")
    return [noisy_output(z, sigma2, rng_stream(seed, collection, STREAM_NOISE, rep)) for rep in range(n_mc)]


@dataclass
class Collection:
    """One test system with its input, regression matrix and noise-free output."""

    index: int
    system: TrueSystem
    input: InputSignal
    phi: np.ndarray
    z: np.ndarray = field(repr=False)

    def output(self, seed: int, rep: int, sigma2: float) -> np.ndarray:
        return noisy_output(self.z, sigma2, rng_stream(seed, self.index, STREAM_NOISE, rep))


def generate_collection(seed: int, index: int, n: int, N: int, snr: float, sigma2: float,
                        delay_convention: str = "a") -> Collection:
    system = generate_true_system(n, rng_stream(seed, index, STREAM_SYSTEM))
    u = generate_scaled_input(N, n, system, snr, sigma2, rng_stream(seed, index, STREAM_INPUT), delay_convention)
    phi = build_regression_matrix(u, n, delay_convention)
    return Collection(index, system, u, phi, phi @ system.theta0)


def export_dataset_csv(path, u, y) -> None:
    """Write one row per sample t: t, u(t), y(t)."""
    u = u.samples if isinstance(u, InputSignal) else np.asarray(u)
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "u", "y"])
        for t, (ut, yt) in enumerate(zip(u, y), start=1):
            w.writerow([t, repr(float(ut)), repr(float(yt))])
