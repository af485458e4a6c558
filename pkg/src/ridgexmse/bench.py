"""Monte Carlo benchmark: seeded collections, paired noise reps, metrics and export."""
from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import kernels
from .biased import biased_theta
from .data import DELAY_CONVENTIONS, STREAM_SAMPLER, generate_collection, rng_stream
from .eb import EbTunerConfig, eb_optimize
from .errors import ConfigError, RidgeXmseError, StudyAbortedError, UndefinedFitError
from .linear import Method, factorize, ml_theta, regularized_theta
from .prior import WeightingParams
from .sampler import bayes_estimate, default_m_s

DEFAULT_COMBOS = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0))
FIT_DENOM_MIN = 1e-14


@dataclass
class McConfig:
    n: int
    N: int
    n_collections: int = 100
    n_mc: int = 200
    snr: float = 5.0
    sigma2: float = 1.0
    m_s: int | None = None
    c1_c2_list: list = field(default_factory=lambda: [list(c) for c in DEFAULT_COMBOS])
    seed: int = 0
    delta: float = 1e-8
    delay_convention: str = "a"
    estimators: list = field(default_factory=lambda: [m.value for m in Method])
    eb_tuner: EbTunerConfig = field(default_factory=EbTunerConfig)
    deterministic_reduction: bool = True
    threads: int = 1
    max_failure_rate: float = 0.01

    def __post_init__(self):
        if self.n < 1 or self.N < self.n:
            raise ConfigError(f"need 1 <= n <= N, got n={self.n}, N={self.N}")
        if self.n_collections < 1 or self.n_mc < 1 or self.threads < 1:
            raise ConfigError("n_collections, n_mc and threads must be positive")
        if self.snr <= 0 or self.sigma2 <= 0:
            raise ConfigError("snr and sigma2 must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.m_s is None:
            self.m_s = default_m_s(self.n)
        if self.m_s < 2:
            raise ConfigError("m_s must be >= 2")
        self.c1_c2_list = [[float(a), float(b)] for a, b in self.c1_c2_list]
        for a, b in self.c1_c2_list:
            if a == 0 and b == 0:
                raise ConfigError("(C1, C2) = (0, 0) is not allowed")
        if self.delay_convention not in DELAY_CONVENTIONS:
            raise ConfigError(f"delay_convention must be one of {DELAY_CONVENTIONS}")
        self.estimators = [Method(m).value for m in self.estimators]
        if isinstance(self.eb_tuner, dict):
            self.eb_tuner = EbTunerConfig.from_dict(self.eb_tuner)

    @classmethod
    def from_dict(cls, d: dict) -> "McConfig":
        d = dict(d)
        # nested blocks are accepted as an alternative spelling
        for key, sub in (("weighting", ("delta", "c1_c2_list")), ("sampler", ("m_s", "deterministic_reduction"))):
            block = d.pop(key, None) or {}
            for k in sub:
                if k in block:
                    d.setdefault(k, block[k])
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "McConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["eb_tuner"] = self.eb_tuner.to_dict()
        return d

    def combos(self) -> list[tuple[float, float]]:
        return [tuple(c) for c in self.c1_c2_list]


@dataclass
class MetricsReport:
    method: str
    c1: float | None
    c2: float | None
    sample_mse_mean: float
    fit_mean: float | None
    total_time_s: float
    boundary_flag_rate: float
    failures: int
    sample_err_mean: float
    n: int
    N: int

    @property
    def label(self) -> str:
        if self.c1 is None:
            return self.method
        return f"{self.method}({self.c1:g},{self.c2:g})"


def fit_metric(theta_hat, theta0) -> float:
    """100 (1 - ||theta_hat - theta0|| / ||theta0 - mean(theta0)||)."""
    theta_hat = np.asarray(theta_hat, dtype=float)
    theta0 = np.asarray(theta0, dtype=float)
    denom = float(np.linalg.norm(theta0 - theta0.mean()))
    if denom < FIT_DENOM_MIN:
        raise UndefinedFitError("FIT is undefined for a constant true system")
    return 100.0 * (1.0 - float(np.linalg.norm(theta_hat - theta0)) / denom)


def _slots(config: McConfig) -> list[tuple[Method, tuple[float, float] | None]]:
    slots = []
    for name in config.estimators:
        m = Method(name)
        if m in (Method.BAYES_EB, Method.BIASED_EB):
            slots.extend((m, c) for c in config.combos())
        else:
            slots.append((m, None))
    return slots


def _run_collection(config: McConfig, index: int, slots, clock) -> dict:
    col = generate_collection(config.seed, index, config.n, config.N, config.snr, config.sigma2,
                              config.delay_convention)
    factor = factorize(col.phi)
    theta0 = col.system.theta0
    fit_ok = float(np.linalg.norm(theta0 - theta0.mean())) >= FIT_DENOM_MIN
    params = {c: WeightingParams(c[0], c[1], config.n, config.delta) for m, c in slots if c is not None}
    k = len(slots)
    sq = np.full((config.n_mc, k), np.nan)
    err = np.full((config.n_mc, k), np.nan)
    elapsed = np.zeros(k)
    boundary = np.zeros(k)
    failures = np.zeros(k, dtype=int)
    sigma2 = config.sigma2

    for rep in range(config.n_mc):
        cache = factor.cache(col.output(config.seed, rep, sigma2))
        for j, (m, c) in enumerate(slots):
            t0 = clock()
            try:
                if m is Method.ML:
                    theta = ml_theta(cache)
                elif m is Method.EB_REG:
                    res = eb_optimize(cache, sigma2, config.eb_tuner, warn=False)
                    theta = regularized_theta(cache, res.eta_hat, sigma2)
                    boundary[j] += res.at_boundary
                elif m is Method.BIASED_EB:
                    theta = biased_theta(cache, sigma2, params[c])
                else:
                    # same sampler stream for every combo: common random numbers across (C1, C2)
                    rng = rng_stream(config.seed, index, STREAM_SAMPLER, rep)
                    theta = bayes_estimate(cache, sigma2, params[c], config.m_s, rng).theta_hat
            except RidgeXmseError:
                failures[j] += 1
                elapsed[j] += clock() - t0
                continue
            elapsed[j] += clock() - t0
            e = theta - theta0
            sq[rep, j] = e @ e
            err[rep, j] = math.sqrt(sq[rep, j])

    denom = float(np.linalg.norm(theta0 - theta0.mean())) if fit_ok else np.nan
    with np.errstate(invalid="ignore"):
        fit = 100.0 * (1.0 - err / denom)
        return {
            "mse": np.nanmean(sq, axis=0),
            "err": np.nanmean(err, axis=0),
            "fit": np.nanmean(fit, axis=0) if fit_ok else np.full(k, np.nan),
            "time": elapsed,
            "boundary": boundary / config.n_mc,
            "failures": failures,
        }


def run_mc_study(config: McConfig, progress=None) -> list[MetricsReport]:
    """Run every configured estimator on every (collection, rep) pair.

    With ``threads == 1`` times are wall-clock; otherwise per-thread CPU time
    is accumulated so that totals stay comparable across methods.
    """
    slots = _slots(config)
    kernels.warmup()
    clock = time.perf_counter if config.threads == 1 else time.thread_time

    def work(i):
        out = _run_collection(config, i, slots, clock)
        if progress is not None:
            progress(i)
        return out

    if config.threads == 1:
        per = [work(i) for i in range(config.n_collections)]
    else:
        with ThreadPoolExecutor(config.threads) as pool:
            per = list(pool.map(work, range(config.n_collections)))

    failures = np.sum([p["failures"] for p in per], axis=0)
    attempts = config.n_collections * config.n_mc
    for j, (m, c) in enumerate(slots):
        if failures[j] > config.max_failure_rate * attempts:
            raise StudyAbortedError(f"{m.value} {c}: {failures[j]} of {attempts} estimates failed")

    mse = np.array([p["mse"] for p in per])
    err = np.array([p["err"] for p in per])
    fit = np.array([p["fit"] for p in per])
    reports = []
    for j, (m, c) in enumerate(slots):
        fit_mean = float(np.mean(fit[:, j]))
        reports.append(MetricsReport(
            method=m.value,
            c1=None if c is None else c[0],
            c2=None if c is None else c[1],
            sample_mse_mean=float(np.mean(mse[:, j])),
            fit_mean=None if math.isnan(fit_mean) else fit_mean,
            total_time_s=float(sum(p["time"][j] for p in per)),
            boundary_flag_rate=float(np.mean([p["boundary"][j] for p in per])),
            failures=int(failures[j]),
            sample_err_mean=float(np.mean(err[:, j])),
            n=config.n,
            N=config.N,
        ))
    return reports


def average_over_combos(reports: list[MetricsReport], method: str) -> MetricsReport:
    """Mean of sample MSE, FIT and total time over all (C1, C2) combos of ``method``."""
    rows = [r for r in reports if r.method == Method(method).value]
    if not rows:
        raise ValueError(f"no reports for {method}")
    fits = [r.fit_mean for r in rows if r.fit_mean is not None]
    return MetricsReport(
        method=rows[0].method, c1=None, c2=None,
        sample_mse_mean=float(np.mean([r.sample_mse_mean for r in rows])),
        fit_mean=float(np.mean(fits)) if fits else None,
        total_time_s=float(np.mean([r.total_time_s for r in rows])),
        boundary_flag_rate=float(np.mean([r.boundary_flag_rate for r in rows])),
        failures=int(sum(r.failures for r in rows)),
        sample_err_mean=float(np.mean([r.sample_err_mean for r in rows])),
        n=rows[0].n, N=rows[0].N,
    )


# --------------------------------------------------------------------------
# export

CSV_COLUMNS = ["method", "c1", "c2", "sample_mse_mean", "fit_mean", "total_time_s", "boundary_flag_rate",
               "failures", "sample_err_mean", "n", "N"]
TIMING_COLUMNS = ("total_time_s",)
PLOT_COLUMNS = ["label", "method", "c1", "c2", "sample_mse_mean", "fit_mean"]


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: Path, rows: list[dict], columns: list[str]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(row[c]) for c in columns])


def export_results(reports: list[MetricsReport], destination, fmt: str = "csv", include_timing: bool = True,
                   plot_data: bool = True) -> list[Path]:
    """Write ``reports`` to ``destination`` as CSV or JSON, plus one plot-data CSV per (n, N).

    Returns the written paths.
    """
    if not reports:
        raise ValueError("nothing to export")
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    dest = Path(destination)
    columns = [c for c in CSV_COLUMNS if include_timing or c not in TIMING_COLUMNS]
    rows = [{c: asdict(r)[c] for c in columns} for r in reports]
    written = []
    try:
        if fmt == "csv":
            _write_csv(dest, rows, columns)
        else:
            dest.write_text(json.dumps(rows, indent=2) + "\n")
        written.append(dest)
        if plot_data:
            for (n, N) in sorted({(r.n, r.N) for r in reports}):
                p = dest.with_name(f"{dest.stem}_plot_n{n}_N{N}.csv")
                sub = [r for r in reports if (r.n, r.N) == (n, N)]
                _write_csv(p, [{"label": r.label, **asdict(r)} for r in sub], PLOT_COLUMNS)
                written.append(p)
    except OSError as exc:
        raise OSError(f"cannot write results to {dest}: {exc}") from exc
    return written


def load_results(path) -> list[MetricsReport]:
    """Inverse of the JSON export."""
    return [MetricsReport(**row) for row in json.loads(Path(path).read_text())]
