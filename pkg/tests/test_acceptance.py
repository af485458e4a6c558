"""Acceptance gate: one PASS/FAIL line per criterion, at the stated tolerances.

Run under pytest (lines are repeated in the terminal summary) or directly with
``python tests/test_acceptance.py``.  The full gate takes roughly ten minutes;
the n = 80 study dominates.
"""
import time

import numpy as np
import pytest

from ridgexmse.bench import McConfig, average_over_combos, export_results, run_mc_study
from ridgexmse.checks import (check_bias_term, check_eb_cost_dense, check_eb_optimizer, check_euler,
                              check_prior_derivatives, random_instance, random_params)
from ridgexmse.data import rng_stream
from ridgexmse.eb import eb_optimize
from ridgexmse.linear import SvdCache, factorize, ml_theta
from ridgexmse.prior import WeightingParams
from ridgexmse.biased import bias_term
from ridgexmse.sampler import bayes_estimate, sample_posterior_draws
from ridgexmse.xmse import xmse_bayes_numeric, xmse_biased_numeric, xmse_eb_theoretical, xmse_empirical

LINES: list[str] = []


def report(label: str, ok: bool, detail: str) -> bool:
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    LINES.append(line)
    print(line, flush=True)
    return ok


def test_01_theory_table():
    vals = [xmse_eb_theoretical(n, 1.0, 1.0).total for n in range(1, 11)]
    worst = max(abs(v - (-n * n + 4 * n)) for n, v in zip(range(1, 11), vals))
    ok = worst <= 1e-12 and abs(vals[3]) <= 1e-12 and vals[2] > 0 > vals[4]
    assert report("1 XMSE theory table", ok, f"max |total - (4n - n^2)| = {worst:.1e} (tol 1e-12)")


def test_02_three_way_equality():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 81))
        theta0 = rng.standard_normal(n) * rng.uniform(0.2, 5.0)
        sigma2 = float(rng.uniform(0.1, 4.0))
        p = random_params(rng, n)  # C1 C2 >= 0
        b = xmse_eb_theoretical(n, sigma2, float(theta0 @ theta0))
        # the total is exactly 0 at n = 4, so errors are relative to max(|total|, largest term)
        scale = max(abs(b.total), b.xbias_sq)
        for v in (xmse_bayes_numeric(theta0, sigma2, p), xmse_biased_numeric(theta0, sigma2, p).total):
            worst = max(worst, abs(v - b.total) / scale)
    assert report("2 three-way XMSE equality", worst <= 1e-8, f"worst rel = {worst:.2e} (tol 1e-8)")


def test_03_derivative_oracles():
    a, b = check_prior_derivatives(), check_bias_term()
    ok = a.passed and b.passed
    assert report("3 derivative oracles", ok,
                  f"grad/hess worst normalised err = {a.worst:.2e} (<= 1 at rel 1e-6 / abs 1e-5); "
                  f"bias term worst rel = {b.worst:.2e} (tol 1e-6)")


def test_04_euler_residual():
    r = check_euler()
    assert report("4 Euler residual", r.passed, f"worst |res| / scale = {r.worst:.2e} (tol 1e-9)")


def test_05_eb_oracles():
    a, b = check_eb_cost_dense(), check_eb_optimizer()
    assert report("5 EB cost and optimiser", a.passed and b.passed,
                  f"cost vs dense worst rel = {a.worst:.2e} (tol 1e-9); "
                  f"optimiser excess over 1e5 grid = {b.worst:.2e} (tol 1e-9)")


def test_06_eta_asymptote():
    n, N = 5, 10_000
    theta0 = rng_stream(6, 0).standard_normal(n)
    s = np.full(n, np.sqrt(N))  # Phi^T Phi = N I
    cache = SvdCache(s, np.eye(n), s * theta0, float(N * theta0 @ theta0) + N, N)  # theta_ml = theta0
    eta = eb_optimize(cache, 1.0, warn=False).eta_hat
    target = float(theta0 @ theta0) / n
    rel = abs(eta - target) / target
    assert report("6 eta-hat asymptote", rel <= 0.05, f"eta = {eta:.5f}, ||theta0||^2/n = {target:.5f}, "
                                                      f"rel = {rel:.2e} (tol 5%)")


@pytest.mark.parametrize("estimator", ["EB_REG", "BAYES_EB", "BIASED_EB"])
def test_07_empirical_xmse(estimator):
    t0 = time.perf_counter()
    res = xmse_empirical(estimator, 5, 400, sigma2=1.0, reps=200_000, seed=0, m_s=500)
    band = max(1.5, 3 * res.std_error)
    ok = abs(res.estimate - (-5.0)) <= band
    assert report(f"7 empirical XMSE {estimator}", ok,
                  f"N^2 mean(dMSE) = {res.estimate:.3f} +- {res.std_error:.3f} (se), target -5 +- {band:.2f}; "
                  f"{res.reps} reps in {time.perf_counter() - t0:.0f}s")


@pytest.fixture(scope="module")
def n80_study():
    cfg = McConfig(n=80, N=360, snr=5.0, n_collections=100, n_mc=200, m_s=5000, seed=0, threads=1)
    reports = run_mc_study(cfg)
    return {m: average_over_combos(reports, m) for m in ("ML", "EB_REG", "BAYES_EB", "BIASED_EB")}


def test_08_n80_reproduction(n80_study):
    eb, bi, ba = n80_study["EB_REG"], n80_study["BIASED_EB"], n80_study["BAYES_EB"]
    checks = {
        "EB_REG MSE in [4.5e-2, 6.5e-2]": 4.5e-2 <= eb.sample_mse_mean <= 6.5e-2,
        "EB_REG FIT in [73, 80]": 73 <= eb.fit_mean <= 80,
        "BIASED MSE within 3%": abs(bi.sample_mse_mean / eb.sample_mse_mean - 1) <= 0.03,
        "BIASED FIT within 1.0": abs(bi.fit_mean - eb.fit_mean) <= 1.0,
        "BAYES MSE within 5%": abs(ba.sample_mse_mean / eb.sample_mse_mean - 1) <= 0.05,
    }
    detail = "; ".join(f"{k}: {'ok' if v else 'NO'}" for k, v in checks.items())
    rows = ", ".join(f"{m} mse={r.sample_mse_mean:.4e} fit={r.fit_mean:.2f}" for m, r in n80_study.items())
    assert report("8 n=80 study reproduction", all(checks.values()), f"{rows} | {detail}")


def test_09_timing(n80_study):
    t = {m: r.total_time_s for m, r in n80_study.items()}
    ok_biased = t["BIASED_EB"] <= 0.1 * t["EB_REG"]
    ok_bayes = t["BAYES_EB"] < t["EB_REG"]
    detail = (f"EB_REG {t['EB_REG']:.3f}s, BAYES_EB {t['BAYES_EB']:.3f}s, BIASED_EB {t['BIASED_EB']:.4f}s "
              f"(per-combo averages); biased <= 0.1 EB: {'ok' if ok_biased else 'NO'}; "
              f"bayes < EB: {'ok' if ok_bayes else 'NO'}")
    assert report("9 timing ordering", ok_biased and ok_bayes, detail)


def _small_study(n, N):
    reports = run_mc_study(McConfig(n=n, N=N, snr=5.0, n_collections=100, n_mc=200, seed=0))
    by = {r.label: r for r in reports}
    eb = by["EB_REG"].sample_mse_mean
    close = [f"({c1:g},{c2:g})" for c1, c2 in ((1, 0), (0, 1), (1, 1))
             if all(abs(by[f"{m}({c1:g},{c2:g})"].sample_mse_mean / eb - 1) <= 0.10 for m in ("BAYES_EB", "BIASED_EB"))]
    return by["ML"].sample_mse_mean, eb, close


def test_10_small_n_crossover():
    ml1, eb1, close1 = _small_study(1, 5)
    ml5, eb5, close5 = _small_study(5, 15)
    ok = ml1 <= eb1 and eb5 < ml5 and close1 and close5
    assert report("10 small-n crossover", bool(ok),
                  f"n=1,N=5: ML {ml1:.4e} <= EB {eb1:.4e}, combos within 10%: {close1 or 'none'}; "
                  f"n=5,N=15: EB {eb5:.4e} < ML {ml5:.4e}, combos within 10%: {close5 or 'none'}")


def test_11_sampler_invariants(tmp_path):
    rng = np.random.default_rng(11)
    # constant prior: n = 4, (C1, C2) = (1, 0) gives pi = 1
    cache = factorize(rng.standard_normal((30, 4))).cache(rng.standard_normal(30))
    est = bayes_estimate(cache, 1.0, WeightingParams(1.0, 0.0, 4), 500, rng_stream(1, 0)).theta_hat
    mean = sample_posterior_draws(cache, 1.0, 500, rng_stream(1, 0)).mean(axis=0)
    const_err = float(np.max(np.abs(est - mean) / np.abs(mean)))

    ratio_err = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 9))
        _, _, c = random_instance(rng, 40, n)
        p = random_params(rng, n)
        k = float(rng.choice([-1, 1]) * rng.uniform(0.1, 10))
        a = bayes_estimate(c, 1.0, p, 300, rng_stream(2, n)).theta_hat
        b = bayes_estimate(c, 1.0, p.scaled(k), 300, rng_stream(2, n)).theta_hat
        th = ml_theta(c)
        ba, bb = bias_term(th, c, 1.0, p), bias_term(th, c, 1.0, p.scaled(k))
        ratio_err = max(ratio_err, float(np.max(np.abs(a - b) / np.abs(a))),
                        float(np.max(np.abs(ba - bb) / np.abs(ba))))

    cfg = McConfig(n=3, N=30, n_collections=4, n_mc=20, seed=5)
    blobs = []
    for k in range(2):
        export_results(run_mc_study(cfg), tmp_path / f"r{k}.csv", include_timing=False, plot_data=False)
        blobs.append((tmp_path / f"r{k}.csv").read_bytes())
    same = blobs[0] == blobs[1]
    ok = const_err <= 1e-12 and ratio_err <= 1e-12 and same
    assert report("11 sampler invariants", ok,
                  f"constant prior vs draw mean rel = {const_err:.1e}; ratio invariance rel = {ratio_err:.1e} "
                  f"(tol 1e-12); byte-identical rerun: {same}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
