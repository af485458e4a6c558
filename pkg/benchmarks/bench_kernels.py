"""Compare the numba and numpy kernel paths on the two hot loops.

    python benchmarks/bench_kernels.py [--repeat 200]

Numbers are per call, best of three batches, after a warm-up call that
triggers compilation.  Both paths must agree before anything is timed.
"""
import argparse
import timeit

import numpy as np

from ridgexmse import kernels
from ridgexmse.checks import random_instance
from ridgexmse.eb import _residual_const


def eb_args(n, N, seed=0):
    _, _, cache = random_instance(np.random.default_rng(seed), N, n)
    return (cache.s**2, cache.c**2, 1.0, _residual_const(cache, 1.0), -8.0, 8.0, 81, 1e-10, 200)


def draw_args(n, m_s, seed=0):
    rng = np.random.default_rng(seed)
    return (rng.standard_normal(n), rng.uniform(0.05, 0.2, n), rng.standard_normal((m_s, n)),
            float(n), 1.0, 1.0, 1e-8)


def biased_args(n, N, seed=0):
    _, _, cache = random_instance(np.random.default_rng(seed), N, n)
    return (cache.c, cache.s, cache.V, 1.0, float(n), 1.0, 1.0, 1e-8)


def per_call(fn, args, repeat):
    fn(*args)
    return min(timeit.repeat(lambda: fn(*args), number=repeat, repeat=3)) / repeat


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    if not kernels.HAS_NUMBA:
        raise SystemExit("numba is unavailable or disabled; nothing to compare")

    cases = [
        ("eb_minimize n=5 N=400", "eb_minimize", eb_args(5, 400)),
        ("eb_minimize n=80 N=360", "eb_minimize", eb_args(80, 360)),
        ("weighted_draw_mean n=5 M_s=500", "weighted_draw_mean", draw_args(5, 500)),
        ("weighted_draw_mean n=80 M_s=5000", "weighted_draw_mean", draw_args(80, 5000)),
        ("biased_theta n=5 N=400", "biased_theta", biased_args(5, 400)),
        ("biased_theta n=80 N=360", "biased_theta", biased_args(80, 360)),
    ]
    print(f"{'kernel':36s} {'numpy (us)':>12s} {'numba (us)':>12s} {'speed-up':>9s}")
    for label, name, a in cases:
        f_np, f_nb = kernels.NUMPY_KERNELS[name], kernels.NUMBA_KERNELS[name]
        k = 1 if name == "eb_minimize" else 0  # compare the minimum cost, not the argmin
        np.testing.assert_allclose(f_np(*a)[k], f_nb(*a)[k], rtol=1e-10)
        t_np, t_nb = per_call(f_np, a, args.repeat), per_call(f_nb, a, args.repeat)
        print(f"{label:36s} {t_np * 1e6:12.1f} {t_nb * 1e6:12.1f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
