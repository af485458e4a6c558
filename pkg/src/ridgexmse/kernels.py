"""Hot numeric kernels with a numba path and a pure-numpy path.

The hot loops of the Monte Carlo study are

* the empirical-Bayes cost scan and golden-section refinement, evaluated
  O(grid + iterations) times per noise realisation, and
* the self-normalised weighting of the posterior draws, O(M_s * n) per
  realisation,

plus the fused closed-form biased estimate, which is cheap enough that
per-call overhead of several small numpy operations would dominate it.
All are expressed on the singular-value spectrum so no kernel touches the
N x n regression matrix.  ``eb_minimize`` and ``weighted_draw_mean`` dispatch to
the numba kernels when :data:`ridgexmse._accel.HAS_NUMBA` is true; the numpy
versions stay importable for benchmarking and cross-checking.
"""
import math

import numpy as np

from ._accel import HAS_NUMBA, njit

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
POLE_RTOL = 1e-12


# --------------------------------------------------------------------------
# shared scalar helpers (compiled when numba is on)

@njit
def is_pole(r, c1, c2):
    """True if ``c1*r + c2/r`` vanishes at radius ``r`` (to relative 1e-12)."""
    inner = c1 * r + c2 / r
    if inner == 0.0:
        return True
    if c1 * c2 < 0.0:
        r0 = math.sqrt(-c2 / c1)
        if abs(r - r0) <= POLE_RTOL * r:
            return True
    return False


@njit
def log_pi_radius(r, n, c1, c2):
    # r must already be clamped to the guard radius
    return (2.0 - n) * math.log(r) + 2.0 * math.log(abs(c1 * r + c2 / r))


# --------------------------------------------------------------------------
# empirical-Bayes cost

@njit
def _eb_cost_loop(eta, s2, c2, sigma2, const):
    total = const
    for i in range(s2.shape[0]):
        q = eta * s2[i] + sigma2
        total += c2[i] / q + math.log(q)
    return total


def _eb_cost_np(eta, s2, c2, sigma2, const):
    q = eta * s2 + sigma2
    return const + float(np.sum(c2 / q + np.log(q)))


def _make_minimizer(cost):
    def minimize(s2, c2, sigma2, const, lo, hi, grid_points, tol, max_iter):
        """Grid scan over x = log10(eta / sigma2), then golden-section refinement
        around every grid-local minimum.  Returns (x_hat, cost_hat, at_edge)."""
        step = (hi - lo) / (grid_points - 1)
        grid_f = np.empty(grid_points)
        for i in range(grid_points):
            grid_f[i] = cost(sigma2 * 10.0 ** (lo + i * step), s2, c2, sigma2, const)

        best_i = 0
        for i in range(1, grid_points):
            if grid_f[i] < grid_f[best_i]:
                best_i = i
        best_x = lo + best_i * step
        best_f = grid_f[best_i]
        at_edge = best_i == 0 or best_i == grid_points - 1

        for i in range(grid_points):
            left_ok = i == 0 or grid_f[i] <= grid_f[i - 1]
            right_ok = i == grid_points - 1 or grid_f[i] <= grid_f[i + 1]
            if not (left_ok and right_ok):
                continue
            a = lo + max(i - 1, 0) * step
            b = lo + min(i + 1, grid_points - 1) * step
            x1 = b - INV_PHI * (b - a)
            x2 = a + INV_PHI * (b - a)
            f1 = cost(sigma2 * 10.0 ** x1, s2, c2, sigma2, const)
            f2 = cost(sigma2 * 10.0 ** x2, s2, c2, sigma2, const)
            it = 0
            while b - a > tol * max(1.0, abs(a)) and it < max_iter:
                if f1 <= f2:
                    b = x2
                    x2 = x1
                    f2 = f1
                    x1 = b - INV_PHI * (b - a)
                    f1 = cost(sigma2 * 10.0 ** x1, s2, c2, sigma2, const)
                else:
                    a = x1
                    x1 = x2
                    f1 = f2
                    x2 = a + INV_PHI * (b - a)
                    f2 = cost(sigma2 * 10.0 ** x2, s2, c2, sigma2, const)
                it += 1
            if f1 < best_f:
                best_f = f1
                best_x = x1
            if f2 < best_f:
                best_f = f2
                best_x = x2
        return best_x, best_f, at_edge

    return minimize


_eb_minimize_py = _make_minimizer(_eb_cost_np)
if HAS_NUMBA:
    import numba

    _eb_minimize_nb = numba.njit(nogil=True)(_make_minimizer(_eb_cost_loop))
else:
    _eb_minimize_nb = None


# --------------------------------------------------------------------------
# self-normalised weighting of posterior draws
#
# Draws are theta_k = V (a + scale * z_k) with a = V^T theta_ml and
# scale = sigma / s; V is orthogonal so ||theta_k|| = ||a + scale * z_k||.

@njit
def _weighted_draw_mean_loop(a, scale, Z, n, c1, c2, delta):
    m, d = Z.shape
    logw = np.empty(m)
    ok = np.empty(m, dtype=np.bool_)
    n_pole = 0
    lmax = -np.inf
    for k in range(m):
        acc = 0.0
        for j in range(d):
            t = a[j] + scale[j] * Z[k, j]
            acc += t * t
        r = max(math.sqrt(acc), delta)
        if is_pole(r, c1, c2):
            ok[k] = False
            n_pole += 1
            logw[k] = -np.inf
            continue
        ok[k] = True
        logw[k] = log_pi_radius(r, n, c1, c2)
        if logw[k] > lmax:
            lmax = logw[k]
    zbar = np.zeros(d)
    sum_w = 0.0
    sum_w2 = 0.0
    for k in range(m):
        if not ok[k]:
            continue
        w = math.exp(logw[k] - lmax)
        sum_w += w
        sum_w2 += w * w
        for j in range(d):
            zbar[j] += w * Z[k, j]
    if sum_w > 0.0:
        for j in range(d):
            zbar[j] /= sum_w
    return zbar, sum_w, sum_w2, n_pole


def _weighted_draw_mean_np(a, scale, Z, n, c1, c2, delta):
    T = a + scale * Z
    r = np.maximum(np.sqrt(np.einsum("ij,ij->i", T, T)), delta)
    inner = c1 * r + c2 / r
    pole = inner == 0.0
    if c1 * c2 < 0.0:
        r0 = math.sqrt(-c2 / c1)
        pole |= np.abs(r - r0) <= POLE_RTOL * r
    logw = np.full(r.shape, -np.inf)
    good = ~pole
    logw[good] = (2.0 - n) * np.log(r[good]) + 2.0 * np.log(np.abs(inner[good]))
    if not good.any():
        return np.zeros(Z.shape[1]), 0.0, 0.0, int(pole.sum())
    w = np.exp(logw - logw[good].max())
    sum_w = float(w.sum())
    zbar = (w @ Z) / sum_w
    return zbar, sum_w, float(w @ w), int(pole.sum())


# --------------------------------------------------------------------------
# closed-form biased estimate in the right-singular basis
#
# theta = V (a + sigma2 g(r) / r^2 * a / s^2) with a = c / s and r = ||a||.
# Returns (theta, ok); ok is False when r sits on a pole of pi.

@njit
def _biased_theta_loop(c, s, V, sigma2, n, c1, c2, delta):
    d = s.shape[0]
    a = np.empty(d)
    acc = 0.0
    for j in range(d):
        a[j] = c[j] / s[j]
        acc += a[j] * a[j]
    r = max(math.sqrt(acc), delta)
    theta = np.zeros(V.shape[0])
    if is_pole(r, c1, c2):
        return theta, False
    g = (2.0 - n) + 2.0 * (c1 * r - c2 / r) / (c1 * r + c2 / r)
    k = sigma2 * g / (r * r)
    for j in range(d):
        a[j] *= 1.0 + k / (s[j] * s[j])
    for i in range(V.shape[0]):
        acc = 0.0
        for j in range(d):
            acc += V[i, j] * a[j]
        theta[i] = acc
    return theta, True


def _biased_theta_np(c, s, V, sigma2, n, c1, c2, delta):
    a = c / s
    r = max(math.sqrt(float(a @ a)), delta)
    if is_pole(r, c1, c2):
        return np.zeros(V.shape[0]), False
    g = (2.0 - n) + 2.0 * (c1 * r - c2 / r) / (c1 * r + c2 / r)
    return V @ (a * (1.0 + (sigma2 * g / (r * r)) / (s * s))), True


# --------------------------------------------------------------------------
# dispatch

if HAS_NUMBA:
    eb_minimize = _eb_minimize_nb
    eb_cost_kernel = _eb_cost_loop
    weighted_draw_mean = _weighted_draw_mean_loop
    biased_theta = _biased_theta_loop
else:
    eb_minimize = _eb_minimize_py
    eb_cost_kernel = _eb_cost_np
    weighted_draw_mean = _weighted_draw_mean_np
    biased_theta = _biased_theta_np

BACKEND = "numba" if HAS_NUMBA else "numpy"

NUMPY_KERNELS = {
    "eb_minimize": _eb_minimize_py,
    "eb_cost": _eb_cost_np,
    "weighted_draw_mean": _weighted_draw_mean_np,
    "biased_theta": _biased_theta_np,
}
NUMBA_KERNELS = (
    {
        "eb_minimize": _eb_minimize_nb,
        "eb_cost": _eb_cost_loop,
        "weighted_draw_mean": _weighted_draw_mean_loop,
        "biased_theta": _biased_theta_loop,
    }
    if HAS_NUMBA
    else {}
)


def warmup() -> None:
    """Trigger compilation of the dispatched kernels so timings exclude JIT cost."""
    s2 = np.ones(2)
    eb_minimize(s2, s2, 1.0, 0.0, -1.0, 1.0, 3, 1e-3, 5)
    weighted_draw_mean(np.ones(2), np.ones(2), np.ones((2, 2)), 2.0, 1.0, 1.0, 1e-8)
    biased_theta(np.ones(2), np.ones(2), np.eye(2), 1.0, 2.0, 1.0, 1.0, 1e-8)
