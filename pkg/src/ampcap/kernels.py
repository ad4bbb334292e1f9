"""Hot numeric kernels: Gaussian-mixture evaluation and Gaussian smoothing.

Every kernel exists twice, a numba-compiled loop (``*_nb``) and a vectorised
numpy version (``*_np``).  The module-level names without suffix point at the
backend selected by :mod:`ampcap._backend`.  Both versions are always
importable so the test-suite and the benchmark can compare them.
"""

import math

import numpy as np

from ._backend import USE_NUMBA, njit

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# rows of y processed at once by the numpy smoothing kernel
_CHUNK = 256


# ---------------------------------------------------------------------------
# mixture log-density
# ---------------------------------------------------------------------------

@njit(cache=True)
def mixture_logpdf_nb(y, points, log_weights):
    n = y.shape[0]
    k = points.shape[0]
    out = np.empty(n)
    for i in range(n):
        yi = y[i]
        m = -np.inf
        for j in range(k):
            d = yi - points[j]
            v = log_weights[j] - 0.5 * d * d
            if v > m:
                m = v
        s = 0.0
        for j in range(k):
            d = yi - points[j]
            s += math.exp(log_weights[j] - 0.5 * d * d - m)
        out[i] = m + math.log(s) - LOG_SQRT_2PI
    return out


def mixture_logpdf_np(y, points, log_weights):
    d = y[:, None] - points[None, :]
    v = log_weights[None, :] - 0.5 * d * d
    m = v.max(axis=1)
    return m + np.log(np.exp(v - m[:, None]).sum(axis=1)) - LOG_SQRT_2PI


# ---------------------------------------------------------------------------
# mixture density (linear domain)
# ---------------------------------------------------------------------------

@njit(cache=True)
def mixture_pdf_nb(y, points, weights):
    n = y.shape[0]
    k = points.shape[0]
    out = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(k):
            d = y[i] - points[j]
            s += weights[j] * math.exp(-0.5 * d * d)
        out[i] = s * INV_SQRT_2PI
    return out


def mixture_pdf_np(y, points, weights):
    d = y[:, None] - points[None, :]
    return (np.exp(-0.5 * d * d) @ weights) * INV_SQRT_2PI


# ---------------------------------------------------------------------------
# Gaussian smoothing of gridded values and its first two x-derivatives
#
#   s0(x) = h * sum_j phi(y_j - x) v_j
#   s1(x) = h * sum_j (y_j - x) phi(y_j - x) v_j          (= d s0 / dx)
#   s2(x) = h * sum_j ((y_j - x)^2 - 1) phi(y_j - x) v_j  (= d2 s0 / dx2)
#
# on the uniform grid y_j = y0 + j h.  Terms with |y_j - x| > radius are
# skipped; callers pick radius so that the skipped mass is negligible.
# ---------------------------------------------------------------------------

@njit(cache=True)
def gauss_smooth_nb(xs, y0, h, values, radius):
    n = values.shape[0]
    m = xs.shape[0]
    s0 = np.zeros(m)
    s1 = np.zeros(m)
    s2 = np.zeros(m)
    for i in range(m):
        x = xs[i]
        lo = int(math.floor((x - radius - y0) / h))
        hi = int(math.ceil((x + radius - y0) / h)) + 1
        if lo < 0:
            lo = 0
        if hi > n:
            hi = n
        a0 = 0.0
        a1 = 0.0
        a2 = 0.0
        for j in range(lo, hi):
            d = y0 + j * h - x
            if d > radius or d < -radius:
                continue
            g = math.exp(-0.5 * d * d) * values[j]
            a0 += g
            a1 += d * g
            a2 += (d * d - 1.0) * g
        c = h * INV_SQRT_2PI
        s0[i] = c * a0
        s1[i] = c * a1
        s2[i] = c * a2
    return s0, s1, s2


def gauss_smooth_np(xs, y0, h, values, radius):
    n = values.shape[0]
    y = y0 + h * np.arange(n)
    c = h * INV_SQRT_2PI
    s0 = np.empty(xs.shape[0])
    s1 = np.empty(xs.shape[0])
    s2 = np.empty(xs.shape[0])
    for start in range(0, xs.shape[0], _CHUNK):
        x = xs[start:start + _CHUNK]
        d = y[None, :] - x[:, None]
        g = np.where(np.abs(d) <= radius, np.exp(-0.5 * d * d), 0.0) * values[None, :]
        s0[start:start + _CHUNK] = c * g.sum(axis=1)
        s1[start:start + _CHUNK] = c * (d * g).sum(axis=1)
        s2[start:start + _CHUNK] = c * ((d * d - 1.0) * g).sum(axis=1)
    return s0, s1, s2


if USE_NUMBA:
    mixture_logpdf = mixture_logpdf_nb
    mixture_pdf = mixture_pdf_nb
    gauss_smooth = gauss_smooth_nb
else:
    mixture_logpdf = mixture_logpdf_np
    mixture_pdf = mixture_pdf_np
    gauss_smooth = gauss_smooth_np

BACKEND = "numba" if USE_NUMBA else "numpy"
