"""Quadrature rules with explicit error control.

Line integrals go through QUADPACK's adaptive Gauss-Kronrod driver
(``scipy.integrate.quad``); circle integrals use the periodic trapezoid rule
with order doubling, which is spectrally accurate for the analytic periodic
integrands that wrapped Gaussian mixtures produce.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy import integrate


class QuadratureError(RuntimeError):
    """Raised when an integral cannot be brought under its tolerance."""

    def __init__(self, message, value=float("nan"), error=float("inf")):
        super().__init__(message)
        self.value = value
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and truncation rule shared by all line and circle integrals.

    The truncation radius ``r`` for a density peaked at most ``M`` is
    ``sqrt(2 ln(M sqrt(2 pi) / abs_tol)) + 1``, clamped to ``[r_min, r_max]``.
    Beyond ``A + r`` the Gaussian tail envelope puts the density below
    ``abs_tol``.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    r_min: float = 8.0
    r_max: float = 40.0
    limit: int = 500
    max_circle_order: int = 1 << 16

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")

    def tolerance(self, value):
        return max(self.abs_tol, self.rel_tol * abs(value))

    def truncation_radius(self, peak=1.0 / math.sqrt(2.0 * math.pi)):
        arg = peak * math.sqrt(2.0 * math.pi) / self.abs_tol
        r = math.sqrt(2.0 * math.log(arg)) + 1.0 if arg > 1.0 else self.r_min
        return min(max(r, self.r_min), self.r_max)

    def interval(self, A, peak=1.0 / math.sqrt(2.0 * math.pi)):
        r = self.truncation_radius(peak)
        return (-A - r, A + r)


DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float


def integrate_line(fn, a, b, spec=DEFAULT_QUAD, points=None):
    """Adaptive integral of a scalar function over ``[a, b]``.

    ``points`` are interior break points handed to QUADPACK (peaks, sign
    changes).  Raises :class:`QuadratureError` if the reported error
    estimate stays above ``spec.tolerance(value)``.
    """
    if points is not None:
        points = sorted(p for p in points if a < p < b)
        # QUADPACK caps the number of break points.
        if len(points) > 100:
            idx = np.linspace(0, len(points) - 1, 100).round().astype(int)
            points = [points[i] for i in np.unique(idx)]
        if not points:
            points = None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err = integrate.quad(
            fn, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
            limit=spec.limit, points=points,
        )
    if not np.isfinite(value) or err > spec.tolerance(value):
        raise QuadratureError(
            f"quadrature on [{a:g}, {b:g}] did not converge: "
            f"value={value:.6g}, error estimate={err:.3g}",
            value, err,
        )
    return QuadResult(value, err)


def integrate_pieces(fn, breaks, spec=DEFAULT_QUAD):
    """Sum of adaptive integrals over consecutive pieces ``breaks[i:i+2]``."""
    total = 0.0
    err = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b <= a:
            continue
        r = integrate_line(fn, a, b, spec)
        total += r.value
        err += r.error
    return QuadResult(total, err)


def integrate_circle(fn, spec=DEFAULT_QUAD, start_order=64):
    """Periodic trapezoid rule over ``(-pi, pi)`` with order doubling.

    ``fn`` must accept a numpy array of angles.  Successive estimates with
    ``n`` and ``2n`` nodes must agree to ``spec.tolerance``; their difference
    is reported as the error estimate.
    """
    n = start_order
    theta = -math.pi + 2.0 * math.pi * np.arange(n) / n
    prev = 2.0 * math.pi * float(np.mean(fn(theta)))
    while n < spec.max_circle_order:
        # the new nodes are the midpoints of the current ones
        mid = theta + math.pi / n
        cur = 0.5 * prev + math.pi * float(np.mean(fn(mid)))
        n *= 2
        theta = -math.pi + 2.0 * math.pi * np.arange(n) / n
        err = abs(cur - prev)
        if err <= spec.tolerance(cur) and n >= 2 * start_order:
            return QuadResult(cur, err)
        prev = cur
    raise QuadratureError(
        f"circle quadrature did not converge with {n} nodes", prev, float("inf")
    )


def golden_section_max(fn, a, b, tol=1e-12, max_iter=200):
    """Golden-section search for a maximum of a unimodal ``fn`` on ``[a, b]``.

    Returns ``(x, fn(x))``.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    if fc >= fd:
        return c, fc
    return d, fd
