"""Total variation, KL and chi-square divergences on the line and the circle.

Densities are duck-typed.  Every density needs a vectorised ``pdf``; a
``logpdf`` is used when present.  Line densities also provide
``interval(q)`` (the truncated support) and ``breakpoints()`` (peaks worth
handing to the adaptive integrator).  Circle densities live on ``(-pi, pi)``.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import optimize

from .quadrature import DEFAULT_QUAD, integrate_circle, integrate_line

LINE = "line"
CIRCLE = "circle"

# sign changes of p - q are bracketed on this many scan points
SCAN_POINTS = 4096
# KL support guards
P_NEGLIGIBLE = 1e-12
Q_ZERO = 1e-300
LOG_Q_ZERO = math.log(Q_ZERO)


class SupportViolation(ValueError):
    """``p`` puts mass where ``q`` vanishes, so ``D(p || q) = +inf``."""


def _logpdf(d, x):
    if hasattr(d, "logpdf"):
        return np.asarray(d.logpdf(x), dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(np.asarray(d.pdf(x), dtype=float))


@dataclass(frozen=True)
class DensityPair:
    """Two densities on a common domain, ``"line"`` or ``"circle"``."""

    p: object
    q: object
    domain: str = LINE

    def __post_init__(self):
        if self.domain not in (LINE, CIRCLE):
            raise ValueError(f"domain must be {LINE!r} or {CIRCLE!r}")

    def swapped(self):
        return DensityPair(self.q, self.p, self.domain)

    def interval(self, q=DEFAULT_QUAD):
        if self.domain == CIRCLE:
            return -math.pi, math.pi
        a1, b1 = self.p.interval(q)
        a2, b2 = self.q.interval(q)
        return min(a1, a2), max(b1, b2)

    def breakpoints(self):
        if self.domain == CIRCLE:
            return []
        pts = list(getattr(self.p, "breakpoints", list)())
        pts += list(getattr(self.q, "breakpoints", list)())
        return sorted(set(pts))


def _scalar(fn):
    return lambda x: float(fn(np.array([x]))[0])


def _sign_changes(diff, a, b):
    """Roots of ``diff`` on ``[a, b]`` bracketed on a uniform scan grid."""
    grid = np.linspace(a, b, SCAN_POINTS + 1)
    g = diff(grid)
    s = np.sign(g)
    # exact zeros on interior nodes are cuts too
    roots = [float(grid[i]) for i in np.nonzero(s[1:-1] == 0)[0] + 1]
    for i in np.nonzero(s[:-1] * s[1:] < 0)[0]:
        roots.append(optimize.brentq(_scalar(diff), grid[i], grid[i + 1], xtol=1e-14))
    return sorted(roots), grid, g


def tv(pair, q=DEFAULT_QUAD):
    """``TV(P || Q) = 1/2 int |p - q|``.

    The integration range is cut at every sign change of ``p - q`` so each
    piece has a smooth integrand and a trustworthy error estimate.
    """
    a, b = pair.interval(q)

    def diff(x):
        return np.asarray(pair.p.pdf(x), dtype=float) - np.asarray(pair.q.pdf(x), dtype=float)

    roots, grid, g = _sign_changes(diff, a, b)
    if pair.domain == CIRCLE and not roots:
        sign = 1.0 if g.sum() >= 0 else -1.0
        total = integrate_circle(lambda t: sign * diff(t), q).value
        return min(max(0.5 * total, 0.0), 1.0)
    cuts = [a] + roots + [b]
    extra = pair.breakpoints()
    fn = _scalar(diff)
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (lo + hi)
        sign = 1.0 if fn(mid) >= 0 else -1.0
        pts = [x for x in extra if lo < x < hi]
        total += sign * integrate_line(fn, lo, hi, q, points=pts).value
    return min(max(0.5 * total, 0.0), 1.0)


def _check_support(pair, a, b):
    grid = np.linspace(a, b, SCAN_POINTS + 1)
    lp = _logpdf(pair.p, grid)
    lq = _logpdf(pair.q, grid)
    bad = (lp > math.log(P_NEGLIGIBLE)) & (lq < LOG_Q_ZERO)
    if bad.any():
        raise SupportViolation(
            f"q vanishes where p > {P_NEGLIGIBLE:g} (first at x={grid[np.argmax(bad)]:.6g})"
        )


def _kl_integrand(pair):
    def fn(x):
        lp = _logpdf(pair.p, x)
        lq = _logpdf(pair.q, x)
        p = np.exp(lp)
        with np.errstate(invalid="ignore"):
            out = p * (lp - lq)
        return np.where(p < Q_ZERO, 0.0, out)

    return fn


def _chi2_integrand(pair):
    def fn(x):
        lp = _logpdf(pair.p, x)
        lq = _logpdf(pair.q, x)
        qv = np.exp(lq)
        # q (p/q - 1)^2 without forming p^2/q
        r = np.expm1(lp - lq)
        return np.where(qv < Q_ZERO, 0.0, qv * r * r)

    return fn


def _integrate(pair, vec_fn, q):
    if pair.domain == CIRCLE:
        return integrate_circle(vec_fn, q).value
    a, b = pair.interval(q)
    return integrate_line(_scalar(vec_fn), a, b, q, points=pair.breakpoints()).value


def kl(pair, q=DEFAULT_QUAD, strict=False):
    """``D(P || Q) = int p log(p / q)`` in nats.

    Returns ``inf`` when ``q`` vanishes (below 1e-300) where ``p`` exceeds
    1e-12, or raises :class:`SupportViolation` if ``strict``.
    """
    a, b = pair.interval(q)
    try:
        _check_support(pair, a, b)
    except SupportViolation:
        if strict:
            raise
        return math.inf
    return max(_integrate(pair, _kl_integrand(pair), q), 0.0)


def chi2(pair, q=DEFAULT_QUAD, strict=False):
    """``chi^2(P || Q) = int (p - q)^2 / q``; same support rule as :func:`kl`."""
    a, b = pair.interval(q)
    try:
        _check_support(pair, a, b)
    except SupportViolation:
        if strict:
            raise
        return math.inf
    return max(_integrate(pair, _chi2_integrand(pair), q), 0.0)


def gaussian_kl(mu1, mu2):
    """Closed form ``D(N(mu1, 1) || N(mu2, 1))``."""
    return 0.5 * (mu1 - mu2) ** 2


def gaussian_tv(mu1, mu2):
    """Closed form ``TV(N(mu1, 1), N(mu2, 1)) = 2 Phi(|mu1 - mu2| / 2) - 1``."""
    return math.erf(abs(mu1 - mu2) / (2.0 * math.sqrt(2.0)))


__all__ = [
    "DensityPair", "SupportViolation", "LINE", "CIRCLE",
    "tv", "kl", "chi2", "gaussian_kl", "gaussian_tv",
]
