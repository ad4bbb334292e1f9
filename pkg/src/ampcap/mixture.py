"""Discrete channel inputs and the Gaussian mixtures they induce at the output.

The channel is ``Y = X + Z`` with ``Z ~ N(0, 1)`` and ``|X| <= A``.  A
discrete input with mass points ``x_k`` and weights ``w_k`` produces the
output density ``f(y) = sum_k w_k phi(y - x_k)``.  All information
quantities are in nats.
"""

from dataclasses import dataclass, field
import json
import math

import numpy as np
from scipy import optimize, special

from . import kernels
from .quadrature import DEFAULT_QUAD, integrate_line

#: differential entropy of the standard normal, 0.5 log(2 pi e)
H_NOISE = 0.5 * math.log(2.0 * math.pi * math.e)

MERGE_TOL = 1e-10
WEIGHT_SUM_TOL = 1e-12
# f log f and p log(p/q) are treated as 0 below this density
TINY = 1e-300


def check_amplitude(A):
    A = float(A)
    if not (A > 0 and math.isfinite(A)):
        raise ValueError("A must be positive")
    return A


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiscreteInput:
    """Finite input law on ``[-A, A]``.

    Points are sorted on construction and points closer than ``1e-10`` are
    merged by adding their weights.  Weights must be positive and sum to one
    within ``1e-12``; they are not silently renormalised.
    """

    points: np.ndarray
    weights: np.ndarray
    A: float

    def __post_init__(self):
        A = check_amplitude(self.A)
        x = np.atleast_1d(np.asarray(self.points, dtype=float)).ravel()
        w = np.atleast_1d(np.asarray(self.weights, dtype=float)).ravel()
        if x.size == 0:
            raise ValueError("a discrete input needs at least one mass point")
        if x.shape != w.shape:
            raise ValueError("points and weights must have the same length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
            raise ValueError("points and weights must be finite")
        if np.any(w <= 0):
            raise ValueError("weights must be strictly positive")
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {w.sum():.15g}, not 1")
        if np.any(np.abs(x) > A):
            raise ValueError("mass points must lie in [-A, A]")
        order = np.argsort(x, kind="stable")
        x, w = x[order], w[order]
        keep_x, keep_w = [x[0]], [w[0]]
        for xi, wi in zip(x[1:], w[1:]):
            if xi - keep_x[-1] < MERGE_TOL:
                # weighted location, stays inside [-A, A]
                tot = keep_w[-1] + wi
                keep_x[-1] = (keep_x[-1] * keep_w[-1] + xi * wi) / tot
                keep_w[-1] = tot
            else:
                keep_x.append(xi)
                keep_w.append(wi)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "points", _readonly(keep_x))
        object.__setattr__(self, "weights", _readonly(keep_w))

    @property
    def K(self):
        return int(self.points.size)

    @property
    def log_weights(self):
        return np.log(self.weights)

    def is_symmetric(self, tol=0.0):
        return (
            np.all(np.abs(self.points + self.points[::-1]) <= tol)
            and np.all(np.abs(self.weights - self.weights[::-1]) <= tol)
        )

    def to_dict(self):
        return {
            "A": self.A,
            "points": [float(v) for v in self.points],
            "weights": [float(v) for v in self.weights],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        return cls(data["points"], data["weights"], data["A"])

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    @classmethod
    def point_mass(cls, x, A):
        return cls([x], [1.0], A)

    @classmethod
    def normalized(cls, points, weights, A):
        """Build from unnormalised non-negative weights, dropping zeros."""
        w = np.asarray(weights, dtype=float)
        x = np.asarray(points, dtype=float)
        keep = w > 0
        w = w[keep] / w[keep].sum()
        return cls(np.clip(x[keep], -A, A), w, A)

    @classmethod
    def grid_uniform(cls, A, m):
        """Equal-weight ``m``-point grid standing in for ``U[-A, A]``.

        Midpoint placement, ``x_k = -A + (k + 1/2) 2A/m``, so every cell of
        width ``2A/m`` carries mass ``1/m`` at its centre.
        """
        A = check_amplitude(A)
        if m < 1:
            raise ValueError("grid size must be positive")
        x = -A + (np.arange(m) + 0.5) * (2.0 * A / m)
        return cls(x, np.full(m, 1.0 / m), A)

    def __repr__(self):
        return f"DiscreteInput(A={self.A:g}, K={self.K})"


@dataclass(frozen=True)
class UniformInput:
    """The continuous uniform reference law ``U[-A, A]``."""

    A: float

    def __post_init__(self):
        object.__setattr__(self, "A", check_amplitude(self.A))


def _as_array(y):
    return np.atleast_1d(np.asarray(y, dtype=float)).ravel()


def _restore(out, y):
    return float(out[0]) if np.ndim(y) == 0 else out.reshape(np.shape(y))


@dataclass(frozen=True)
class MixtureDensity:
    """Output density of the AWGN channel for a discrete input."""

    input: DiscreteInput
    _log_w: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_log_w", self.input.log_weights)

    @property
    def A(self):
        return self.input.A

    def pdf(self, y):
        return _restore(
            kernels.mixture_pdf(_as_array(y), self.input.points, self.input.weights), y
        )

    def logpdf(self, y):
        return _restore(kernels.mixture_logpdf(_as_array(y), self.input.points, self._log_w), y)

    def dpdf(self, y):
        """First derivative ``f'(y) = sum_k w_k (x_k - y) phi(y - x_k)``."""
        yy = _as_array(y)
        d = yy[:, None] - self.input.points[None, :]
        out = (-d * np.exp(-0.5 * d * d)) @ self.input.weights * kernels.INV_SQRT_2PI
        return _restore(out, y)

    def breakpoints(self):
        return list(self.input.points)

    def interval(self, q=DEFAULT_QUAD):
        return q.interval(self.A)


@dataclass(frozen=True)
class UniformOutputDensity:
    """Density of ``U + Z`` for ``U ~ U[-A, A]``: ``(Phi(y+A) - Phi(y-A)) / 2A``."""

    A: float

    def __post_init__(self):
        object.__setattr__(self, "A", check_amplitude(self.A))

    def logpdf(self, y):
        yy = np.abs(_as_array(y))
        la = special.log_ndtr(self.A - yy)
        lb = special.log_ndtr(-self.A - yy)
        out = la + np.log1p(-np.exp(lb - la)) - math.log(2.0 * self.A)
        return _restore(out, y)

    def pdf(self, y):
        return np.exp(self.logpdf(y))

    def breakpoints(self):
        return [-self.A, self.A]

    def interval(self, q=DEFAULT_QUAD):
        return q.interval(self.A)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def mixture_pdf(d, y):
    """``sum_k w_k phi(y - x_k)``."""
    return d.pdf(y)


def mixture_logpdf(d, y):
    """Log-sum-exp form of :func:`mixture_pdf`, finite far into the tails."""
    return d.logpdf(y)


def _entropy_integrand(density):
    def fn(y):
        lf = density.logpdf(y)
        f = math.exp(lf)
        return 0.0 if f < TINY else -f * lf

    return fn


def output_entropy(d, q=DEFAULT_QUAD):
    """Differential entropy ``h(Y) = -int f log f`` of an output density.

    Accepts a :class:`MixtureDensity`, a :class:`UniformOutputDensity`, or a
    bare :class:`DiscreteInput`.
    """
    if isinstance(d, DiscreteInput):
        d = MixtureDensity(d)
    a, b = d.interval(q)
    return integrate_line(_entropy_integrand(d), a, b, q, points=d.breakpoints()).value


def mutual_information(d, q=DEFAULT_QUAD):
    """``I(X; X + Z) = h(Y) - h(Z)`` for a discrete or uniform input."""
    if isinstance(d, UniformInput):
        dens = UniformOutputDensity(d.A)
    elif isinstance(d, DiscreteInput):
        dens = MixtureDensity(d)
    else:
        dens = d
    return max(output_entropy(dens, q) - H_NOISE, 0.0)


def marginal_information_density(d, x, q=DEFAULT_QUAD):
    """``i(x) = D(N(x, 1) || P_{X+Z})`` by adaptive quadrature."""
    dens = MixtureDensity(d) if isinstance(d, DiscreteInput) else d
    x = float(x)
    r = q.truncation_radius()

    def fn(y):
        u = y - x
        return math.exp(-0.5 * u * u) * kernels.INV_SQRT_2PI * (
            -0.5 * u * u - kernels.LOG_SQRT_2PI - dens.logpdf(y)
        )

    pts = [x] + [p for p in dens.breakpoints() if abs(p - x) < r]
    return max(integrate_line(fn, x - r, x + r, q, points=pts).value, 0.0)


def density_max(d):
    """Global maximiser and maximum of a mixture density.

    Every local maximum of a unit-variance Gaussian mixture lies within
    distance 1 of a mass point, so it suffices to bracket sign changes of
    ``f'`` inside each ``[x_k - 1, x_k + 1]`` and polish them by root finding.
    """
    dens = MixtureDensity(d) if isinstance(d, DiscreteInput) else d
    best_y, best_f = None, -1.0
    for xk in dens.input.points:
        grid = np.linspace(xk - 1.0, xk + 1.0, 129)
        g = dens.dpdf(grid)
        cands = [grid[int(np.argmax(dens.pdf(grid)))]]
        for i in np.nonzero((g[:-1] > 0) & (g[1:] <= 0))[0]:
            a, b = grid[i], grid[i + 1]
            if dens.dpdf(a) > 0 > dens.dpdf(b):
                cands.append(optimize.brentq(dens.dpdf, a, b, xtol=1e-15))
            else:
                # rounding put the sign change on a grid node
                cands.extend((a, b))
        for yc in cands:
            fc = dens.pdf(yc)
            if fc > best_f:
                best_y, best_f = float(yc), float(fc)
    return best_y, best_f


# ---------------------------------------------------------------------------
# gridded fast path used by the solver
# ---------------------------------------------------------------------------

# Gaussian window half-width for the smoothing sums; phi(11) ~ 2e-27.
SMOOTH_RADIUS = 11.0


class GridEvaluator:
    """Information density ``i(x)`` and its derivatives on a fixed y-grid.

    The output log-density is tabulated once on a uniform grid covering
    ``[-A - R, A + R]``; ``i(x) = -h(Z) - int phi(y - x) log f(y) dy`` is then
    a Gaussian smoothing sum.  For integrands analytic in a strip around the
    real axis the equispaced rule converges geometrically in ``1/h``, so a
    modest step reaches round-off accuracy.  The step shrinks with the
    largest gap between neighbouring mass points, which controls how close the
    complex zeros of ``f`` come to the real axis.
    """

    def __init__(self, points, weights, A, step=None):
        self.points = np.ascontiguousarray(points, dtype=float)
        self.weights = np.ascontiguousarray(weights, dtype=float)
        self.A = float(A)
        if step is None:
            gap = float(np.max(np.diff(self.points))) if self.points.size > 1 else 0.0
            step = min(0.05, 0.4 / gap) if gap > 0 else 0.05
        self.step = step
        half = self.A + SMOOTH_RADIUS
        n = int(math.ceil(2.0 * half / step)) + 1
        self.y0 = -half
        self.y = self.y0 + step * np.arange(n)
        self.log_f = kernels.mixture_logpdf(self.y, self.points, np.log(self.weights))

    def derivs(self, xs):
        """``(i(x), i'(x), i''(x))`` for an array of inputs."""
        xs = np.ascontiguousarray(np.atleast_1d(xs), dtype=float)
        s0, s1, s2 = kernels.gauss_smooth(xs, self.y0, self.step, self.log_f, SMOOTH_RADIUS)
        return -H_NOISE - s0, -s1, -s2

    def info(self, xs):
        return self.derivs(xs)[0]

    def mutual_information(self):
        """``sum_k w_k i(x_k)``, which equals ``I(X; Y)``."""
        return float(self.weights @ self.info(self.points))

    def location_gradient(self):
        """``dI/dx_k = w_k i'(x_k)``."""
        _, d1, _ = self.derivs(self.points)
        return self.weights * d1


def location_gradient(d):
    """Gradient of ``I(X; Y)`` with respect to the mass-point locations."""
    return GridEvaluator(d.points, d.weights, d.A).location_gradient()
