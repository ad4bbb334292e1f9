"""Wrapping onto the circle, wrapped output densities and trigonometric moments.

``<W>_B = (pi / B) (W mod 2B)`` maps the line onto the circle.  For an input
supported in ``[-B, B]`` the wrapped output ``<X + Z>_B`` has the closed-form
Fourier coefficients ``exp(-(pi n / B)^2 / 2) E[exp(i n pi X / B)]``, which
drive the chi-square lower bound for ``K``-point inputs.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import linalg, special

from . import kernels
from .mixture import DiscreteInput, UniformInput, UniformOutputDensity, check_amplitude

TWO_PI = 2.0 * math.pi
UNIFORM_CIRCLE_PDF = 1.0 / TWO_PI
# lattice sum truncation target
LATTICE_EPS = 1e-14
# relative singular-value cutoff for numerical rank
RANK_RTOL = 1e-8
# slack allowed on the [-B, B] support precondition
SUPPORT_SLACK = 1e-12


def wrap_value(w, B):
    """``(pi / B)(w mod 2B)`` with the representative shifted into ``[-pi, pi)``."""
    B = check_amplitude(B)
    t = (math.pi / B) * np.mod(np.asarray(w, dtype=float), 2.0 * B)
    t = np.where(t >= math.pi, t - TWO_PI, t)
    return float(t) if np.ndim(t) == 0 else t


def noise_scale(A):
    """``sigma = pi / A``: the wrapped noise bandwidth when ``B = A``."""
    return math.pi / check_amplitude(A)


def _check_support(source, B):
    if np.any(np.abs(source.points) > B * (1.0 + SUPPORT_SLACK)):
        raise ValueError(f"input points must lie in [-B, B] with B={B:g}")


def lattice_shifts(A, B, eps=LATTICE_EPS):
    """Number ``J`` of shifts per side in the lattice sum.

    Shifts with ``|j| > J`` evaluate the output density at least
    ``sqrt(2 ln(1/eps)) + 1`` beyond every mass point, where the Gaussian
    tail (and its geometric decay in ``j``) is below ``eps``.
    """
    r = math.sqrt(2.0 * math.log(1.0 / eps)) + 1.0
    return max(1, math.ceil((A + B + r) / (2.0 * B)))


@dataclass(frozen=True)
class WrappedDensity:
    """Density of ``<X + Z>_B`` on ``(-pi, pi)``.

    ``f(theta) = (B / pi) sum_j f_Y((B / pi)(theta + 2 pi j))`` truncated to
    ``|j| <= J``.  ``source`` is a :class:`DiscreteInput` or a
    :class:`UniformInput`.
    """

    source: object
    B: float
    J: int = None
    _line: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "B", check_amplitude(self.B))
        if not isinstance(self.source, (DiscreteInput, UniformInput)):
            raise TypeError("source must be a DiscreteInput or a UniformInput")
        if self.J is None:
            object.__setattr__(self, "J", lattice_shifts(self.source.A, self.B))
        if self.J < 1:
            raise ValueError("shift count J must be positive")
        if isinstance(self.source, UniformInput):
            object.__setattr__(self, "_line", UniformOutputDensity(self.source.A))
        else:
            object.__setattr__(self, "_line", None)

    @property
    def sigma(self):
        return math.pi / self.B

    def _line_pdf(self, y):
        if self._line is not None:
            return self._line.pdf(y)
        return kernels.mixture_pdf(y, self.source.points, self.source.weights)

    def pdf(self, theta):
        th = np.atleast_1d(np.asarray(theta, dtype=float)).ravel()
        j = np.arange(-self.J, self.J + 1)
        y = (self.B / math.pi) * th[:, None] + 2.0 * self.B * j[None, :]
        vals = self._line_pdf(y.ravel()).reshape(y.shape)
        # sum shifts from the outside in so small tail terms are not lost
        order = np.argsort(-np.abs(j), kind="stable")
        out = (self.B / math.pi) * vals[:, order].sum(axis=1)
        return float(out[0]) if np.ndim(theta) == 0 else out.reshape(np.shape(theta))

    def logpdf(self, theta):
        return np.log(self.pdf(theta))

    def fourier_coeff(self, n):
        """``E[exp(i n Theta)]``; closed form for discrete sources."""
        if isinstance(self.source, UniformInput):
            if abs(self.source.A - self.B) > 1e-12 * self.B:
                raise ValueError("closed form for the uniform source needs B = A")
            return complex(n == 0)
        return wrapped_fourier_coeff(self.source, self.B, n)


def wrapped_pdf(d, theta):
    return d.pdf(theta)


def trig_moments(source, B, n):
    """``t_m = sum_k w_k exp(i m pi x_k / B)`` for ``m = 0..n``."""
    _check_support(source, B)
    m = np.arange(int(n) + 1)
    phase = np.exp(1j * (math.pi / B) * np.outer(m, source.points))
    return phase @ source.weights


def wrapped_fourier_coeff(source, B, n):
    """Fourier coefficient ``exp(-(pi n / B)^2 / 2) t_n`` of the wrapped output."""
    B = check_amplitude(B)
    _check_support(source, B)
    n = int(n)
    t = np.exp(1j * n * (math.pi / B) * source.points) @ source.weights
    return complex(math.exp(-0.5 * (math.pi * n / B) ** 2) * t)


@dataclass(frozen=True)
class TrigMomentMatrix:
    """Hermitian Toeplitz matrix with ``(j, k)`` entry ``t_{k - j}``."""

    order: int
    entries: np.ndarray

    @classmethod
    def from_moments(cls, t):
        t = np.asarray(t, dtype=complex)
        mat = linalg.toeplitz(np.conj(t), t)
        mat.setflags(write=False)
        return cls(len(t) - 1, mat)

    def singular_values(self):
        return linalg.svdvals(self.entries)

    def numerical_rank(self, rtol=RANK_RTOL):
        s = self.singular_values()
        return int(np.sum(s > rtol * s[0])) if s[0] > 0 else 0

    def is_hermitian(self, tol=0.0):
        return bool(np.all(np.abs(self.entries - self.entries.conj().T) <= tol))


def trig_moment_matrix(source, B, n):
    """``T_n`` built from the moments of ``<X>_B = pi X / B``."""
    return TrigMomentMatrix.from_moments(trig_moments(source, check_amplitude(B), n))


def frobenius_identity_gap(T):
    """``||T - I||_F^2``; at least ``K + 1`` when ``T`` has order ``2K`` and rank ``K``."""
    d = T.entries - np.eye(T.order + 1)
    return float(np.sum(d.real ** 2 + d.imag ** 2))


def fourier_truncation(A, K, eps=LATTICE_EPS):
    """Number of harmonics kept in the chi-square series."""
    return math.ceil((A / math.pi) * math.sqrt(2.0 * math.log(2.0 / eps))) + 2 * K


@dataclass(frozen=True)
class ParsevalSum:
    value: float
    tail_bound: float
    N: int


def chi2_wrapped_parseval(source, A, N=None):
    """``chi^2(<X+Z>_A || uniform) = sum_{n != 0} exp(-sigma^2 n^2) |t_n|^2``.

    ``sigma = pi / A``.  Harmonics ``0 < |n| <= N`` are summed;
    ``tail_bound`` bounds the rest by ``sum_{|n| > N} exp(-sigma^2 n^2)``.
    """
    A = check_amplitude(A)
    if N is None:
        N = fourier_truncation(A, source.K)
    sigma = math.pi / A
    # harmonics whose Gaussian factor underflows to 0.0 contribute nothing
    n_eff = min(int(N), int(math.sqrt(-math.log(np.finfo(float).tiny)) / sigma) + 1)
    t = trig_moments(source, A, n_eff)[1:]
    n = np.arange(1, n_eff + 1)
    terms = np.exp(-(sigma * n) ** 2) * (t.real ** 2 + t.imag ** 2)
    # smallest terms first
    value = 2.0 * float(np.sum(terms[::-1]))
    tail = (math.sqrt(math.pi) / sigma) * special.erfc(sigma * N)
    return ParsevalSum(value, float(tail), int(N))


def _check_k(K):
    if int(K) != K or K <= 1:
        raise ValueError("bound requires K > 1 mass points")


def chi2_lower_bound(K, A):
    """``1/2 exp(-4 pi^2 K^2 / A^2)``: chi-square floor for ``K``-point inputs."""
    _check_k(K)
    A = check_amplitude(A)
    return 0.5 * math.exp(-4.0 * math.pi ** 2 * K ** 2 / A ** 2)


COROLLARY_FACTOR = 0.5
CHAIN_FACTOR = 0.25


def tv_wrapped_lower_bound(K, A, M, factor=COROLLARY_FACTOR):
    """``factor / (2 pi M + 1) exp(-4 pi^2 K^2 / A^2)``.

    ``M`` bounds the wrapped density from above.  ``factor`` is 1/2 in the
    standalone statement and 1/4 where the bound is used in the chain.
    """
    _check_k(K)
    A = check_amplitude(A)
    if not M > 0:
        raise ValueError("M must be positive")
    return factor / (TWO_PI * M + 1.0) * math.exp(-4.0 * math.pi ** 2 * K ** 2 / A ** 2)


__all__ = [
    "wrap_value", "noise_scale", "lattice_shifts", "WrappedDensity", "wrapped_pdf",
    "trig_moments", "wrapped_fourier_coeff", "TrigMomentMatrix", "trig_moment_matrix",
    "frobenius_identity_gap", "fourier_truncation", "ParsevalSum",
    "chi2_wrapped_parseval", "chi2_lower_bound", "tv_wrapped_lower_bound",
    "COROLLARY_FACTOR", "CHAIN_FACTOR", "UNIFORM_CIRCLE_PDF",
]
