"""Numerical toolkit for the amplitude-constrained Gaussian channel.

Capacity-achieving discrete inputs with KKT certification, wrapped-mixture
Fourier machinery, f-divergences, and the closed-form bounds that tie them
together.  All information quantities are in nats.
"""

from ._backend import HAVE_NUMBA, USE_NUMBA
from .bounds import (
    BoundsReport, ChainReport, Check, THEOREM1_C, WRAPPED_DENSITY_SUP,
    capacity_bounds, cardinality_lower_bound, density_max_bounds,
    density_max_bounds_given_capacity, kl_uniform_bound, main_theorem_chain,
    verify_bounds, wrapped_density_bound,
)
from .divergences import CIRCLE, LINE, DensityPair, SupportViolation, chi2, kl, tv
from .mixture import (
    H_NOISE, DiscreteInput, GridEvaluator, MixtureDensity, UniformInput,
    UniformOutputDensity, density_max, location_gradient, marginal_information_density,
    mixture_logpdf, mixture_pdf, mutual_information, output_entropy,
)
from .quadrature import DEFAULT_QUAD, QuadratureError, QuadratureSpec
from .solver import (
    KktReport, SolverConfig, SolverResult, golden_gap, kkt_report,
    optimize_locations, optimize_weights, solve_capacity, support_transition,
)
from .wrapped import (
    TrigMomentMatrix, WrappedDensity, chi2_lower_bound, chi2_wrapped_parseval,
    frobenius_identity_gap, trig_moment_matrix, tv_wrapped_lower_bound, wrap_value,
    wrapped_fourier_coeff, wrapped_pdf,
)

__version__ = "0.1.0"
