"""Closed-form bounds for the amplitude-constrained channel and their checks.

Every bound is a pure function of ``A`` (and sometimes ``K`` or a capacity
value).  :func:`verify_bounds` measures each bounded quantity for a solved
input and records both sides of every inequality with its margin.
"""

from dataclasses import asdict, dataclass, field
import io
import csv
import json
import math

import numpy as np

from .divergences import CIRCLE, DensityPair, chi2, kl, tv
from .mixture import (
    H_NOISE, DiscreteInput, MixtureDensity, UniformInput, UniformOutputDensity, check_amplitude,
    density_max, mutual_information,
)
from .quadrature import DEFAULT_QUAD, golden_section_max
from .wrapped import (
    CHAIN_FACTOR, COROLLARY_FACTOR, WrappedDensity, chi2_lower_bound,
    chi2_wrapped_parseval, tv_wrapped_lower_bound,
)

E = math.e
# sup of the wrapped optimal output density for every A > 1
WRAPPED_DENSITY_SUP = 5.0 * E / (2.0 * math.pi)
# constant inside the support-size bound, natural logs (log e = 1)
THEOREM1_C = math.sqrt(2.0) / (8.0 * math.sqrt(math.pi * E) * (5.0 * E + 1.0) ** 2)
THEOREM1_C_FORMULA = "sqrt(2) log(e) / (8 sqrt(pi e) (5e + 1)^2), log(e) = 1"
# slack on measured-vs-bound comparisons, above quadrature noise
CHECK_SLACK = 1e-9


def capacity_bounds(A):
    """``(1/2 log(1 + 2A^2/(pi e)), log(1 + sqrt(2) A / sqrt(pi e)))`` in nats."""
    A = check_amplitude(A)
    lower = 0.5 * math.log1p(2.0 * A * A / (math.pi * E))
    upper = math.log1p(math.sqrt(2.0) * A / math.sqrt(math.pi * E))
    return lower, upper


def kl_uniform_bound(A):
    """``sqrt(pi e / 2) / A``: bounds ``D(P_{U+Z} || P_{X*+Z})``."""
    return math.sqrt(math.pi * E / 2.0) / check_amplitude(A)


def density_max_bounds(A):
    """Outer bounds ``(1/(sqrt(2 pi e) + 2A), e / sqrt(2 pi e + 4A^2))`` on ``max f``."""
    A = check_amplitude(A)
    return (1.0 / (math.sqrt(2.0 * math.pi * E) + 2.0 * A),
            E / math.sqrt(2.0 * math.pi * E + 4.0 * A * A))


def density_max_bounds_given_capacity(capacity):
    """Inner bounds ``(exp(-C - h(Z)), exp(-C - h(Z) + 1))`` on ``max f``."""
    lo = math.exp(-capacity - H_NOISE)
    return lo, lo * E


def wrapped_density_bound(A):
    """``(e / 2 pi)(3 + sqrt(pi) / (sqrt(2) A))``, valid for ``A > 1``."""
    A = check_amplitude(A)
    if A <= 1.0:
        raise ValueError("wrapped density bound requires A > 1")
    return E / (2.0 * math.pi) * (3.0 + math.sqrt(math.pi) / (math.sqrt(2.0) * A))


def cardinality_lower_bound(A):
    """``A sqrt(log+(c A)) / (2 sqrt(2) pi)``: lower bound on the optimal support size."""
    A = check_amplitude(A)
    return A * math.sqrt(max(math.log(THEOREM1_C * A), 0.0)) / (2.0 * math.sqrt(2.0) * math.pi)


def grid_uniform(A, tol=1e-6, m0=None, max_m=1 << 16, q=DEFAULT_QUAD):
    """Equal-weight grid standing in for ``U[-A, A]``.

    The grid size doubles from ``m0`` until ``D(grid output || U + Z)`` is at
    most ``tol``.  Returns ``(input, divergence)``.
    """
    A = check_amplitude(A)
    m = m0 or max(8, int(math.ceil(2.0 * A)))
    exact = UniformOutputDensity(A)
    while True:
        d = DiscreteInput.grid_uniform(A, m)
        div = kl(DensityPair(MixtureDensity(d), exact), q)
        if div <= tol or m >= max_m:
            return d, div
        m *= 2


def chain_final_bound(A):
    """``sqrt(sqrt(pi e) / (2 sqrt 2)) / sqrt(A)``, the right end of the chain."""
    return math.sqrt(math.sqrt(math.pi * E) / (2.0 * math.sqrt(2.0))) / math.sqrt(check_amplitude(A))


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    """One inequality ``lhs <= rhs`` (or ``lhs == rhs`` within slack).

    ``margin`` is ``rhs - lhs`` for inequalities and ``-|lhs - rhs|`` for
    equalities.  A skipped check carries a reason and counts as passed.
    """

    name: str
    lhs: float = float("nan")
    rhs: float = float("nan")
    relation: str = "<="
    slack: float = CHECK_SLACK
    skipped: str = ""

    @property
    def margin(self):
        if self.relation == "==":
            return -abs(self.lhs - self.rhs)
        return self.rhs - self.lhs

    @property
    def passed(self):
        if self.skipped:
            return True
        if self.relation == "==":
            return abs(self.lhs - self.rhs) <= self.slack
        return self.lhs <= self.rhs + self.slack

    def to_dict(self):
        out = {"name": self.name, "relation": self.relation, "passed": self.passed}
        if self.skipped:
            out["skipped"] = self.skipped
        else:
            out.update(lhs=self.lhs, rhs=self.rhs, margin=self.margin)
        return out

    def describe(self):
        if self.skipped:
            return f"{self.name}: skipped ({self.skipped})"
        status = "ok" if self.passed else "FAILED"
        return (f"{self.name}: {self.lhs:.6g} {self.relation} {self.rhs:.6g} "
                f"(margin {self.margin:.3g}) {status}")


def _skip(name, reason):
    return Check(name, skipped=reason)


@dataclass(frozen=True)
class ChainReport:
    """Measured quantities and links of the support-size proof chain."""

    A: float
    K: int
    M: float
    quantities: dict
    links: tuple

    @property
    def passed(self):
        return all(c.passed for c in self.links)

    def to_dict(self):
        return {
            "A": self.A, "K": self.K, "M": self.M,
            "quantities": dict(self.quantities),
            "links": [c.to_dict() for c in self.links],
            "passed": self.passed,
        }


def _chain_precondition(result):
    if result.K <= 1 or result.A <= 1.0:
        raise ValueError("chain requires A > 1 and K > 1")


def main_theorem_chain(result, q=DEFAULT_QUAD):
    """Evaluate every link from the TV lower bound down to ``O(1/sqrt(A))``.

    ``result`` is a :class:`~ampcap.solver.SolverResult`.  The wrapped
    densities use ``B = A`` and ``M = 5e / (2 pi)``.
    """
    _chain_precondition(result)
    A, K = result.A, result.K
    M = WRAPPED_DENSITY_SUP
    wu = WrappedDensity(UniformInput(A), A)
    wx = WrappedDensity(result.input, A)
    lower_quarter = tv_wrapped_lower_bound(K, A, M, CHAIN_FACTOR)
    lower_half = tv_wrapped_lower_bound(K, A, M, COROLLARY_FACTOR)
    tv_xu = tv(DensityPair(wx, wu, CIRCLE), q)
    tv_ux = tv(DensityPair(wu, wx, CIRCLE), q)
    d_wrapped = kl(DensityPair(wu, wx, CIRCLE), q)
    d_line = kl(DensityPair(UniformOutputDensity(A), MixtureDensity(result.input)), q)
    pinsker = math.sqrt(0.5 * d_wrapped)
    dpi = math.sqrt(0.5 * d_line)
    final = chain_final_bound(A)
    quantities = {
        "tv_lower_quarter": lower_quarter,
        "tv_lower_half": lower_half,
        "tv_wrapped": tv_xu,
        "tv_wrapped_reversed": tv_ux,
        "kl_wrapped": d_wrapped,
        "kl_line": d_line,
        "sqrt_half_kl_wrapped": pinsker,
        "sqrt_half_kl_line": dpi,
        "final_bound": final,
    }
    links = (
        Check("tv_lower_bound", lower_quarter, tv_xu),
        Check("tv_symmetry", tv_xu, tv_ux, "=="),
        Check("pinsker", tv_ux, pinsker),
        Check("data_processing", pinsker, dpi),
        Check("kl_uniform_bound", dpi, final),
    )
    return ChainReport(A, K, M, quantities, links)


def _wrapped_sup(wd, n=4096):
    th = np.linspace(-math.pi, math.pi, n, endpoint=False)
    vals = wd.pdf(th)
    i = int(np.argmax(vals))
    h = 2.0 * math.pi / n
    _, best = golden_section_max(lambda t: wd.pdf(t), th[i] - h, th[i] + h)
    return max(best, float(vals[i]))


def _tail_envelope_ratio(dens, A, M, n=801):
    """Largest ``f(y) / (M exp(-(|y| - A)^2 / 2))`` over ``|y| in [A, A + 8]``."""
    s = np.linspace(0.0, 8.0, n)
    worst = 0.0
    for sign in (1.0, -1.0):
        y = sign * (A + s)
        worst = max(worst, float(np.max(np.exp(dens.logpdf(y) - math.log(M) + 0.5 * s * s))))
    return worst


@dataclass(frozen=True)
class BoundsReport:
    """Closed-form bounds at ``A`` with measured counterparts and checks."""

    A: float
    K: int
    capacity: float
    capacity_lower: float
    capacity_upper: float
    kl_uniform_bound: float
    density_max_lower: float
    density_max_upper: float
    wrapped_density_bound: float
    cardinality_bound: float
    theorem1_constant: float = THEOREM1_C
    theorem1_constant_formula: str = THEOREM1_C_FORMULA
    checks: tuple = ()
    chain: ChainReport = None
    measured: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.all_checks())

    def all_checks(self):
        return list(self.checks) + (list(self.chain.links) if self.chain else [])

    def first_failure(self):
        for c in self.all_checks():
            if not c.passed:
                return c
        return None

    def to_dict(self):
        out = {k: v for k, v in asdict(self).items() if k not in ("checks", "chain", "measured")}
        out["measured"] = dict(self.measured)
        out["checks"] = [c.to_dict() for c in self.checks]
        out["chain"] = self.chain.to_dict() if self.chain else None
        out["passed"] = self.passed
        return out

    def to_json(self):
        return json.dumps(_finite(self.to_dict()), sort_keys=True, indent=2) + "\n"

    CSV_COLUMNS = (
        "A", "K", "capacity", "capacity_lower", "capacity_upper", "kl_uniform_bound",
        "density_max_lower", "density_max_upper", "wrapped_density_bound",
        "cardinality_bound", "theorem1_constant",
    )

    def csv_row(self):
        row = {k: getattr(self, k) for k in self.CSV_COLUMNS}
        for c in self.all_checks():
            row[f"{c.name}_lhs"] = "" if c.skipped else c.lhs
            row[f"{c.name}_rhs"] = "" if c.skipped else c.rhs
            row[f"{c.name}_passed"] = c.passed
        return row

    def to_csv(self):
        row = self.csv_row()
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(row), lineterminator="\n")
        w.writeheader()
        w.writerow({k: _fmt(v) for k, v in row.items()})
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _finite(obj):
    """Replace non-finite floats so the JSON stays standard."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def verify_bounds(result, q=DEFAULT_QUAD):
    """Measure every bounded quantity for a solved input at its ``A``."""
    A, K, C = result.A, result.K, result.capacity
    d = result.input
    dens = MixtureDensity(d)
    lo, hi = capacity_bounds(A)
    m_lo, m_hi = density_max_bounds(A)
    mc_lo, mc_hi = density_max_bounds_given_capacity(C)
    y0, M_A = density_max(d)
    i_unif = mutual_information(UniformInput(A), q)
    d_line = kl(DensityPair(UniformOutputDensity(A), dens), q)
    measured = {
        "density_max": M_A,
        "density_argmax": y0,
        "uniform_information": i_unif,
        "kl_uniform_to_optimal": d_line,
    }
    checks = [
        Check("capacity_lower", lo, C),
        Check("capacity_upper", C, hi),
        Check("uniform_information_lower", lo, i_unif),
        Check("uniform_information_below_capacity", i_unif, C),
        Check("kl_uniform", d_line, kl_uniform_bound(A)),
        Check("density_max_outer_lower", m_lo, mc_lo),
        Check("density_max_lower", mc_lo, M_A),
        Check("density_max_upper", M_A, mc_hi),
        Check("density_max_outer_upper", mc_hi, m_hi),
        Check("argmax_near_support", float(np.min(np.abs(d.points - y0))), 1.0),
        Check("tail_envelope", _tail_envelope_ratio(dens, A, M_A), 1.0),
        Check("theorem1_cardinality", cardinality_lower_bound(A), float(K)),
    ]
    wb = float("nan")
    if A > 1.0:
        wb = wrapped_density_bound(A)
        wsup = _wrapped_sup(WrappedDensity(d, A))
        measured["wrapped_density_max"] = wsup
        checks.append(Check("wrapped_density", wsup, wb))
        checks.append(Check("wrapped_density_constant", wb, WRAPPED_DENSITY_SUP))
    else:
        checks.append(_skip("wrapped_density", "requires A > 1"))
    if K > 1:
        par = chi2_wrapped_parseval(d, A)
        wu = WrappedDensity(UniformInput(A), A)
        chi_quad = chi2(DensityPair(WrappedDensity(d, A), wu, CIRCLE), q)
        measured["chi2_wrapped"] = chi_quad
        measured["chi2_parseval"] = par.value
        checks.append(Check("parseval", chi_quad, par.value, "==",
                            slack=max(1e-8, par.tail_bound)))
        checks.append(Check("theorem2_chi2", chi2_lower_bound(K, A), par.value))
    else:
        checks.append(_skip("theorem2_chi2", "requires K > 1"))
    chain = None
    if A > 1.0 and K > 1:
        chain = main_theorem_chain(result, q)
        # the standalone statement's constant, reported beside the chain's
        checks.append(Check("tv_lower_bound_half_constant",
                            chain.quantities["tv_lower_half"], chain.quantities["tv_wrapped"]))
    else:
        checks.append(_skip("main_theorem_chain", "requires A > 1 and K > 1"))
    return BoundsReport(
        A=A, K=K, capacity=C, capacity_lower=lo, capacity_upper=hi,
        kl_uniform_bound=kl_uniform_bound(A), density_max_lower=m_lo,
        density_max_upper=m_hi, wrapped_density_bound=wb,
        cardinality_bound=cardinality_lower_bound(A), checks=tuple(checks),
        chain=chain, measured=measured,
    )


__all__ = [
    "capacity_bounds", "kl_uniform_bound", "density_max_bounds",
    "density_max_bounds_given_capacity", "wrapped_density_bound",
    "cardinality_lower_bound", "chain_final_bound", "grid_uniform", "main_theorem_chain",
    "verify_bounds", "BoundsReport", "ChainReport", "Check",
    "WRAPPED_DENSITY_SUP", "THEOREM1_C", "THEOREM1_C_FORMULA",
]
