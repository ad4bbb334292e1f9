import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ampcap.mixture import (
    H_NOISE, DiscreteInput, GridEvaluator, MixtureDensity, UniformInput,
    UniformOutputDensity, density_max, location_gradient, marginal_information_density,
    mixture_logpdf, mixture_pdf, mutual_information, output_entropy,
)
from ampcap.quadrature import integrate_line

# frozen oracles, 30-digit mpmath quadrature / summation
PDF_PM1_AT_3 = 0.0270623983694764686511691374496
ENTROPY_PM5 = 2.11208485059865720587057083674
INFO_PM2_AT_0 = 0.943340433767158746044093765301
PHI_HALF = 0.352065326764299477774680441597
BINARY_CAPACITY_A1 = 0.336830820346831612004804799983
MCKELLIPS_005 = 0.0239089616668267526209443398389
CAP_BOUNDS_10 = (1.59769985452216952042607562528, 1.76463053331783230200907693268)


@st.composite
def inputs(draw, max_k=8):
    A = draw(st.floats(0.1, 12.0))
    k = draw(st.integers(1, max_k))
    pts = draw(st.lists(st.floats(-1.0, 1.0), min_size=k, max_size=k))
    raw = draw(st.lists(st.floats(0.05, 1.0), min_size=k, max_size=k))
    w = np.array(raw) / np.sum(raw)
    w[-1] = 1.0 - w[:-1].sum()
    return DiscreteInput(np.array(pts) * A, w, A)


# ---------------------------------------------------------------------------
# DiscreteInput
# ---------------------------------------------------------------------------

def test_points_sorted_and_close_points_merged():
    d = DiscreteInput([1.0, -1.0, 1.0 + 1e-12], [0.25, 0.5, 0.25], 2.0)
    assert d.K == 2
    np.testing.assert_allclose(d.points, [-1.0, 1.0])
    np.testing.assert_allclose(d.weights, [0.5, 0.5])


@pytest.mark.parametrize("points,weights,A,msg", [
    ([0.0], [1.0], 0.0, "A must be positive"),
    ([0.0], [1.0], -1.0, "A must be positive"),
    ([], [], 1.0, "at least one"),
    ([0.0, 1.0], [0.5, 0.4], 1.0, "sum"),
    ([0.0, 1.0], [1.0, 0.0], 1.0, "strictly positive"),
    ([0.0, 1.5], [0.5, 0.5], 1.0, r"\[-A, A\]"),
    ([0.0, 1.0], [1.0], 1.0, "same length"),
])
def test_invalid_inputs_rejected(points, weights, A, msg):
    with pytest.raises(ValueError, match=msg):
        DiscreteInput(points, weights, A)


def test_arrays_are_read_only():
    d = DiscreteInput([0.0], [1.0], 1.0)
    with pytest.raises(ValueError):
        d.points[0] = 0.5


def test_json_round_trip():
    d = DiscreteInput([-1.0, 0.25, 1.0], [0.3, 0.3, 0.4], 1.0)
    text = d.to_json()
    assert list(json.loads(text)) == ["A", "points", "weights"]
    e = DiscreteInput.from_json(text)
    np.testing.assert_array_equal(e.points, d.points)
    np.testing.assert_array_equal(e.weights, d.weights)


def test_grid_uniform_uses_cell_midpoints():
    d = DiscreteInput.grid_uniform(1.0, 4)
    np.testing.assert_allclose(d.points, [-0.75, -0.25, 0.25, 0.75])
    assert d.is_symmetric(1e-15)


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("points,weights,y,expected", [
    ([0.0], [1.0], 0.0, 1 / math.sqrt(2 * math.pi)),
    ([-1.0, 1.0], [0.5, 0.5], 0.0, 0.24197072451914337),
    ([-1.0, 1.0], [0.5, 0.5], 3.0, PDF_PM1_AT_3),
])
def test_mixture_pdf_values(points, weights, y, expected):
    d = MixtureDensity(DiscreteInput(points, weights, 3.0))
    assert mixture_pdf(d, y) == pytest.approx(expected, rel=1e-14)


def test_logpdf_accurate_forty_sigmas_out():
    d = MixtureDensity(DiscreteInput([0.0], [1.0], 1.0))
    assert mixture_logpdf(d, 40.0) == pytest.approx(-800.0 - 0.5 * math.log(2 * math.pi), rel=1e-15)


@given(inputs(), st.floats(-30.0, 30.0))
def test_log_and_linear_pdf_agree(d, y):
    dens = MixtureDensity(d)
    f = dens.pdf(y)
    if f > 1e-300:
        assert math.exp(dens.logpdf(y)) == pytest.approx(f, rel=1e-12)


@given(inputs())
def test_pdf_normalised(d):
    dens = MixtureDensity(d)
    a, b = dens.interval()
    total = integrate_line(dens.pdf, a, b, points=dens.breakpoints()).value
    assert total == pytest.approx(1.0, abs=1e-9)


def test_vector_and_scalar_evaluation_agree():
    dens = MixtureDensity(DiscreteInput([-1.0, 2.0], [0.3, 0.7], 2.0))
    y = np.linspace(-5, 5, 7)
    np.testing.assert_array_equal(dens.pdf(y), [dens.pdf(v) for v in y])


def test_uniform_output_density_closed_form():
    from scipy.stats import norm

    u = UniformOutputDensity(2.0)
    y = np.array([-7.0, -2.0, 0.0, 1.3, 30.0])
    exact = (norm.cdf(y + 2.0) - norm.cdf(y - 2.0)) / 4.0
    np.testing.assert_allclose(u.pdf(y[:-1]), exact[:-1], rtol=1e-12)
    assert np.isfinite(u.logpdf(30.0)) and u.logpdf(30.0) < -380


# ---------------------------------------------------------------------------
# entropy and information
# ---------------------------------------------------------------------------

def test_entropy_of_standard_normal():
    assert output_entropy(DiscreteInput([0.0], [1.0], 1.0)) == pytest.approx(H_NOISE, abs=1e-10)


def test_entropy_of_separated_pair():
    h = output_entropy(DiscreteInput([-5.0, 5.0], [0.5, 0.5], 5.0))
    assert h == pytest.approx(ENTROPY_PM5, abs=1e-9)
    assert h == pytest.approx(H_NOISE + math.log(2), abs=1e-6)


@given(inputs(max_k=5))
def test_information_between_zero_and_log_k(d):
    i = mutual_information(d)
    assert -1e-12 <= i <= math.log(d.K) + 1e-9
    assert output_entropy(d) >= H_NOISE - 1e-9


def test_information_of_point_mass_is_zero():
    assert mutual_information(DiscreteInput([0.7], [1.0], 1.0)) == pytest.approx(0.0, abs=1e-10)


def test_binary_information_at_small_amplitude():
    A = 0.05
    i = mutual_information(DiscreteInput([-A, A], [0.5, 0.5], A))
    assert 0 < i < math.log(2)
    assert i < MCKELLIPS_005


def test_binary_information_at_one_matches_oracle():
    i = mutual_information(DiscreteInput([-1.0, 1.0], [0.5, 0.5], 1.0))
    assert i == pytest.approx(BINARY_CAPACITY_A1, abs=1e-9)


def test_grid_uniform_information_inside_capacity_sandwich():
    i = mutual_information(DiscreteInput.grid_uniform(10.0, 101))
    lo, hi = CAP_BOUNDS_10
    assert lo <= i <= hi


def test_uniform_reference_information():
    i = mutual_information(UniformInput(2.0))
    assert i == pytest.approx(mutual_information(DiscreteInput.grid_uniform(2.0, 400)), abs=1e-5)


@pytest.mark.parametrize("x,expected", [(0.0, 0.0), (1.0, 0.5)])
def test_marginal_information_of_standard_normal(x, expected):
    d = DiscreteInput([0.0], [1.0], 1.0)
    assert marginal_information_density(d, x) == pytest.approx(expected, abs=1e-10)


def test_marginal_information_matches_oracle():
    d = DiscreteInput([-2.0, 2.0], [0.5, 0.5], 2.0)
    assert marginal_information_density(d, 0.0) == pytest.approx(INFO_PM2_AT_0, abs=1e-9)


def test_information_is_average_marginal():
    d = DiscreteInput([-1.5, 0.2, 1.5], [0.3, 0.3, 0.4], 1.5)
    avg = sum(w * marginal_information_density(d, x) for x, w in zip(d.points, d.weights))
    assert avg == pytest.approx(mutual_information(d), abs=1e-9)


# ---------------------------------------------------------------------------
# density maximum
# ---------------------------------------------------------------------------

def test_density_max_single_normal():
    y0, M = density_max(DiscreteInput([0.0], [1.0], 1.0))
    assert y0 == pytest.approx(0.0, abs=1e-12)
    assert M == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-14)


def test_density_max_close_pair():
    y0, M = density_max(DiscreteInput([-0.5, 0.5], [0.5, 0.5], 1.0))
    assert y0 == pytest.approx(0.0, abs=1e-10)
    assert M == pytest.approx(PHI_HALF, rel=1e-13)


@given(inputs(max_k=6))
def test_density_max_is_global_and_near_support(d):
    y0, M = density_max(d)
    grid = np.linspace(-d.A - 1, d.A + 1, 20001)
    assert M >= MixtureDensity(d).pdf(grid).max() - 1e-12
    assert np.min(np.abs(d.points - y0)) <= 1.0 + 1e-12


# ---------------------------------------------------------------------------
# gridded evaluator
# ---------------------------------------------------------------------------

def test_grid_evaluator_matches_adaptive_quadrature():
    d = DiscreteInput([-3.0, -0.4, 1.1, 3.0], [0.3, 0.2, 0.15, 0.35], 3.0)
    ev = GridEvaluator(d.points, d.weights, d.A)
    xs = np.array([-3.0, -1.0, 0.0, 2.5])
    ref = [marginal_information_density(d, x) for x in xs]
    np.testing.assert_allclose(ev.info(xs), ref, atol=1e-10)
    assert ev.mutual_information() == pytest.approx(mutual_information(d), abs=1e-10)


def test_location_gradient_matches_differences():
    d = DiscreteInput([-2.0, -0.3, 0.9, 2.0], [0.25, 0.25, 0.2, 0.3], 2.0)
    g = location_gradient(d)
    h = 1e-5
    for k in range(d.K):
        xp, xm = d.points.copy(), d.points.copy()
        xp[k] += h
        xm[k] -= h
        ip = GridEvaluator(xp, d.weights, 2.5).mutual_information()
        im = GridEvaluator(xm, d.weights, 2.5).mutual_information()
        assert g[k] == pytest.approx((ip - im) / (2 * h), rel=1e-6, abs=1e-10)
