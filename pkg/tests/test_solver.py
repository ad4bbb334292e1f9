import json
import math

import numpy as np
import pytest

from ampcap.bounds import capacity_bounds, cardinality_lower_bound
from ampcap.mixture import DiscreteInput, GridEvaluator, mutual_information
from ampcap.solver import (
    SolverConfig, SolverResult, golden_gap, kkt_report, optimize_locations,
    optimize_weights, solve_capacity,
)

BINARY_CAPACITY_A1 = 0.336830820346831612004804799983


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("kw,msg", [
    (dict(A=-1.0), "A must be positive"),
    (dict(A=1.0, kkt_tol=0.0), "kkt_tol"),
    (dict(A=1.0, grid_size=50), "grid_size"),
    (dict(A=1.0, max_support=0), "max_support"),
])
def test_config_validation(kw, msg):
    with pytest.raises(ValueError, match=msg):
        SolverConfig(**kw)


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

def test_two_point_weights_equiprobable():
    w, cap = optimize_weights([-1.0, 1.0], SolverConfig(A=1.0))
    np.testing.assert_allclose(w, [0.5, 0.5], atol=1e-15)
    assert cap == pytest.approx(BINARY_CAPACITY_A1, abs=1e-10)


def test_three_point_weights_symmetric():
    w, cap = optimize_weights([-2.5, 0.0, 2.5], SolverConfig(A=2.5))
    assert abs(w[0] - w[2]) <= 1e-10
    assert w[1] == pytest.approx(1 - 2 * w[0], abs=1e-15)
    # fixed-support optimum: equal information density on the support
    ev = GridEvaluator(np.array([-2.5, 0.0, 2.5]), w, 2.5)
    np.testing.assert_allclose(ev.info(np.array([-2.5, 0.0, 2.5])), cap, atol=1e-10)


def test_binary_weights_certified_below_threshold():
    cfg = SolverConfig(A=1.5)
    w, cap = optimize_weights([-1.5, 1.5], cfg)
    rep = kkt_report(DiscreteInput([-1.5, 1.5], w, 1.5), cap, cfg)
    assert rep.certified


def test_weights_without_symmetry():
    cfg = SolverConfig(A=2.0, enforce_symmetry=False)
    w, cap = optimize_weights([-2.0, 0.3, 2.0], cfg)
    ev = GridEvaluator(np.array([-2.0, 0.3, 2.0]), w, 2.0)
    i = ev.info(np.array([-2.0, 0.3, 2.0]))
    assert np.all(i[w > 1e-9] <= cap + 1e-9) and np.all(np.abs(i[w > 1e-6] - cap) <= 1e-9)
    assert mutual_information(DiscreteInput.normalized([-2.0, 0.3, 2.0], w, 2.0)) == pytest.approx(cap, abs=1e-9)


def test_weights_reject_bad_support():
    with pytest.raises(ValueError):
        optimize_weights([-3.0, 0.0], SolverConfig(A=2.0))
    with pytest.raises(ValueError):
        optimize_weights([0.5, 0.5], SolverConfig(A=2.0))


# ---------------------------------------------------------------------------
# locations
# ---------------------------------------------------------------------------

def test_locations_move_to_boundary():
    d = optimize_locations(DiscreteInput([-0.9, 0.9], [0.5, 0.5], 1.0), SolverConfig(A=1.0))
    np.testing.assert_allclose(d.points, [-1.0, 1.0], atol=1e-9)


def test_inner_pair_collapses_to_zero(solve):
    # ternary-optimal weights with the centre mass split over a close pair
    p = solve(2.0).input.weights[0]
    start = DiscreteInput([-2.0, -0.1, 0.1, 2.0], [p, 0.5 - p, 0.5 - p, p], 2.0)
    d = optimize_locations(start, SolverConfig(A=2.0))
    assert d.K == 3
    np.testing.assert_allclose(d.points, [-2.0, 0.0, 2.0], atol=1e-9)
    assert d.weights[1] == pytest.approx(1 - 2 * p, abs=1e-12)


def test_symmetric_start_stays_symmetric():
    start = DiscreteInput([-3.0, -1.0, 1.0, 3.0], [0.3, 0.2, 0.2, 0.3], 3.0)
    d = optimize_locations(start, SolverConfig(A=3.0))
    assert d.is_symmetric(0.0)
    assert mutual_information(d) >= mutual_information(start) - 1e-12


# ---------------------------------------------------------------------------
# full solves
# ---------------------------------------------------------------------------

def test_binary_regime(solve):
    r = solve(1.0)
    assert r.certified and r.status == "certified"
    np.testing.assert_allclose(r.input.points, [-1.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(r.input.weights, [0.5, 0.5], atol=1e-12)
    assert r.capacity == pytest.approx(BINARY_CAPACITY_A1, abs=1e-10)


def test_ternary_regime(solve):
    r = solve(2.0)
    assert r.certified and r.K == 3
    np.testing.assert_allclose(r.input.points, [-2.0, 0.0, 2.0], atol=1e-9)


def test_beyond_ternary(solve):
    r = solve(3.0)
    lo, hi = capacity_bounds(3.0)
    assert r.certified and r.K >= 4
    assert lo <= r.capacity <= hi


@pytest.mark.parametrize("A", [0.5, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0])
def test_solver_invariants(solve, A):
    r = solve(A)
    lo, hi = capacity_bounds(A)
    assert r.certified
    assert r.kkt.max_violation <= 1e-8 and r.kkt.max_residual <= 1e-8
    assert lo <= r.capacity <= hi
    assert r.input.is_symmetric(0.0)
    assert r.K >= cardinality_lower_bound(A)
    for step in r.iterations:
        assert step["capacity_nats"] <= math.log(step["K"]) + 1e-12
    # grid fast path agrees with adaptive quadrature
    assert mutual_information(r.input) == pytest.approx(r.capacity, abs=1e-9)


def test_capacity_monotone_in_amplitude(solve):
    caps = [solve(A).capacity for A in (0.5, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0)]
    assert caps == sorted(caps)


def test_symmetry_toggle_keeps_capacity(solve):
    base = solve(3.0)
    r = solve_capacity(SolverConfig(A=3.0, enforce_symmetry=False, warm_start=base.input))
    assert r.certified
    assert abs(r.capacity - base.capacity) <= 1e-9


def test_warm_start_reaches_same_optimum(solve):
    r = solve_capacity(SolverConfig(A=5.0, warm_start=solve(3.0).input))
    assert r.certified and r.K == solve(5.0).K
    assert r.capacity == pytest.approx(solve(5.0).capacity, abs=1e-10)


def test_max_support_flag():
    r = solve_capacity(SolverConfig(A=5.0, max_support=3))
    assert not r.certified and r.status == "max-support"


def test_births_are_recorded(solve):
    births = [t["birth"] for t in solve(3.0).iterations if t["birth"] is not None]
    assert births and all(0.0 <= b <= 3.0 for b in births)


# ---------------------------------------------------------------------------
# KKT report
# ---------------------------------------------------------------------------

def test_binary_fails_kkt_above_threshold():
    cfg = SolverConfig(A=2.5)
    d = DiscreteInput([-2.5, 2.5], [0.5, 0.5], 2.5)
    rep = kkt_report(d, mutual_information(d), cfg)
    assert rep.max_violation > 1e-3 and not rep.certified
    assert abs(rep.argmax) <= 1e-6


def test_point_mass_violation_grows_with_amplitude():
    viol = []
    for A in (1e-3, 0.1, 1.0):
        rep = kkt_report(DiscreteInput([0.0], [1.0], A), 0.0, SolverConfig(A=A, kkt_tol=1e-5))
        viol.append(rep.max_violation)
    # i(A) = A^2 / 2 for a point mass at zero
    np.testing.assert_allclose(viol, [5e-7, 5e-3, 0.5], rtol=1e-6)
    assert kkt_report(DiscreteInput([0.0], [1.0], 1e-3), 0.0, SolverConfig(A=1e-3, kkt_tol=1e-5)).certified


# ---------------------------------------------------------------------------
# golden formula
# ---------------------------------------------------------------------------

def test_golden_gap_of_optimum_is_zero(solve):
    lhs, rhs = golden_gap(solve(2.0).input, solve(2.0))
    assert lhs == pytest.approx(0.0, abs=1e-12) and rhs == pytest.approx(0.0, abs=1e-12)


def test_golden_gap_binary_above_threshold():
    opt = solve_capacity(SolverConfig(A=2.5))
    lhs, rhs = golden_gap(DiscreteInput([-2.5, 2.5], [0.5, 0.5], 2.5), opt)
    assert 0 < lhs <= rhs


def test_golden_gap_grid_uniform(solve):
    lhs, rhs = golden_gap(DiscreteInput.grid_uniform(10.0, 101), solve(10.0))
    assert lhs <= rhs <= math.sqrt(math.pi * math.e / 2) / 10


def test_golden_gap_needs_same_amplitude(solve):
    with pytest.raises(ValueError):
        golden_gap(DiscreteInput([0.0], [1.0], 1.5), solve(1.0))


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------

def test_result_json_round_trip(solve):
    r = solve(2.0)
    data = json.loads(r.to_json())
    assert set(data) == {"A", "capacity_nats", "points", "weights",
                         "kkt_max_violation", "certified", "trace"}
    back = SolverResult.from_dict(data)
    assert back.certified and back.K == r.K
    np.testing.assert_array_equal(back.input.points, r.input.points)
