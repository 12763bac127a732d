import math

import numpy as np
import pytest

from fracmax.continuous import (
    PiecewiseLinear1D,
    StepFunction1D,
    average_interval,
    frac_max_cont,
    mollification_convergence,
    mollify,
)

from oracles import grid_oracle_cont

CHI = StepFunction1D.indicator(0.0, 1.0)


def test_step_function_validation_and_eval():
    with pytest.raises(ValueError):
        StepFunction1D((0.0, 0.0), (1.0,))
    f = StepFunction1D((0.0, 0.5, 2.0), (1.0, 3.0))
    assert f(0.25) == 1.0 and f(1.0) == 3.0
    assert f(-1.0) == 0.0 and f(2.0) == 0.0
    assert f.total_variation() == 1.0 + 2.0 + 3.0
    assert f.mass() == pytest.approx(0.5 + 4.5, rel=1e-15)


def test_frac_max_cont_examples():
    v, c = frac_max_cont(CHI, 0.0, np.array([2.0]))
    assert v[0] == pytest.approx(0.5, rel=1e-14)
    assert tuple(c[0]) == (0.0, 2.0)
    v, c = frac_max_cont(CHI, 0.5, np.array([3.0]))
    assert v[0] == pytest.approx(3 ** -0.5, rel=1e-14)
    assert tuple(c[0]) == (0.0, 3.0)
    v, _ = frac_max_cont(CHI, 0.0, np.array([0.5]))
    assert v[0] == pytest.approx(1.0, rel=1e-15)


def test_beta0_recovers_classical_closed_form():
    xs = np.array([-3.0, -0.25, 0.1, 0.9, 1.25, 5.0])
    v, _ = frac_max_cont(CHI, 0.0, xs)
    expect = np.where(xs < 0, 1.0 / (1.0 - xs), np.where(xs > 1, 1.0 / xs, 1.0))
    assert np.allclose(v, expect, rtol=1e-14)


def test_matches_grid_oracle_random_steps():
    rng = np.random.default_rng(5)
    for _ in range(8):
        n = int(rng.integers(1, 7))
        bps = np.concatenate([[0.0], np.cumsum(rng.uniform(0.2, 1.0, n))])
        f = StepFunction1D(tuple(bps), tuple(rng.uniform(0, 1, n)))
        a, b = f.support
        beta = float(rng.choice([0.0, 0.35, 0.75]))
        xs = np.sort(rng.uniform(a - 2, b + 2, 7))
        v, certs = frac_max_cont(f, beta, xs)
        for x, val, (u, vv) in zip(xs, v, certs):
            orc = grid_oracle_cont(f, beta, float(x), a - 3, b + 3)
            assert orc <= val + 1e-10
            assert val <= orc * 1.01 + 1e-9  # grid is dense enough to get close
            assert u <= x <= vv


def test_certificate_optimality_random_intervals():
    rng = np.random.default_rng(6)
    f = StepFunction1D((0.0, 1.0, 1.5, 3.0), (0.2, 1.0, 0.6))
    for beta in (0.0, 0.4, 0.8):
        xs = np.sort(rng.uniform(-1, 4, 6))
        v, _ = frac_max_cont(f, beta, xs)
        for x, val in zip(xs, v):
            for _ in range(60):
                u = float(rng.uniform(-2, x))
                w = float(rng.uniform(x, 5))
                assert average_interval(f, u, w, beta, x) <= val + 1e-10


def test_scale_covariance():
    # f_t(x) = f(x/t) satisfies M(f_t)(t x) = t^beta M(f)(x)
    for beta in (0.25, 0.5):
        for t in (2.0, 5.0):
            xs = np.array([-1.0, 0.3, 2.0])
            base, _ = frac_max_cont(CHI, beta, xs)
            scaled, _ = frac_max_cont(CHI.dilated(t), beta, t * xs)
            assert np.allclose(scaled, t**beta * base, rtol=1e-12)


def test_monotone_beyond_support():
    f = StepFunction1D((0.0, 1.0, 2.0), (1.0, 0.3))
    xs = np.linspace(2.0, 12.0, 40)
    v, _ = frac_max_cont(f, 0.5, xs)
    assert np.all(np.diff(v) <= 1e-12)
    xs = np.linspace(-10.0, 0.0, 40)
    v, _ = frac_max_cont(f, 0.5, xs)
    assert np.all(np.diff(v) >= -1e-12)


def test_degenerate_zero_function():
    z = StepFunction1D((0.0, 1.0), (0.0,))
    v, c = frac_max_cont(z, 0.5, np.array([-1.0, 0.5, 2.0]))
    assert np.all(v == 0.0)
    assert np.all(c[:, 0] == c[:, 1])


def test_unsorted_queries_rejected():
    with pytest.raises(ValueError):
        frac_max_cont(CHI, 0.5, np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        frac_max_cont(CHI, 1.0, np.array([0.0]))


def test_mollify_trapezoid():
    pl = mollify(CHI, 0.25)
    assert pl.xs == (-0.25, 0.25, 0.75, 1.25)
    assert pl.ys == (0.0, 1.0, 1.0, 0.0)
    assert pl.total_variation() == 2.0
    assert pl(0.0) == pytest.approx(0.5, rel=1e-15)


def test_mollify_variation_never_grows():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(1, 6))
        bps = np.concatenate([[0.0], np.cumsum(rng.uniform(0.2, 1.0, n))])
        f = StepFunction1D(tuple(bps), tuple(rng.uniform(-1, 1, n)))
        for eps in (0.05, 0.2, 0.7):
            fe = mollify(f, eps)
            assert fe.total_variation() <= f.total_variation() + 1e-12
            assert np.max(np.abs(fe.ys)) <= max(abs(v) for v in f.values) + 1e-12


def test_mollify_tiny_eps_close_off_breakpoints():
    fe = mollify(CHI, 1e-6)
    for x in (-0.5, 0.2, 0.8, 1.5):
        assert abs(fe(x) - CHI(x)) < 1e-5


def test_to_step_midpoint_preserves_mass():
    pl = mollify(CHI, 0.3)
    g = pl.to_step(0.01)
    assert g.mass() == pytest.approx(1.0, rel=1e-12)


def test_mollification_convergence_example():
    # the interior-point discrepancy for the indicator is eps/2 up to a
    # second-order correction, so the schedule halves it step by step and the
    # 0.02 threshold is crossed at eps = 0.025
    table = mollification_convergence(CHI, 0.5, (0.2, 0.1, 0.05, 0.025), [-1.0, 0.5, 2.0, 3.0])
    sups = table.sup_discrepancy
    assert sups[0] > sups[1] > sups[2] > sups[3]
    assert sups[2] == pytest.approx(0.024984, abs=2e-5)
    assert sups[3] < 0.02
    assert max(table.step_error_bound) < 1e-3
    # far-field beta=0 sanity: discrepancy at x scales like O(eps/x)
    t0 = mollification_convergence(CHI, 0.0, (0.2, 0.1), [4.0])
    assert t0.sup_discrepancy[1] <= 0.6 * t0.sup_discrepancy[0] + 1e-9


def test_mollification_convergence_zero_function():
    z = StepFunction1D((0.0, 1.0), (0.0,))
    table = mollification_convergence(z, 0.5, (0.2, 0.1), [-1.0, 2.0])
    assert all(s == 0.0 for s in table.sup_discrepancy)


def test_mollification_queries_near_breakpoints_rejected():
    with pytest.raises(ValueError):
        mollification_convergence(CHI, 0.5, (0.2, 0.1), [0.05, 2.0])


def test_step_json_round_trip():
    f = StepFunction1D((0.0, 0.5, 2.0), (1.0, -3.0))
    g = StepFunction1D.from_json(f.to_json())
    assert g == f
