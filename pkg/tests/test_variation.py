import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracmax.continuous import PiecewiseLinear1D
from fracmax.core import EvaluationWindow, LatticeFunction
from fracmax.variation import (
    Partition,
    VariationValue,
    maximal_profile_variation,
    monotone_tail_qpower,
    riesz_derivative_norm,
    var_q_adaptive,
    var_q_discrete,
    var_q_partition,
)

W1 = lambda a, b: EvaluationWindow((a,), (b,))


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition((1.0,))
    with pytest.raises(ValueError):
        Partition((0.0, 0.0))
    assert Partition((0.0, 1.0, 2.5)).points == (0.0, 1.0, 2.5)


def test_var_q_discrete_examples():
    d0 = LatticeFunction.delta(1)
    assert var_q_discrete(d0, 1, W1(-3, 3)).value == 2.0
    assert var_q_discrete(d0, 2, W1(-3, 3)).value == pytest.approx(math.sqrt(2), rel=1e-15)
    with pytest.raises(ValueError):
        var_q_discrete(d0, 0.8, W1(-3, 3))


def test_var_q_discrete_telescoping_profile():
    # g(n) = 1/(|n|+1) on [-W, W]: total variation telescopes to 2(1 - 1/(W+1))
    for w in (5, 20, 60):
        ns = np.arange(-w, w + 1)
        g = LatticeFunction(1, (-w,), (w,), 1.0 / (np.abs(ns) + 1.0))
        # window chosen so the implicit zero outside is NOT counted: restrict
        # to interior differences by measuring on [-W, W-1] jumps only
        vals = 1.0 / (np.abs(ns) + 1.0)
        inner = float(np.sum(np.abs(np.diff(vals))))
        assert inner == pytest.approx(2.0 * (1.0 - 1.0 / (w + 1.0)), rel=1e-12)
        # var_q_discrete pads with zeros, adding the two boundary values
        padded = var_q_discrete(g, 1, W1(-w, w)).value
        assert padded == pytest.approx(inner + 2.0 / (w + 1.0), rel=1e-12)


def test_ramp_examples():
    ramp = PiecewiseLinear1D((0.0, 1.0), (0.0, 1.0))
    assert var_q_partition(ramp, 2, "breakpoints").value == pytest.approx(1.0, rel=1e-15)
    assert var_q_partition(ramp, 1, "breakpoints").value == pytest.approx(1.0, rel=1e-15)
    assert riesz_derivative_norm(ramp, 2) == pytest.approx(1.0, rel=1e-15)
    two = PiecewiseLinear1D((0.0, 0.5, 1.0), (0.0, 1.0, 0.0))
    assert riesz_derivative_norm(two, 2) == pytest.approx(2.0, rel=1e-15)


def test_refinement_invariance_piecewise_linear():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(2, 7))
        xs = np.cumsum(rng.uniform(0.2, 1.0, n))
        ys = rng.uniform(-1, 1, n)
        g = PiecewiseLinear1D(tuple(xs), tuple(ys))
        q = float(rng.uniform(1.0, 4.0))
        base = var_q_partition(g, q, "breakpoints").value
        ref = var_q_partition(g, q, f"refine({int(rng.integers(1, 6))})").value
        assert ref == pytest.approx(base, rel=1e-12)
        assert riesz_derivative_norm(g, q) == pytest.approx(base, rel=1e-12)


def test_partition_refinement_monotone():
    rng = np.random.default_rng(1)
    g = PiecewiseLinear1D((0.0, 0.7, 1.2, 2.0), (0.0, 1.0, -0.5, 0.3))
    for _ in range(50):
        pts = np.unique(rng.uniform(-0.5, 2.5, 6))
        if len(pts) < 3:
            continue
        coarse = var_q_partition(g, 2, Partition(tuple(pts))).value
        finer = np.unique(np.concatenate([pts, rng.uniform(-0.5, 2.5, 4)]))
        fine = var_q_partition(g, 2, Partition(tuple(finer))).value
        assert fine >= coarse - 1e-12


def test_q1_equals_classical_total_variation():
    g = PiecewiseLinear1D((0.0, 1.0, 2.0, 3.0), (0.0, 2.0, -1.0, 0.5))
    assert var_q_partition(g, 1, "breakpoints").value == pytest.approx(g.total_variation(), rel=1e-14)


def test_discrete_continuous_consistency():
    # unit-spaced linear interpolant of a lattice function: Riesz sum at the
    # integers equals the discrete q-variation
    rng = np.random.default_rng(2)
    vals = rng.uniform(0, 1, 9)
    f = LatticeFunction(1, (0,), (8,), vals)
    padded = np.concatenate([[0.0], vals, [0.0]])
    g = PiecewiseLinear1D(tuple(range(-1, 10)), tuple(padded))
    for q in (1.0, 1.7, 3.0):
        disc = var_q_discrete(f, q, W1(0, 8)).value
        cont = var_q_partition(g, q, "breakpoints").value
        assert cont == pytest.approx(disc, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 5.0), st.floats(0.0, 0.9), st.integers(2, 200), st.floats(1.0, 4.0))
def test_monotone_tail_bound_dominates_true_tail(mass, beta, dist, q):
    # worst-case admissible tail: the window edge sits dist cells past the
    # support, so the j-th difference lives at distance dist + 1 + j
    j = np.arange(0, 4000)
    h = mass / (dist + 1.0 + j) ** (1.0 - beta)
    tail_true = float(np.sum(np.abs(np.diff(h)) ** q))
    bound = monotone_tail_qpower(h[0], mass, beta, dist, q)
    assert tail_true <= bound + 1e-12


def test_variation_value_json_and_upper():
    v = VariationValue(2.0, 2.0, 1.0)
    assert v.upper_bound() == pytest.approx(math.sqrt(5.0), rel=1e-15)
    again = VariationValue.from_json(v.to_json())
    assert again == v
    inf = VariationValue(1.0, 2.0, 0.0, infinite=True)
    with pytest.raises(ValueError):
        inf.upper_bound()


def test_var_q_adaptive_converges_to_derivative_norm():
    g = PiecewiseLinear1D((0.0, 1.0, 2.0), (0.0, 1.0, 0.0))
    vv = var_q_adaptive(lambda xs: g.at(xs), 2.0, np.linspace(-1, 3, 17))
    assert vv.value == pytest.approx(riesz_derivative_norm(g, 2.0), rel=1e-4)
    assert vv.value <= riesz_derivative_norm(g, 2.0) + 1e-12


def test_maximal_profile_variation_q1_exact():
    # monotone decay profile: full-line variation equals window + boundaries
    ns = np.arange(-30, 31)
    vals = 1.0 / (np.abs(ns) + 1.0)
    vv = maximal_profile_variation(vals, 1.0, 0.0, 1.0, 30, 30)
    assert vv.upper_bound() == pytest.approx(2.0, rel=1e-12)
