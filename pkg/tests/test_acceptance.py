"""Acceptance suite: every exit criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one pass/fail line
per criterion.  The theorems under test are proved inequalities, so the
suites demand zero violations; empirical constants are held to the
stability thresholds fixed below.
"""

import math
import time

import numpy as np
import pytest

from fracmax.core import EvaluationWindow, LatticeFunction
from fracmax.discrete import (
    frac_max_1d_centered,
    frac_max_1d_uncentered,
    frac_max_nd_centered,
    frac_max_nd_uncentered,
    _max_gauge_between_boxes,
)
from fracmax.experiments import (
    _child_rng,
    extremal_search,
    pointwise_regularization_check,
    random_function_1d,
    random_function_2d,
    run_monotone_segment_trials,
    run_radius_stability_trials,
    scaling_experiment,
    verify_mollification,
    verify_thm1,
    verify_thm2,
)
from fracmax.omega import ConvexBody, count_lattice

import oracles

SEED = 20240808


def _line(num: int, ok: bool, detail: str):
    print(f"CRITERION {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def test_criterion_1_thm2_suite():
    t0 = time.perf_counter()
    rep = verify_thm2(5000, 64, [0.0, 0.25, 0.5, 0.75], SEED)
    dt = time.perf_counter() - t0
    beta0_max = max((t.ratio for t in rep.trials if t.params["beta"] == 0.0), default=0.0)
    ok = rep.passed and not rep.violations and beta0_max <= 1.0 + 1e-9 and dt < 120.0
    _line(
        1,
        ok,
        f"thm2: 5000 trials, 0 violations={not rep.violations}, max ratio {rep.max_ratio:.6f}, "
        f"beta=0 max {beta0_max:.6f} <= 1, runtime {dt:.1f}s < 120s",
    )


def test_criterion_2_thm1_suite():
    t0 = time.perf_counter()
    rep = verify_thm1(1000, 20, [0.25, 0.5, 0.75], SEED)
    dt = time.perf_counter() - t0
    ok = rep.passed and not rep.violations and dt < 300.0
    _line(
        2,
        ok,
        f"thm1: 1000 step functions, 0 violations={not rep.violations}, "
        f"max ratio {rep.max_ratio:.6f} (bounds 8^(1/q)), runtime {dt:.1f}s < 300s",
    )


def test_criterion_3_oracle_equivalence():
    rng = np.random.default_rng(SEED + 1)
    rtol = 1e-12
    worst = 0.0

    # 1-D uncentered and centered: full windows, 500 instances each
    betas_1d = (0.0, 0.3, 0.7)
    for i in range(500):
        length = int(rng.integers(1, 13))
        start = int(rng.integers(-4, 5))
        f = LatticeFunction(1, (start,), (start + length - 1,), rng.uniform(0, 1, length))
        beta = betas_1d[i % 3]
        wlo, whi = start - 4, start + length + 3
        fast_u = frac_max_1d_uncentered(f, beta, EvaluationWindow((wlo,), (whi,))).values.values
        ref_u = oracles.brute_uncentered_1d_profile(f, beta, wlo, whi)
        fast_c = frac_max_1d_centered(f, beta, EvaluationWindow((wlo,), (whi,))).values.values
        ref_c = oracles.brute_centered_1d_profile(f, beta, wlo, whi)
        worst = max(worst, np.max(np.abs(fast_u - ref_u) / np.maximum(ref_u, 1e-300)))
        worst = max(worst, np.max(np.abs(fast_c - ref_c) / np.maximum(ref_c, 1e-300)))
    assert worst <= rtol

    # 2-D centered: 500 instances, sampled points per instance
    bodies = [ConvexBody.linf(2), ConvexBody.lp(2, 2), ConvexBody.lp(1, 2)]
    betas_2d = (0.0, 0.3, 0.7, 1.0, 1.5)
    worst2 = 0.0
    for i in range(500):
        sx, sy = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        f = LatticeFunction(2, (0, 0), (sx - 1, sy - 1), rng.uniform(0, 1, (sx, sy)))
        beta = betas_2d[i % 5]
        body = bodies[i % 3]
        win = EvaluationWindow((-2, -2), (sx + 1, sy + 1))
        res = frac_max_nd_centered(f, body, beta, win)
        cover = _max_gauge_between_boxes(body, f.support_box(), (win.lo, win.hi))
        pts = win.points()
        for p in pts[rng.choice(len(pts), size=4, replace=False)]:
            ref = oracles.brute_centered_nd(f, body, beta, p, cover)
            worst2 = max(worst2, abs(res.values(p) - ref) / max(ref, 1e-300))
    assert worst2 <= rtol

    # 2-D uncentered (K = 2): 500 instances against the direct center/radius table
    worst3 = 0.0
    for i in range(500):
        sx, sy = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        f = LatticeFunction(2, (0, 0), (sx - 1, sy - 1), rng.uniform(0, 1, (sx, sy)))
        beta = (0.0, 0.7, 1.3)[i % 3]
        body = bodies[i % 2]
        win = EvaluationWindow((-2, -2), (sx + 1, sy + 1))
        res = frac_max_nd_uncentered(f, body, beta, win, 2)
        reg_lo = np.minimum(win.lo, f.support_box()[0]) - 1
        reg_hi = np.maximum(win.hi, f.support_box()[1]) + 1
        cover = _max_gauge_between_boxes(
            body, (np.minimum(win.lo, f.support_box()[0]), np.maximum(win.hi, f.support_box()[1])), (reg_lo, reg_hi)
        )
        centers, table = oracles.brute_uncentered_nd_table(f, body, beta, 2, reg_lo, reg_hi, cover)
        pts = win.points()
        for p in pts[rng.choice(len(pts), size=3, replace=False)]:
            best = 0.0
            for x0, (radii, vals) in zip(centers, table):
                gn = body.gauge(np.asarray(p, dtype=float) - x0)
                feas = radii >= gn - 1e-12
                if np.any(feas):
                    best = max(best, float(vals[feas].max()))
            worst3 = max(worst3, abs(res.values(p) - best) / max(best, 1e-300))
    assert worst3 <= rtol

    _line(
        3,
        max(worst, worst2, worst3) <= rtol,
        f"oracle equivalence on 500 instances per operator: max rel dev "
        f"{max(worst, worst2, worst3):.2e} <= 1e-12",
    )


def test_criterion_4_lattice_counts():
    # closed form for the cube body in d = 1, 2, 3
    exact_ok = True
    for d in (1, 2, 3):
        body = ConvexBody.linf(d)
        for r in np.arange(0.0, 20.01, 0.5):
            n = count_lattice(body, np.zeros(d), float(r))
            if n != (2 * math.floor(r) + 1) ** d:
                exact_ok = False
    # Gauss-circle style bound for the Euclidean disk
    disk = ConvexBody.lp(2, 2)
    worst = 0.0
    for r in np.arange(5.0, 200.01, 0.5):
        n = count_lattice(disk, (0.0, 0.0), float(r))
        worst = max(worst, abs(n - math.pi * r * r) / r)
    ok = exact_ok and worst <= 8.0
    _line(
        4,
        ok,
        f"linf counts match (2 floor(r) + 1)^d for d in 1..3; disk error sup "
        f"|N - pi r^2| / r = {worst:.3f} <= 8 on [5, 200]",
    )


def test_criterion_5_scaling_exponent():
    t0 = time.perf_counter()
    rep = scaling_experiment(2, ConvexBody.linf(2), 0.5, 0.0, 4.0 / 3.0, list(range(4, 41)))
    dt = time.perf_counter() - t0
    f = rep.fitted
    ok = (
        abs(f["l1_slope"] - 2.0) <= 1e-9
        and abs(f["grad_l1_slope"] - 1.0) <= 1e-9
        and abs(f["maximal_slope"] - 1.0) <= 0.15
        and dt < 600.0
    )
    _line(
        5,
        ok,
        f"scaling: |f|_1 slope {f['l1_slope']:.12f} (= d), grad slope {f['grad_l1_slope']:.12f} (= d-1), "
        f"maximal slope {f['maximal_slope']:.4f} within 1.0 +- 0.15, runtime {dt:.1f}s < 600s",
    )


def test_criterion_6_pointwise_regularization():
    rep = pointwise_regularization_check(500, 2, ConvexBody.linf(2), 1.5, SEED + 2, support_side=4, window_margin=10)
    f = rep.fitted
    ok = rep.passed and math.isfinite(f["empirical_sup"]) and f["second_half_max"] < 1.1 * f["first_half_max"] + 1e-9
    _line(
        6,
        ok,
        f"pointwise regularization (beta=1.5, d=2, 500 trials): sup {f['empirical_sup']:.4f} finite, "
        f"halves {f['first_half_max']:.4f} / {f['second_half_max']:.4f} stable within 10%",
    )


def test_criterion_7_mollification_convergence():
    rep = verify_mollification(SEED + 3, betas=(0.25, 0.5), eps_schedule=(0.2, 0.1, 0.05, 0.025), n_random=2)
    finals = [t.params["sups"][-1] for t in rep.trials]
    ok = rep.passed and all(s < 0.02 for s in finals)
    _line(
        7,
        ok,
        f"mollification: monotone decrease for chi and 2 random step functions at beta 0.25/0.5, "
        f"final sup discrepancies {['%.4f' % s for s in finals]} all < 0.02",
    )


def test_criterion_8_lemma_diagnostics():
    rep_m = run_monotone_segment_trials(1000, SEED + 4)
    rep_r = run_radius_stability_trials(1000, SEED + 5)
    ok = rep_m.passed and not rep_m.violations and rep_r.passed and not rep_r.violations
    _line(
        8,
        ok,
        f"monotone-segment: {len(rep_m.trials)} trials 0 violations={not rep_m.violations}; "
        f"radius-stability: {len(rep_r.trials)} trials 0 violations={not rep_r.violations}",
    )


def test_criterion_9_extremal_search():
    res0 = extremal_search("thm2", 0.0, 32, 300, 4, SEED + 6)
    res5a = extremal_search("thm2", 0.5, 32, 300, 4, SEED + 6)
    res5b = extremal_search("thm2", 0.5, 32, 300, 4, SEED + 6)
    ok = (
        abs(res0.best_ratio - 1.0) <= 1e-9
        and 0.0 < res5a.best_ratio <= 2.0
        and res5a.best_ratio == res5b.best_ratio
        and res5a.witness == res5b.witness
    )
    _line(
        9,
        ok,
        f"search: beta=0 attains {res0.best_ratio:.12f} (within 1e-9 of 1); "
        f"beta=0.5 best {res5a.best_ratio:.6f} in (0, 2], bit-identical on replay",
    )
