"""Riesz q-variation, discrete and continuous.

The discrete q-variation of f: Z -> R is the l^q norm of consecutive
differences.  The continuous Riesz q-variation of g: R -> R is the
supremum over finite partitions of sum |dg|^q / |dx|^(q-1); for piecewise
linear g the breakpoint partition attains it (splitting a segment of
constant slope leaves the sum unchanged, refining elsewhere only
increases it), and it equals the L^q norm of g'.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta

from .core import EvaluationWindow, LatticeFunction


@dataclass(frozen=True)
class Partition:
    """Strictly increasing finite list of at least two real points."""

    points: tuple

    def __post_init__(self):
        pts = tuple(float(x) for x in self.points)
        if len(pts) < 2:
            raise ValueError("a partition needs at least two points")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("partition points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    def array(self) -> np.ndarray:
        return np.asarray(self.points)


@dataclass(frozen=True)
class VariationValue:
    """A q-variation value plus a bound on what the window may have missed.

    value and tail_bound carry the same units: the full-line variation is at
    most (value^q + tail_bound^q)^(1/q).  An infinite variation is reported
    through the flag, never as a float infinity inside arithmetic.
    """

    value: float
    q: float
    tail_bound: float = 0.0
    infinite: bool = False

    def upper_bound(self) -> float:
        if self.infinite:
            raise ValueError("variation is flagged infinite")
        if self.tail_bound == 0.0:
            return self.value
        return float((self.value**self.q + self.tail_bound**self.q) ** (1.0 / self.q))

    def to_json_obj(self) -> dict:
        return {
            "value": float(self.value),
            "q": float(self.q),
            "tail_bound": float(self.tail_bound),
            "infinite": bool(self.infinite),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @staticmethod
    def from_json_obj(obj: dict) -> "VariationValue":
        return VariationValue(obj["value"], obj["q"], obj.get("tail_bound", 0.0), obj.get("infinite", False))

    @staticmethod
    def from_json(s: str) -> "VariationValue":
        return VariationValue.from_json_obj(json.loads(s))


def _check_q(q: float) -> float:
    q = float(q)
    if q < 1.0:
        raise ValueError(f"q must be >= 1, got {q}")
    return q


def var_q_discrete(f: LatticeFunction, q: float, window: EvaluationWindow) -> VariationValue:
    """l^q norm of consecutive differences of f over the window.

    The window is padded by one cell on each side so that, for f vanishing
    outside it, the result is the exact full-line variation (tail_bound 0).
    Monotone-tail bounds for maximal-function profiles are provided by
    `maximal_profile_variation`.
    """
    q = _check_q(q)
    if f.dim != 1 or window.dim != 1:
        raise ValueError("var_q_discrete requires dimension 1")
    lo, hi = window.lo[0] - 1, window.hi[0] + 1
    vals = f.materialize(EvaluationWindow((lo,), (hi,)))
    diffs = np.abs(np.diff(vals))
    return VariationValue(float(np.sum(diffs**q) ** (1.0 / q)), q, 0.0)


def monotone_tail_qpower(boundary_value: float, mass: float, beta: float, dist: int, q: float) -> float:
    """Upper bound for the q-power variation of a maximal-function tail.

    Beyond a window edge at lattice distance `dist` from the support hull,
    the 1-D uncentered fractional maximal function of nonnegative data of
    total mass `mass` is monotone toward zero.  For q = 1 the tail
    variation telescopes to the boundary value exactly; for q > 1 each step
    is at most (1-beta) * mass * j^(beta-2) at distance j, giving a
    Hurwitz-zeta bound, and (sum |step|)^q >= sum |step|^q gives the crude
    boundary_value^q alternative.  Returns the smaller of the two.
    """
    q = _check_q(q)
    if dist < 1:
        raise ValueError("window must extend at least one cell past the support")
    if q == 1.0:
        return float(boundary_value)
    crude = float(boundary_value) ** q
    s = (2.0 - beta) * q
    deriv = ((1.0 - beta) * mass) ** q * float(zeta(s, dist + 1))
    return min(crude, deriv)


def maximal_profile_variation(
    values: np.ndarray, q: float, beta: float, mass: float, dist_lo: int, dist_hi: int
) -> VariationValue:
    """q-variation of a maximal-function profile with monotone-tail bounds.

    values holds the profile on a window extending dist_lo (dist_hi) cells
    past the low (high) end of the support hull.  The window part is exact;
    tail_bound covers everything outside.
    """
    q = _check_q(q)
    window_qpow = float(np.sum(np.abs(np.diff(values)) ** q))
    t_lo = monotone_tail_qpower(float(values[0]), mass, beta, dist_lo, q)
    t_hi = monotone_tail_qpower(float(values[-1]), mass, beta, dist_hi, q)
    return VariationValue(window_qpow ** (1.0 / q), q, (t_lo + t_hi) ** (1.0 / q))


_REFINE_RE = re.compile(r"refine\((\d+)\)")


def _riesz_sum(xs: np.ndarray, ys: np.ndarray, q: float) -> float:
    dx = np.diff(xs)
    dy = np.abs(np.diff(ys))
    return float(np.sum(dy**q / dx ** (q - 1.0)))


def var_q_partition(g, q: float, partition="breakpoints") -> VariationValue:
    """Riesz sum of a piecewise-linear function over a partition.

    partition is a Partition, the string "breakpoints" (use g's own nodes) or
    "refine(n)" (insert n uniform interior points per piece; the value is
    unchanged for piecewise-linear g).  Points outside g's node span use the
    constant extension.
    """
    q = _check_q(q)
    if isinstance(partition, Partition):
        xs = partition.array()
    elif partition == "breakpoints":
        xs = np.asarray(g.xs)
    else:
        m = _REFINE_RE.fullmatch(str(partition))
        if not m:
            raise ValueError(f"unknown partition spec {partition!r}")
        n = int(m.group(1))
        nodes = np.asarray(g.xs)
        pieces = [np.linspace(a, b, n + 2)[:-1] for a, b in zip(nodes[:-1], nodes[1:])]
        xs = np.concatenate(pieces + [nodes[-1:]])
    if len(xs) < 2:
        raise ValueError("partition must contain at least two points")
    ys = g.at(xs)
    return VariationValue(_riesz_sum(xs, ys, q) ** (1.0 / q), q, 0.0)


def riesz_derivative_norm(g, q: float) -> float:
    """L^q norm of g' for piecewise-linear g: (sum |slope|^q * length)^(1/q)."""
    q = _check_q(q)
    xs = np.asarray(g.xs)
    ys = np.asarray(g.ys)
    dx = np.diff(xs)
    slopes = np.diff(ys) / dx
    return float(np.sum(np.abs(slopes) ** q * dx) ** (1.0 / q))


def var_q_adaptive(eval_fn, q: float, initial_points, rel_tol: float = 1e-6, max_points: int = 8193) -> VariationValue:
    """Riesz q-variation of a sampled function by refining until stable.

    eval_fn maps a sorted point array to function values.  Midpoints are
    inserted (globally) until the Riesz sum grows by less than rel_tol
    relative, or max_points is reached.  Every finite partition lower-bounds
    the true q-variation, so the result is a certified lower bound.
    """
    q = _check_q(q)
    xs = np.unique(np.asarray(initial_points, dtype=np.float64))
    if len(xs) < 2:
        raise ValueError("need at least two initial points")
    ys = eval_fn(xs)
    total = _riesz_sum(xs, ys, q)
    while len(xs) < max_points:
        mids = 0.5 * (xs[:-1] + xs[1:])
        my = eval_fn(mids)
        nxs = np.empty(len(xs) + len(mids))
        nys = np.empty_like(nxs)
        nxs[0::2] = xs
        nxs[1::2] = mids
        nys[0::2] = ys
        nys[1::2] = my
        new_total = _riesz_sum(nxs, nys, q)
        xs, ys = nxs, nys
        if new_total <= total * (1.0 + rel_tol):
            total = max(total, new_total)
            break
        total = new_total
    return VariationValue(total ** (1.0 / q), q, 0.0)
