"""The 1-D continuous uncentered fractional maximal operator on step functions.

For a compactly supported step function the average over [u, v] is
(F(v) - F(u)) / (v - u)^(1 - beta) with F piecewise linear, so on each
rectangle of breakpoint cells the maximization is exact: the optimum is a
cell corner, an edge stationary point (a linear solve, since F is affine
per cell), or lies on the equal-slope interior curve.  Optimal intervals
never extend past the support of |f|.

Mollification uses the box kernel, which keeps all arithmetic piecewise
linear and exact while preserving the variation bound Var(f_eps) <= Var(f).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

_PAIR_CHUNK = 200_000


@dataclass(frozen=True)
class StepFunction1D:
    """Compactly supported step function: value v_i on [b_{i-1}, b_i), zero outside."""

    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        bps = tuple(float(x) for x in self.breakpoints)
        vals = tuple(float(x) for x in self.values)
        if len(bps) != len(vals) + 1 or len(vals) < 1:
            raise ValueError("need M+1 breakpoints for M >= 1 piece values")
        if any(b <= a for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)

    @staticmethod
    def indicator(a: float, b: float) -> "StepFunction1D":
        return StepFunction1D((a, b), (1.0,))

    @property
    def support(self) -> tuple:
        return self.breakpoints[0], self.breakpoints[-1]

    def __call__(self, x: float) -> float:
        return float(self.at(np.asarray([x]))[0])

    def at(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        e = np.asarray(self.breakpoints)
        idx = np.searchsorted(e, xs, side="right") - 1
        out = np.zeros_like(xs)
        inside = (idx >= 0) & (idx < len(self.values)) & (xs < e[-1])
        out[inside] = np.asarray(self.values)[idx[inside]]
        return out

    def one_sided(self, x: float) -> tuple:
        """(f(x-), f(x+)) limits."""
        e = np.asarray(self.breakpoints)
        v = np.asarray(self.values)
        left = right = 0.0
        i = np.searchsorted(e, x, side="left") - 1
        if 0 <= i < len(v) and x > e[0] and x <= e[-1]:
            left = float(v[i])
        j = np.searchsorted(e, x, side="right") - 1
        if 0 <= j < len(v) and x < e[-1]:
            right = float(v[j])
        return left, right

    def _prefix(self, absolute: bool) -> np.ndarray:
        v = np.abs(self.values) if absolute else np.asarray(self.values)
        seg = v * np.diff(self.breakpoints)
        return np.concatenate([[0.0], np.cumsum(seg)])

    def integral_to(self, xs, absolute: bool = False) -> np.ndarray:
        """F(x) = integral of f (or |f|) from the left support edge, clamped outside."""
        return np.interp(np.asarray(xs, dtype=np.float64), self.breakpoints, self._prefix(absolute))

    def total_variation(self) -> float:
        v = np.asarray(self.values)
        return float(abs(v[0]) + np.sum(np.abs(np.diff(v))) + abs(v[-1]))

    def mass(self) -> float:
        return float(self._prefix(absolute=True)[-1])

    def dilated(self, t: float) -> "StepFunction1D":
        """f(x / t): stretches the support by t > 0."""
        if t <= 0:
            raise ValueError("dilation factor must be positive")
        return StepFunction1D(tuple(t * b for b in self.breakpoints), self.values)

    def to_json_obj(self) -> dict:
        return {"breakpoints": list(self.breakpoints), "values": list(self.values)}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @staticmethod
    def from_json_obj(obj: dict) -> "StepFunction1D":
        return StepFunction1D(tuple(obj["breakpoints"]), tuple(obj["values"]))

    @staticmethod
    def from_json(s: str) -> "StepFunction1D":
        return StepFunction1D.from_json_obj(json.loads(s))


@dataclass(frozen=True)
class PiecewiseLinear1D:
    """Piecewise linear nodes (x_i, y_i), constant extension outside."""

    xs: tuple
    ys: tuple

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        ys = tuple(float(y) for y in self.ys)
        if len(xs) != len(ys) or len(xs) < 2:
            raise ValueError("need at least two nodes with matching lengths")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("node x coordinates must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    def at(self, xs) -> np.ndarray:
        return np.interp(np.asarray(xs, dtype=np.float64), self.xs, self.ys)

    def __call__(self, x: float) -> float:
        return float(self.at(np.asarray([x]))[0])

    def total_variation(self) -> float:
        return float(np.sum(np.abs(np.diff(self.ys))))

    def max_slope(self) -> float:
        s = np.diff(self.ys) / np.diff(self.xs)
        return float(np.max(np.abs(s))) if len(s) else 0.0

    def to_step(self, max_width: float) -> StepFunction1D:
        """Midpoint-sampled step approximation, subdividing sloped pieces.

        Midpoint sampling integrates each linear sub-piece exactly, so the
        prefix integrals of the approximation match at sub-piece edges.
        """
        if max_width <= 0:
            raise ValueError("max_width must be positive")
        xs = np.asarray(self.xs)
        ys = np.asarray(self.ys)
        edges = [np.asarray([xs[0]])]
        vals = []
        for a, b, ya, yb in zip(xs[:-1], xs[1:], ys[:-1], ys[1:]):
            if ya == yb:
                edges.append(np.asarray([b]))
                vals.append(np.asarray([ya]))
                continue
            n_sub = max(1, int(math.ceil((b - a) / max_width)))
            sub = np.linspace(a, b, n_sub + 1)
            mids = 0.5 * (sub[:-1] + sub[1:])
            edges.append(sub[1:])
            vals.append(np.interp(mids, [a, b], [ya, yb]))
        return StepFunction1D(tuple(np.concatenate(edges)), tuple(np.concatenate(vals)))

    def to_json_obj(self) -> dict:
        return {"xs": list(self.xs), "ys": list(self.ys)}


# ---------------------------------------------------------------------------
# the operator
# ---------------------------------------------------------------------------


def average_interval(f: StepFunction1D, u: float, v: float, beta: float, x: float = None) -> float:
    """A(u, v) = (integral of |f|) / (v - u)^(1 - beta); u == v is the degenerate limit."""
    if v < u:
        raise ValueError("need u <= v")
    if v == u:
        if beta > 0:
            return 0.0
        if x is None:
            x = u
        return max(f.one_sided(x))
    mass = float(f.integral_to(v, absolute=True) - f.integral_to(u, absolute=True))
    return mass * (v - u) ** (beta - 1.0)


def frac_max_cont(f: StepFunction1D, beta: float, xs):
    """Uncentered continuous fractional maximal function at sorted query points.

    Returns (values, certificates) where certificates[i] = (u, v) is the
    optimal interval containing xs[i] (ties: smallest v - u, then smallest
    u; a zero-length certificate denotes the degenerate limit).
    """
    if not (0.0 <= beta < 1.0):
        raise ValueError(f"beta must lie in [0, 1), got {beta}")
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 1 or len(xs) == 0:
        raise ValueError("queries must form a nonempty 1-D array")
    if np.any(np.diff(xs) < 0):
        raise ValueError("queries must be sorted ascending")

    e_real = np.asarray(f.breakpoints)
    w_real = np.abs(np.asarray(f.values))
    fpre = np.concatenate([[0.0], np.cumsum(w_real * np.diff(e_real))])

    # Zero-mass outer cells let queries outside the support place an
    # endpoint at the query itself.
    left = min(e_real[0], xs.min()) - 1.0
    right = max(e_real[-1], xs.max()) + 1.0
    e = np.concatenate([[left], e_real, [right]])
    w = np.concatenate([[0.0], w_real, [0.0]])
    fleft = np.concatenate([[0.0], fpre[:-1], [fpre[-1]]])
    m = len(w)

    best_val = np.zeros(len(xs))
    best_u = xs.copy()
    best_w = np.zeros(len(xs))

    if beta == 0.0:
        sides = np.array([max(f.one_sided(float(x))) for x in xs])
        best_val = np.maximum(best_val, sides)

    one_m_beta = 1.0 - beta

    def run(q_idx: np.ndarray, jj: np.ndarray, ll: np.ndarray):
        """Maximize over the given cell pairs for the given query subset."""
        if len(q_idx) == 0 or len(jj) == 0:
            return
        xq = xs[q_idx]
        bval = best_val[q_idx]
        bu = best_u[q_idx]
        bw = best_w[q_idx]
        n_q = len(xq)
        chunk = max(1, _PAIR_CHUNK // n_q)

        def fold(cu, fu, cv, fv, feas):
            nonlocal bval, bu, bw
            width = cv - cu
            ok = feas & (width > 0)
            with np.errstate(divide="ignore", invalid="ignore"):
                val = np.where(ok, (fv - fu) * np.where(ok, width, 1.0) ** (beta - 1.0), -np.inf)
            val_q = val.max(axis=1)
            pick = val.argmax(axis=1)
            rows = np.arange(n_q)
            cu_q = cu[rows, pick]
            w_q = width[rows, pick]
            better = (val_q > bval) | ((val_q == bval) & ((w_q < bw) | ((w_q == bw) & (cu_q < bu))))
            bval = np.where(better, val_q, bval)
            bu = np.where(better, cu_q, bu)
            bw = np.where(better, w_q, bw)

        for start in range(0, len(jj), chunk):
            sl = slice(start, min(start + chunk, len(jj)))
            j = jj[sl]
            l = ll[sl]
            su = w[j][None, :]
            sv = w[l][None, :]
            eu = e[j][None, :]
            ev = e[l][None, :]
            flu = fleft[j][None, :]
            flv = fleft[l][None, :]
            au = np.broadcast_to(eu, (n_q, len(j)))
            bu_ = np.minimum(e[j + 1][None, :], xq[:, None])
            av = np.maximum(ev, xq[:, None])
            bv_ = np.broadcast_to(e[l + 1][None, :], (n_q, len(j)))
            f_au = np.broadcast_to(flu, au.shape)
            f_bu = flu + su * (bu_ - eu)
            f_av = flv + sv * (av - ev)
            f_bv = flv + sv * (bv_ - ev)
            feas = (au <= bu_) & (av <= bv_)

            for cu, fu in ((au, f_au), (bu_, f_bu)):
                for cv, fv in ((av, f_av), (bv_, f_bv)):
                    fold(cu, fu, cv, fv, feas)

            if beta > 0.0:
                with np.errstate(divide="ignore", invalid="ignore"):
                    # stationary u at fixed v: s_u (v - u) = (1 - beta) (F(v) - F(u))
                    for cv, fv in ((av, f_av), (bv_, f_bv)):
                        ustar = (su * cv - one_m_beta * (fv - flu) - one_m_beta * su * eu) / (su * beta)
                        ok_u = feas & (su > 0) & (ustar >= au) & (ustar <= bu_)
                        fu = flu + su * (ustar - eu)
                        fold(np.where(ok_u, ustar, 0.0), fu, np.where(ok_u, cv, 1.0), fv, ok_u)
                    # stationary v at fixed u: s_v (v - u) = (1 - beta) (F(v) - F(u))
                    for cu, fu in ((au, f_au), (bu_, f_bu)):
                        vstar = (sv * cu + one_m_beta * (flv - sv * ev - fu)) / (sv * beta)
                        ok_v = feas & (sv > 0) & (vstar >= av) & (vstar <= bv_)
                        fv = flv + sv * (vstar - ev)
                        fold(np.where(ok_v, cu, 0.0), fu, np.where(ok_v, vstar, 1.0), fv, ok_v)
                    # equal slopes: interior critical curve, value constant along it
                    coff = (flv - sv * ev) - (flu - su * eu)
                    wstar = one_m_beta * coff / (su * beta)
                    eqs = feas & (su == sv) & (su > 0) & (wstar > 0)
                    u0 = np.maximum(au, av - np.where(eqs, wstar, 0.0))
                    v0 = u0 + wstar
                    okc = eqs & (u0 <= bu_) & (v0 >= av) & (v0 <= bv_)
                    fu = flu + su * (u0 - eu)
                    fv = flv + sv * (v0 - ev)
                    fold(np.where(okc, u0, 0.0), fu, np.where(okc, v0, 1.0), fv, okc)

        best_val[q_idx] = bval
        best_u[q_idx] = bu
        best_w[q_idx] = bw

    q_all = np.arange(len(xs))
    left_q = q_all[xs <= e_real[0]]
    right_q = q_all[xs >= e_real[-1]]
    mid_q = q_all[(xs > e_real[0]) & (xs < e_real[-1])]

    # queries left of the support can only place u in the outer-left cell,
    # queries right of it can only place v in the outer-right cell
    full_j, full_l = np.triu_indices(m)
    run(mid_q, full_j, full_l)
    run(left_q, np.zeros(m, dtype=np.int64), np.arange(m))
    run(right_q, np.arange(m), np.full(m, m - 1, dtype=np.int64))

    certs = np.stack([best_u, best_u + best_w], axis=1)
    return best_val, certs


def mollify(f: StepFunction1D, eps: float) -> PiecewiseLinear1D:
    """Convolution with the box kernel chi_[-eps, eps] / (2 eps), exact.

    The result is Lipschitz and piecewise linear with nodes at b_i +- eps,
    satisfies |f_eps| <= max |f| and Var(f_eps) <= Var(f).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    e = np.asarray(f.breakpoints)
    nodes = np.unique(np.concatenate([e - eps, e + eps]))
    fs = f.integral_to(nodes + eps) - f.integral_to(nodes - eps)
    return PiecewiseLinear1D(tuple(nodes), tuple(fs / (2.0 * eps)))


@dataclass(frozen=True)
class MollificationTable:
    """Per-epsilon sup discrepancies |M f_eps - M f| over the query points."""

    beta: float
    eps: tuple
    queries: tuple
    sup_discrepancy: tuple
    per_query: tuple  # rows follow eps
    step_error_bound: tuple

    def to_json_obj(self) -> dict:
        return {
            "beta": self.beta,
            "eps": list(self.eps),
            "queries": list(self.queries),
            "sup_discrepancy": list(self.sup_discrepancy),
            "per_query": [list(r) for r in self.per_query],
            "step_error_bound": list(self.step_error_bound),
        }


def mollification_convergence(f: StepFunction1D, beta: float, eps_schedule, queries) -> MollificationTable:
    """Pointwise convergence table of M f_eps toward M f at continuity points.

    Queries must avoid the breakpoints of f by at least the largest epsilon.
    Each mollified function is refined into a step function fine enough that
    the reported discrepancy dominates the refinement error (also returned).
    """
    eps_schedule = [float(x) for x in eps_schedule]
    if any(x <= 0 for x in eps_schedule):
        raise ValueError("epsilons must be positive")
    qs = np.asarray(sorted(float(x) for x in queries))
    bps = np.asarray(f.breakpoints)
    dmin = np.abs(qs[:, None] - bps[None, :]).min()
    if dmin + 1e-12 < max(eps_schedule):
        raise ValueError("queries must stay at least max(eps) away from the breakpoints of f")

    base_vals, _ = frac_max_cont(f, beta, qs)
    rows, sups, errs = [], [], []
    span = f.support[1] - f.support[0]
    for eps in eps_schedule:
        fe = mollify(f, eps)
        width = min(1e-3 * (span + 2 * eps), eps / 100.0)
        g = fe.to_step(width)
        vals, _ = frac_max_cont(g, beta, qs)
        disc = np.abs(vals - base_vals)
        rows.append(tuple(float(x) for x in disc))
        sups.append(float(disc.max()))
        errs.append(float(fe.max_slope() * width ** (1.0 + beta)))
    return MollificationTable(
        beta=float(beta),
        eps=tuple(eps_schedule),
        queries=tuple(float(x) for x in qs),
        sup_discrepancy=tuple(sups),
        per_query=tuple(rows),
        step_error_bound=tuple(errs),
    )
