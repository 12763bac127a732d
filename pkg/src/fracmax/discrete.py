"""Discrete fractional maximal operators on Z^d.

Implements the 1-D uncentered operator over asymmetric windows, the
d-dimensional centered and uncentered operators whose balls are dilates of
a convex body, the argmax radius sets at a point, and the discrete
fractional integral.  Every evaluation comes with an optimality
certificate (the window or center/radius attaining the supremum), and all
operators act on |f| internally.

For finitely supported data the supremum is a finite maximization: once a
ball covers the support, growing it further only increases the
normalization, so candidate radii can be truncated at the cover radius.
The fast paths use prefix sums over sorted enumerations; brute-force
oracles live in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EvaluationWindow, LatticeFunction
from .omega import ConvexBody, ball_points_and_gauges

# A certificate must reproduce its value to this relative tolerance.
CERT_REL_TOL = 1e-12
# Radii tie within this relative tolerance when collecting argmax sets.
TIE_REL_TOL = 1e-10

_GATHER_CHUNK = 2 * 10**7


@dataclass(frozen=True)
class MaximalResult:
    """Maximal-function values over a window plus per-point certificates.

    mode is "centered" or "uncentered"; exact is False only for the
    uncentered operator in d >= 2, where values are a certified lower bound
    (nondecreasing in the center refinement K).

    Certificates, aligned with the raster order of the window:
      - 1-D uncentered: integer arrays cert_r, cert_s (window [n-r, n+s]);
      - centered: float array cert_r (ball radius at the point itself);
      - uncentered d >= 2: cert_x0 (real centers, shape (*window, d)) and cert_r.
    """

    values: LatticeFunction
    beta: float
    mode: str
    exact: bool
    cert_r: np.ndarray
    cert_s: np.ndarray = None
    cert_x0: np.ndarray = None

    def window(self) -> EvaluationWindow:
        return self.values.window()

    def certificate(self, n) -> dict:
        win = self.window()
        n = np.atleast_1d(np.asarray(n, dtype=np.int64))
        idx = tuple(n - np.asarray(win.lo))
        out = {"n": [int(x) for x in n], "r": float(self.cert_r[idx])}
        if self.cert_s is not None:
            out["s"] = float(self.cert_s[idx])
        if self.cert_x0 is not None:
            out["x0"] = [float(x) for x in self.cert_x0[idx]]
        return out

    def to_json_obj(self) -> dict:
        win = self.window()
        certs = [self.certificate(p) for p in win.points()]
        return {
            "values": self.values.to_json_obj(),
            "certificates": certs,
            "beta": float(self.beta),
            "mode": self.mode,
            "exact": bool(self.exact),
        }


@dataclass(frozen=True)
class RadiusSet:
    """All candidate radii realizing the centered supremum at a point.

    Radii are the sorted gauge values whose average ties the maximum within
    TIE_REL_TOL; the first element is the minimal attaining radius.
    """

    point: tuple
    radii: tuple
    value: float


# ---------------------------------------------------------------------------
# averages (certificate verification and oracles build on these)
# ---------------------------------------------------------------------------


def average_1d(f: LatticeFunction, n: int, r: int, s: int, beta: float) -> float:
    """(r+s+1)^(beta-1) * sum_{k=-r..s} |f(n+k)|."""
    if r < 0 or s < 0:
        raise ValueError("window radii must be nonnegative")
    ks = np.arange(n - r, n + s + 1)
    total = float(np.sum(np.abs(f.at(ks[:, None]))))
    return total * (r + s + 1.0) ** (beta - 1.0)


def average_ball(f: LatticeFunction, body: ConvexBody, x0, r: float, beta: float) -> float:
    """N(x0,r)^(beta/d - 1) * sum over the ball of |f|; requires a nonempty ball."""
    pts, _ = ball_points_and_gauges(body, x0, r)
    n = len(pts)
    if n == 0:
        raise ValueError("ball contains no lattice points")
    total = float(np.sum(np.abs(f.at(pts))))
    return total * float(np.exp((beta / f.dim - 1.0) * np.log(n)))


def average_centered(f: LatticeFunction, body: ConvexBody, n, r: float, beta: float) -> float:
    return average_ball(f, body, np.asarray(n, dtype=np.float64), r, beta)


# ---------------------------------------------------------------------------
# 1-D operators
# ---------------------------------------------------------------------------


def _support_1d(f: LatticeFunction):
    sup = f.support_box()
    if sup is None:
        return None
    lo, hi = sup[0][0], sup[1][0]
    g = np.abs(f.materialize(EvaluationWindow((lo,), (hi,))))
    return lo, hi, g


def _uncentered_1d_arrays(g: np.ndarray, lo: int, wlo: int, whi: int, beta: float, want_certs: bool):
    """Core 1-D uncentered evaluation on the integer window [wlo, whi].

    g holds |f| over the support hull starting at lo.  Returns values and,
    when requested, the minimal certificates (r, s) under the (r+s, r)
    ordering.
    """
    s_len = len(g)
    hi = lo + s_len - 1
    pref = np.concatenate([[0.0], np.cumsum(g)])
    total = pref[-1]
    width = whi - wlo + 1
    vals = np.zeros(width)
    cert_r = np.zeros(width, dtype=np.int64)
    cert_s = np.zeros(width, dtype=np.int64)
    lpow = np.power(np.arange(1, s_len + 1, dtype=np.float64), beta - 1.0)

    # interior points: staircase max over windows [A, B] with lo <= A <= n <= B <= hi
    in_lo = max(wlo, lo)
    in_hi = min(whi, hi)
    if in_lo <= in_hi:
        a_idx = np.arange(s_len)
        mass = pref[None, 1:] - pref[:s_len, None]  # mass[a, b] over [lo+a, lo+b]
        lens = np.arange(s_len)[None, :] - a_idx[:, None]
        v = np.where(lens >= 0, mass * lpow[np.clip(lens, 0, s_len - 1)], -np.inf)
        rc = np.maximum.accumulate(v[:, ::-1], axis=1)[:, ::-1]
        fc = np.maximum.accumulate(rc, axis=0)
        ii = np.arange(in_lo - lo, in_hi - lo + 1)
        vals[in_lo - wlo : in_hi - wlo + 1] = fc[ii, ii]
        if want_certs:
            for n in range(in_lo, in_hi + 1):
                i = n - lo
                sub = v[: i + 1, i:]
                m = fc[i, i]
                aa, bb = np.nonzero(sub == m)
                length = bb + i - aa
                rr = i - aa
                k = np.lexsort((rr, length))[0]
                cert_r[n - wlo] = rr[k]
                cert_s[n - wlo] = bb[k]

    # left of the support: windows [n, B], so r = 0 and the minimal s wins ties
    if wlo < lo:
        ns = np.arange(wlo, min(whi, lo - 1) + 1)
        if len(ns):
            dist = lo - ns
            lens = dist[:, None] + np.arange(1, s_len + 1)[None, :]
            v = pref[None, 1:] * np.power(lens.astype(np.float64), beta - 1.0)
            vals[ns - wlo] = v.max(axis=1)
            if want_certs:
                j = v.argmax(axis=1)
                cert_s[ns - wlo] = dist + j

    # right of the support: windows [A, n], so s = 0 and the maximal A wins ties
    if whi > hi:
        ns = np.arange(max(wlo, hi + 1), whi + 1)
        if len(ns):
            dist = ns - lo
            lens = dist[:, None] + 1 - np.arange(s_len)[None, :]
            v = (total - pref[:s_len])[None, :] * np.power(lens.astype(np.float64), beta - 1.0)
            vals[ns - wlo] = v.max(axis=1)
            if want_certs:
                j = s_len - 1 - v[:, ::-1].argmax(axis=1)
                cert_r[ns - wlo] = dist - j

    return vals, cert_r, cert_s


def frac_max_1d_uncentered(f: LatticeFunction, beta: float, window: EvaluationWindow) -> MaximalResult:
    """Uncentered fractional maximal function on Z, exact.

    Value at n is the maximum over integer windows [n-r, n+s] of
    (r+s+1)^(beta-1) * sum |f|; for finitely supported data the optimal
    window never extends past the support hull.
    """
    if f.dim != 1 or window.dim != 1:
        raise ValueError("frac_max_1d_uncentered requires dimension 1")
    if not (0.0 <= beta < 1.0):
        raise ValueError(f"beta must lie in [0, 1), got {beta}")
    wlo, whi = window.lo[0], window.hi[0]
    sup = _support_1d(f)
    if sup is None:
        width = whi - wlo + 1
        return MaximalResult(
            values=LatticeFunction(1, (wlo,), (whi,), np.zeros(width)),
            beta=beta,
            mode="uncentered",
            exact=True,
            cert_r=np.zeros(width, dtype=np.int64),
            cert_s=np.zeros(width, dtype=np.int64),
        )
    lo, hi, g = sup
    vals, cr, cs = _uncentered_1d_arrays(g, lo, wlo, whi, beta, want_certs=True)
    return MaximalResult(
        values=LatticeFunction(1, (wlo,), (whi,), vals),
        beta=beta,
        mode="uncentered",
        exact=True,
        cert_r=cr,
        cert_s=cs,
    )


def frac_max_1d_centered(f: LatticeFunction, beta: float, window: EvaluationWindow) -> MaximalResult:
    """Centered fractional maximal function on Z over symmetric windows, exact."""
    if f.dim != 1 or window.dim != 1:
        raise ValueError("frac_max_1d_centered requires dimension 1")
    if not (0.0 <= beta < 1.0):
        raise ValueError(f"beta must lie in [0, 1), got {beta}")
    wlo, whi = window.lo[0], window.hi[0]
    width = whi - wlo + 1
    sup = _support_1d(f)
    if sup is None:
        return MaximalResult(
            values=LatticeFunction(1, (wlo,), (whi,), np.zeros(width)),
            beta=beta,
            mode="centered",
            exact=True,
            cert_r=np.zeros(width, dtype=np.int64),
        )
    lo, hi, g = sup
    s_len = len(g)
    pref = np.concatenate([[0.0], np.cumsum(g)])
    rmax = max(abs(wlo - lo), abs(wlo - hi), abs(whi - lo), abs(whi - hi))
    rs = np.arange(rmax + 1)
    weights = np.power(2.0 * rs + 1.0, beta - 1.0)
    ii = np.arange(wlo, whi + 1) - lo
    vals = np.empty(len(ii))
    cert_r = np.empty(len(ii), dtype=np.int64)
    chunk = max(1, _GATHER_CHUNK // (rmax + 1))
    for start in range(0, len(ii), chunk):
        sl = slice(start, min(start + chunk, len(ii)))
        hi_idx = np.clip(ii[sl, None] + rs[None, :] + 1, 0, s_len)
        lo_idx = np.clip(ii[sl, None] - rs[None, :], 0, s_len)
        v = (pref[hi_idx] - pref[lo_idx]) * weights[None, :]
        vals[sl] = v.max(axis=1)
        cert_r[sl] = rs[v.argmax(axis=1)]
    return MaximalResult(
        values=LatticeFunction(1, (wlo,), (whi,), vals),
        beta=beta,
        mode="centered",
        exact=True,
        cert_r=cert_r,
    )


# ---------------------------------------------------------------------------
# d-dimensional operators
# ---------------------------------------------------------------------------


def _max_gauge_between_boxes(body: ConvexBody, box_a, box_b) -> float:
    """max gauge(p - q) over p in box_a, q in box_b (attained at corner pairs)."""
    a_lo, a_hi = np.asarray(box_a[0]), np.asarray(box_a[1])
    b_lo, b_hi = np.asarray(box_b[0]), np.asarray(box_b[1])
    d = len(a_lo)
    corners = np.stack(np.meshgrid(*[[0, 1]] * d, indexing="ij"), axis=-1).reshape(-1, d)
    pa = a_lo + corners * (a_hi - a_lo)
    pb = b_lo + corners * (b_hi - b_lo)
    diff = pa[:, None, :] - pb[None, :, :]
    return float(body._gauge_arr(diff.reshape(-1, d).astype(np.float64)).max())


def _sorted_ball(body: ConvexBody, center_frac: np.ndarray, radius: float):
    """Offsets u (integer) with gauge(u - center_frac) <= radius, sorted by (gauge, lex)."""
    pts, g = ball_points_and_gauges(body, center_frac, radius)
    keys = tuple(pts[:, j] for j in reversed(range(body.dim))) + (g,)
    order = np.lexsort(keys)
    return pts[order], g[order]


def _group_ends(gauges: np.ndarray) -> np.ndarray:
    """Indices of the last element of each distinct-gauge group."""
    if len(gauges) == 0:
        return np.zeros(0, dtype=np.int64)
    change = np.nonzero(np.diff(gauges))[0]
    return np.concatenate([change, [len(gauges) - 1]])


def _padded_flat(f: LatticeFunction, pad_lo: np.ndarray, pad_hi: np.ndarray):
    pad = np.abs(f.materialize(EvaluationWindow(tuple(pad_lo), tuple(pad_hi))))
    shape = pad.shape
    strides = np.ones(len(shape), dtype=np.int64)
    for j in range(len(shape) - 2, -1, -1):
        strides[j] = strides[j + 1] * shape[j + 1]
    return pad.ravel(), strides


def frac_max_nd_centered(f: LatticeFunction, body: ConvexBody, beta: float, window: EvaluationWindow) -> MaximalResult:
    """Centered fractional maximal function with balls r * body, exact.

    Candidate radii are the sorted gauge values of lattice offsets out to
    the radius covering the support from the farthest window point; prefix
    sums over that enumeration yield all candidate averages at once.
    Certificates store the minimal attaining radius.
    """
    d = f.dim
    if body.dim != d or window.dim != d:
        raise ValueError("dimension mismatch between function, body and window")
    if not (0.0 <= beta < d):
        raise ValueError(f"beta must lie in [0, d), got {beta}")
    win_pts = window.points()
    sup = f.support_box()
    if sup is None:
        zero = LatticeFunction(d, window.lo, window.hi, np.zeros(window.size))
        return MaximalResult(zero, beta, "centered", True, np.zeros(window.shape))
    cover = _max_gauge_between_boxes(body, sup, (window.lo, window.hi))
    offs, gs = _sorted_ball(body, np.zeros(d), cover)
    ends = _group_ends(gs)
    counts = (ends + 1).astype(np.float64)
    weights = np.exp((beta / d - 1.0) * np.log(counts))
    radii = gs[ends]

    pad_lo = np.asarray(window.lo) + offs.min(axis=0)
    pad_hi = np.asarray(window.hi) + offs.max(axis=0)
    flat, strides = _padded_flat(f, pad_lo, pad_hi)
    base = (win_pts - pad_lo) @ strides
    moff = offs @ strides

    n_pts = len(win_pts)
    vals = np.empty(n_pts)
    cert = np.empty(n_pts)
    chunk = max(1, _GATHER_CHUNK // max(len(offs), 1))
    for start in range(0, n_pts, chunk):
        sl = slice(start, min(start + chunk, n_pts))
        gathered = flat[base[sl, None] + moff[None, :]]
        masses = np.cumsum(gathered, axis=1)[:, ends]
        v = masses * weights[None, :]
        vals[sl] = v.max(axis=1)
        cert[sl] = radii[v.argmax(axis=1)]
    return MaximalResult(
        values=LatticeFunction(d, window.lo, window.hi, vals),
        beta=beta,
        mode="centered",
        exact=True,
        cert_r=cert.reshape(window.shape),
    )


def _suffix_max_and_argmin(v: np.ndarray):
    """Suffix maxima of v and, per position, the smallest index >= it attaining them."""
    sv = np.maximum.accumulate(v[::-1])[::-1]
    idx = np.arange(len(v))
    masked = np.where(v == sv, idx, len(v))
    ans = np.minimum.accumulate(masked[::-1])[::-1]
    return sv, ans


def frac_max_nd_uncentered(
    f: LatticeFunction,
    body: ConvexBody,
    beta: float,
    window: EvaluationWindow,
    center_refine: int = 2,
) -> MaximalResult:
    """Uncentered fractional maximal function over balls r * body + x0.

    For d = 1 this is exact (every integer window arises as a ball).  For
    d >= 2 the supremum over real centers is lower-bounded by restricting
    centers to the sublattice (1/K) Z^d over the hull of the support and the
    window; the result is nondecreasing in K and always dominates the
    centered operator.
    """
    d = f.dim
    k_ref = int(center_refine)
    if k_ref < 1:
        raise ValueError("center_refine must be a positive integer")
    if body.dim != d or window.dim != d:
        raise ValueError("dimension mismatch between function, body and window")
    if not (0.0 <= beta < d):
        raise ValueError(f"beta must lie in [0, d), got {beta}")

    if d == 1:
        res = frac_max_1d_uncentered(f, beta, window)
        return MaximalResult(res.values, beta, "uncentered", True, res.cert_r, res.cert_s)

    sup = f.support_box()
    if sup is None:
        zero = LatticeFunction(d, window.lo, window.hi, np.zeros(window.size))
        return MaximalResult(
            zero, beta, "uncentered", False,
            np.zeros(window.shape), cert_x0=np.tile(np.asarray(window.lo, dtype=np.float64), window.shape + (1,)),
        )

    reg_lo = np.minimum(window.lo, sup[0]) - 1
    reg_hi = np.maximum(window.hi, sup[1]) + 1
    r_big = _max_gauge_between_boxes(
        body,
        (np.minimum(window.lo, sup[0]), np.maximum(window.hi, sup[1])),
        (reg_lo, reg_hi),
    )

    win_pts = window.points()
    n_pts = len(win_pts)
    best_v = np.full(n_pts, -np.inf)
    best_r = np.zeros(n_pts)
    best_x0 = np.zeros((n_pts, d))

    fracs = np.stack(np.meshgrid(*[np.arange(k_ref)] * d, indexing="ij"), axis=-1).reshape(-1, d) / k_ref
    int_axes = [np.arange(l, h + 1) for l, h in zip(reg_lo, reg_hi)]
    int_grid = np.stack([g.ravel() for g in np.meshgrid(*int_axes, indexing="ij")], axis=-1)

    for phi in fracs:
        offs, gs = _sorted_ball(body, phi, r_big)
        if len(offs) == 0:
            continue
        ends = _group_ends(gs)
        counts = (ends + 1).astype(np.float64)
        weights = np.exp((beta / d - 1.0) * np.log(counts))
        radii = gs[ends]
        # map integer offset -> its gauge-group index
        u_lo = offs.min(axis=0)
        u_hi = offs.max(axis=0)
        gidx_shape = tuple(u_hi - u_lo + 1)
        gidx = np.full(gidx_shape, -1, dtype=np.int64)
        grp = np.searchsorted(ends, np.arange(len(offs)))
        gidx[tuple((offs - u_lo).T)] = grp

        pad_lo = reg_lo + u_lo
        pad_hi = reg_hi + u_hi
        flat, strides = _padded_flat(f, pad_lo, pad_hi)
        moff = offs @ strides

        # which window points this class of centers can serve, per center
        for c_int in int_grid:
            rel = win_pts - c_int
            ok = np.all((rel >= u_lo) & (rel <= u_hi), axis=1)
            if not np.any(ok):
                continue
            gi = gidx[tuple((rel[ok] - u_lo).T)]
            served = ok.copy()
            served[ok] = gi >= 0
            gi = gi[gi >= 0]
            if len(gi) == 0:
                continue
            gathered = flat[(c_int - pad_lo) @ strides + moff]
            masses = np.cumsum(gathered)[ends]
            v = masses * weights
            sv, amin = _suffix_max_and_argmin(v)
            cand_v = sv[gi]
            cand_r = radii[amin[gi]]
            tgt = np.nonzero(served)[0]
            better = (cand_v > best_v[tgt]) | ((cand_v == best_v[tgt]) & (cand_r < best_r[tgt]))
            upd = tgt[better]
            best_v[upd] = cand_v[better]
            best_r[upd] = cand_r[better]
            best_x0[upd] = c_int + phi

    return MaximalResult(
        values=LatticeFunction(d, window.lo, window.hi, best_v),
        beta=beta,
        mode="uncentered",
        exact=False,
        cert_r=best_r.reshape(window.shape),
        cert_x0=best_x0.reshape(window.shape + (d,)),
    )


def argmax_radius_set(f: LatticeFunction, body: ConvexBody, beta: float, n) -> RadiusSet:
    """All centered candidate radii at n whose average ties the maximum.

    Finite support guarantees attainment; radii are canonical gauge values
    up to the cover radius, minimal element first.
    """
    d = f.dim
    n = np.atleast_1d(np.asarray(n, dtype=np.int64))
    if body.dim != d or len(n) != d:
        raise ValueError("dimension mismatch")
    if not (0.0 <= beta < d):
        raise ValueError(f"beta must lie in [0, d), got {beta}")
    sup = f.support_box()
    if sup is None:
        return RadiusSet(tuple(int(x) for x in n), (0.0,), 0.0)
    cover = _max_gauge_between_boxes(body, sup, (tuple(n), tuple(n)))
    offs, gs = _sorted_ball(body, np.zeros(d), cover)
    ends = _group_ends(gs)
    counts = (ends + 1).astype(np.float64)
    weights = np.exp((beta / d - 1.0) * np.log(counts))
    radii = gs[ends]
    gathered = np.abs(f.at(n[None, :] + offs))
    masses = np.cumsum(gathered)[ends]
    v = masses * weights
    vmax = float(v.max())
    tie = v >= vmax - TIE_REL_TOL * abs(vmax)
    return RadiusSet(tuple(int(x) for x in n), tuple(float(r) for r in radii[tie]), vmax)


def frac_integral(f: LatticeFunction, beta: float, truncation_radius: float) -> LatticeFunction:
    """Discrete fractional integral sum_{m != 0} f(n - m) / |m|^(d - beta).

    Exact over the finite support; the output is materialized on the support
    hull inflated by the truncation radius (which should cover the region of
    interest).
    """
    d = f.dim
    if not (0.0 < beta < d):
        raise ValueError(f"frac_integral requires beta in (0, d), got {beta}")
    if truncation_radius < 0:
        raise ValueError("truncation_radius must be nonnegative")
    sup = f.support_box()
    if sup is None:
        return LatticeFunction.zeros(d, f.box_lo, f.box_hi)
    t = int(np.ceil(truncation_radius))
    out_lo = np.asarray(sup[0]) - t
    out_hi = np.asarray(sup[1]) + t
    win = EvaluationWindow(tuple(out_lo), tuple(out_hi))
    pts = win.points()
    sup_win = EvaluationWindow(sup[0], sup[1])
    sup_pts = sup_win.points()
    sup_vals = f.materialize(sup_win).ravel()
    keep = sup_vals != 0.0
    sup_pts, sup_vals = sup_pts[keep], sup_vals[keep]

    out = np.zeros(len(pts))
    chunk = max(1, _GATHER_CHUNK // max(len(sup_pts), 1))
    for start in range(0, len(pts), chunk):
        sl = slice(start, min(start + chunk, len(pts)))
        diff = pts[sl, None, :] - sup_pts[None, :, :]
        dist = np.sqrt(np.sum(diff.astype(np.float64) ** 2, axis=-1))
        with np.errstate(divide="ignore"):
            kern = np.where(dist > 0, dist ** (beta - d), 0.0)
        out[sl] = kern @ sup_vals
    return LatticeFunction(d, win.lo, win.hi, out)
