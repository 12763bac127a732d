"""Brute-force reference implementations, kept deliberately dumb.

Every oracle evaluates the defining supremum by direct enumeration with no
prefix sums, no cumulative maxima and no shared code with the fast paths.
"""

import numpy as np

from fracmax.core import EvaluationWindow, LatticeFunction
from fracmax.omega import ConvexBody, ball_points_and_gauges


def brute_uncentered_1d(f: LatticeFunction, beta: float, n: int, reach: int = None) -> float:
    sup = f.support_box()
    if sup is None:
        return 0.0
    lo, hi = sup[0][0], sup[1][0]
    if reach is None:
        reach = max(abs(n - lo), abs(n - hi)) + 1
    best = 0.0
    for r in range(reach + 1):
        for s in range(reach + 1):
            total = sum(abs(f(np.array([n + k]))) for k in range(-r, s + 1))
            best = max(best, total / (r + s + 1.0) ** (1.0 - beta))
    return best


def brute_centered_1d(f: LatticeFunction, beta: float, n: int, reach: int = None) -> float:
    sup = f.support_box()
    if sup is None:
        return 0.0
    lo, hi = sup[0][0], sup[1][0]
    if reach is None:
        reach = max(abs(n - lo), abs(n - hi)) + 1
    best = 0.0
    for r in range(reach + 1):
        total = sum(abs(f(np.array([n + k]))) for k in range(-r, r + 1))
        best = max(best, total / (2.0 * r + 1.0) ** (1.0 - beta))
    return best


def brute_centered_nd(f: LatticeFunction, body: ConvexBody, beta: float, n, cover: float) -> float:
    d = f.dim
    n = np.asarray(n)
    pts, gs = ball_points_and_gauges(body, n.astype(float), cover)
    radii = np.unique(gs)
    best = 0.0
    for r in radii:
        members = pts[gs <= r + 1e-12]
        total = float(np.sum(np.abs(f.at(members))))
        best = max(best, total * len(members) ** (beta / d - 1.0))
    return best


def brute_uncentered_nd(f: LatticeFunction, body: ConvexBody, beta: float, n, k_ref: int, reg_lo, reg_hi, cover: float) -> float:
    d = f.dim
    n = np.asarray(n, dtype=np.float64)
    axes = [np.arange(l, h + 1e-9, 1.0 / k_ref) for l, h in zip(reg_lo, reg_hi)]
    centers = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=-1)
    best = 0.0
    for x0 in centers:
        gn = body.gauge(n - x0)
        pts, gs = ball_points_and_gauges(body, x0, cover)
        if len(pts) == 0:
            continue
        radii = np.unique(gs[gs >= gn - 1e-12])
        for r in radii:
            members = pts[gs <= r + 1e-12]
            total = float(np.sum(np.abs(f.at(members))))
            best = max(best, total * len(members) ** (beta / d - 1.0))
    return best


def brute_uncentered_1d_profile(f: LatticeFunction, beta: float, wlo: int, whi: int) -> np.ndarray:
    """Definitional window scan over every point of [wlo, whi].

    Per point, partial sums accumulate outward from n (no shared prefix
    arrays with the implementation).
    """
    sup = f.support_box()
    out = np.zeros(whi - wlo + 1)
    if sup is None:
        return out
    lo, hi = sup[0][0], sup[1][0]
    for n in range(wlo, whi + 1):
        reach_l = max(0, n - lo)
        reach_r = max(0, hi - n)
        left = [abs(f(np.array([n])))]
        for r in range(1, reach_l + 1):
            left.append(left[-1] + abs(f(np.array([n - r]))))
        right = [0.0]
        for s in range(1, reach_r + 1):
            right.append(right[-1] + abs(f(np.array([n + s]))))
        best = 0.0
        for r in range(len(left)):
            for s in range(len(right)):
                best = max(best, (left[r] + right[s]) / (r + s + 1.0) ** (1.0 - beta))
        out[n - wlo] = best
    return out


def brute_centered_1d_profile(f: LatticeFunction, beta: float, wlo: int, whi: int) -> np.ndarray:
    sup = f.support_box()
    out = np.zeros(whi - wlo + 1)
    if sup is None:
        return out
    lo, hi = sup[0][0], sup[1][0]
    for n in range(wlo, whi + 1):
        reach = max(abs(n - lo), abs(n - hi))
        total = abs(f(np.array([n])))
        best = total
        for r in range(1, reach + 1):
            total += abs(f(np.array([n - r]))) + abs(f(np.array([n + r])))
            best = max(best, total / (2.0 * r + 1.0) ** (1.0 - beta))
        out[n - wlo] = best
    return out


def brute_uncentered_nd_table(f: LatticeFunction, body: ConvexBody, beta: float, k_ref: int, reg_lo, reg_hi, cover: float):
    """(centers, per-center radii, per-center values) by direct enumeration."""
    d = f.dim
    axes = [np.arange(l, h + 1e-9, 1.0 / k_ref) for l, h in zip(reg_lo, reg_hi)]
    centers = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=-1)
    table = []
    for x0 in centers:
        pts, gs = ball_points_and_gauges(body, x0, cover)
        if len(pts) == 0:
            table.append((np.zeros(0), np.zeros(0)))
            continue
        radii = np.unique(gs)
        vals = []
        for r in radii:
            members = pts[gs <= r + 1e-12]
            total = float(np.sum(np.abs(f.at(members))))
            vals.append(total * len(members) ** (beta / d - 1.0))
        table.append((radii, np.asarray(vals)))
    return centers, table


def brute_frac_integral(f: LatticeFunction, beta: float, n) -> float:
    sup = f.support_box()
    if sup is None:
        return 0.0
    d = f.dim
    total = 0.0
    win = EvaluationWindow(sup[0], sup[1])
    for p in win.points():
        if np.all(p == np.asarray(n)):
            continue
        dist = float(np.linalg.norm(np.asarray(n, dtype=float) - p))
        total += f(p) / dist ** (d - beta)
    return total


def brute_boundary_faces(f: LatticeFunction) -> int:
    """Count of lattice faces (n, n+e_i) across which a 0/1 indicator changes."""
    win = EvaluationWindow(
        tuple(np.asarray(f.box_lo) - 1), tuple(np.asarray(f.box_hi) + 1)
    )
    count = 0
    for p in win.points():
        for i in range(f.dim):
            q = p.copy()
            q[i] += 1
            if (f(p) != 0.0) != (f(q) != 0.0):
                count += 1
    return count


def grid_oracle_cont(f, beta: float, x: float, lo: float, hi: float, n: int = 1501) -> float:
    """Dense grid lower bound for the continuous uncentered operator."""
    us = np.linspace(lo, min(x, hi), n)
    us = us[us <= x]
    vs = np.linspace(max(x, lo), hi, n)
    vs = vs[vs >= x]
    best = 0.0
    for u in us:
        widths = vs - u
        masses = f.integral_to(vs, absolute=True) - f.integral_to(u, absolute=True)
        ok = widths > 0
        vals = np.where(ok, masses * np.where(ok, widths, 1.0) ** (beta - 1.0), 0.0)
        best = max(best, float(vals.max()))
    return best


def strings_by_scan(values: np.ndarray, lo: int) -> list:
    """Direct definition scan for maxima/minima strings on a window."""
    out = []
    n = len(values)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[j + 1] == values[i]:
            j += 1
        left = None if i == 0 else values[i - 1]
        right = None if j == n - 1 else values[j + 1]
        if n > j - i + 1:
            if (left is None or left < values[i]) and (right is None or right < values[i]):
                out.append({"kind": "max", "lo": lo + i, "hi": lo + j})
            elif (left is None or left > values[i]) and (right is None or right > values[i]):
                out.append({"kind": "min", "lo": lo + i, "hi": lo + j})
        i = j + 1
    return out
