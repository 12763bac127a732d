"""Convex body geometry: gauges, lattice ball enumeration, derived constants.

A body here is a bounded open convex set containing the origin, normalized
so the closed body contains all +-e_i.  Its dilates r * body, translated to
arbitrary real centers, play the role of metric balls for the lattice
maximal operators; membership of a lattice point m in the closed ball of
center x0 and radius r is gauge(m - x0) <= r.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

# Closed-ball membership absorbs floating-point boundary ambiguity; counts
# are then deterministic for rational inputs.
GAUGE_TOL = 1e-12

MAX_SCAN_CELLS = 10**9


@dataclass(frozen=True)
class ConvexBody:
    """Either an l^p unit ball or a polytope {x : a_i . x <= b_i}."""

    dim: int
    kind: str  # "lp" | "polytope"
    p: float = None
    halfspaces: tuple = None  # tuple of (a tuple, b float)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.kind == "lp":
            if self.p is None or (not np.isinf(self.p) and self.p < 1):
                raise ValueError("lp body requires p >= 1 (or inf)")
        elif self.kind == "polytope":
            hs = []
            for a, b in self.halfspaces:
                a = tuple(float(x) for x in a)
                if len(a) != self.dim:
                    raise ValueError("halfspace normal dimension mismatch")
                if float(b) <= 0:
                    raise ValueError("polytope requires b > 0 (origin interior)")
                hs.append((a, float(b)))
            object.__setattr__(self, "halfspaces", tuple(hs))
        else:
            raise ValueError(f"unknown body kind {self.kind!r}")
        # +-e_i must lie in the closed body; reject rather than rescale.
        eye = np.eye(self.dim)
        g = np.concatenate([self._gauge_arr(eye), self._gauge_arr(-eye)])
        if np.any(g > 1.0 + 1e-9):
            raise ValueError("body violates the +-e_i normalization (gauge(+-e_i) must be <= 1)")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def lp(p: float, dim: int) -> "ConvexBody":
        return ConvexBody(dim, "lp", p=float(p))

    @staticmethod
    def linf(dim: int) -> "ConvexBody":
        return ConvexBody(dim, "lp", p=math.inf)

    @staticmethod
    def polytope(halfspaces, dim: int) -> "ConvexBody":
        return ConvexBody(dim, "polytope", halfspaces=tuple((tuple(a), float(b)) for a, b in halfspaces))

    # -- gauge --------------------------------------------------------------

    def _gauge_arr(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64)
        if y.shape[-1] != self.dim:
            raise ValueError(f"gauge argument has dimension {y.shape[-1]}, body has {self.dim}")
        if self.kind == "lp":
            a = np.abs(y)
            if np.isinf(self.p):
                return a.max(axis=-1)
            if self.p == 1:
                return a.sum(axis=-1)
            if self.p == 2:
                return np.sqrt(np.sum(a * a, axis=-1))
            return np.power(np.sum(a**self.p, axis=-1), 1.0 / self.p)
        A = np.asarray([h[0] for h in self.halfspaces])
        b = np.asarray([h[1] for h in self.halfspaces])
        ratios = np.tensordot(y, A, axes=([-1], [1])) / b
        return np.maximum(ratios.max(axis=-1), 0.0)

    def gauge(self, y) -> float:
        """Minkowski functional: inf{t > 0 : y in t * body}."""
        return float(self._gauge_arr(np.asarray(y, dtype=np.float64)))

    # -- geometry -----------------------------------------------------------

    def axis_extents(self) -> tuple:
        """(lo, hi) per-axis support extents of the unit body: lo_j <= x_j <= hi_j."""
        if self.kind == "lp":
            ones = np.ones(self.dim)
            return -ones, ones
        from scipy.optimize import linprog

        A = np.asarray([h[0] for h in self.halfspaces])
        b = np.asarray([h[1] for h in self.halfspaces])
        lo = np.zeros(self.dim)
        hi = np.zeros(self.dim)
        for j in range(self.dim):
            c = np.zeros(self.dim)
            c[j] = 1.0
            r = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * self.dim, method="highs")
            lo[j] = r.fun
            r = linprog(-c, A_ub=A, b_ub=b, bounds=[(None, None)] * self.dim, method="highs")
            hi[j] = -r.fun
        return lo, hi

    def _vertices(self) -> np.ndarray:
        from scipy.spatial import HalfspaceIntersection

        A = np.asarray([h[0] for h in self.halfspaces])
        b = np.asarray([h[1] for h in self.halfspaces])
        hs = np.hstack([A, -b[:, None]])
        inter = HalfspaceIntersection(hs, np.zeros(self.dim))
        return inter.intersections

    def lambda_bound(self) -> float:
        """Smallest lambda with body contained in the Euclidean ball of radius lambda.

        Always >= 1 under the +-e_i normalization.
        """
        if self.kind == "lp":
            if np.isinf(self.p):
                return math.sqrt(self.dim)
            if self.p >= 2:
                return self.dim ** (0.5 - 1.0 / self.p)
            return 1.0
        verts = self._vertices()
        return float(np.linalg.norm(verts, axis=1).max())

    def volume(self) -> float:
        if self.kind == "lp":
            if np.isinf(self.p):
                return 2.0**self.dim
            d, p = self.dim, self.p
            return float(np.exp(d * math.log(2.0) + d * gammaln(1 + 1.0 / p) - gammaln(1 + d / p)))
        from scipy.spatial import ConvexHull

        return float(ConvexHull(self._vertices()).volume)

    # -- serialization ------------------------------------------------------

    def to_json_obj(self) -> dict:
        if self.kind == "lp":
            if np.isinf(self.p):
                return {"type": "linf", "dim": self.dim}
            return {"type": "lp", "p": float(self.p), "dim": self.dim}
        return {
            "type": "polytope",
            "dim": self.dim,
            "halfspaces": [{"a": list(a), "b": b} for a, b in self.halfspaces],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @staticmethod
    def from_json_obj(obj: dict) -> "ConvexBody":
        kind = obj["type"]
        dim = int(obj["dim"])
        if kind == "linf":
            return ConvexBody.linf(dim)
        if kind == "lp":
            return ConvexBody.lp(float(obj["p"]), dim)
        if kind == "polytope":
            return ConvexBody.polytope([(h["a"], h["b"]) for h in obj["halfspaces"]], dim)
        raise ValueError(f"unknown body type {kind!r}")

    @staticmethod
    def from_json(s: str) -> "ConvexBody":
        return ConvexBody.from_json_obj(json.loads(s))


def gauge(body: ConvexBody, y) -> float:
    return body.gauge(y)


def _scan_box(body: ConvexBody, x0: np.ndarray, r: float):
    lo_ext, hi_ext = body.axis_extents()
    lo = np.ceil(x0 + r * lo_ext - 1e-9).astype(np.int64)
    hi = np.floor(x0 + r * hi_ext + 1e-9).astype(np.int64)
    cells = float(np.prod(np.maximum(hi - lo + 1, 0).astype(np.float64)))
    if cells > MAX_SCAN_CELLS:
        raise ValueError(f"lattice scan box of {cells:.3g} cells exceeds the {MAX_SCAN_CELLS} bound")
    return lo, hi


def ball_points_and_gauges(body: ConvexBody, x0, r: float):
    """Lattice points with gauge(m - x0) <= r and their gauges, unsorted."""
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.shape != (body.dim,):
        raise ValueError("center dimension mismatch")
    if r < 0:
        raise ValueError("radius must be nonnegative")
    lo, hi = _scan_box(body, x0, r)
    if np.any(lo > hi):
        return np.zeros((0, body.dim), dtype=np.int64), np.zeros(0)
    axes = [np.arange(l, h + 1) for l, h in zip(lo, hi)]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    g = body._gauge_arr(pts - x0)
    keep = g <= r + GAUGE_TOL
    return pts[keep], g[keep]


def count_lattice(body: ConvexBody, x0, r: float) -> int:
    """N(x0, r): number of lattice points in the closed ball of radius r."""
    pts, _ = ball_points_and_gauges(body, x0, r)
    return int(len(pts))


def count_lattice_plus(body: ConvexBody, x0, r: float) -> int:
    """N+ = max(N, 1); a negative radius is permitted and yields 1."""
    if r < 0:
        return 1
    return max(count_lattice(body, x0, r), 1)


def enumerate_ball(body: ConvexBody, x0, r: float) -> np.ndarray:
    """Lattice points of the ball, sorted by gauge ascending, ties lexicographic."""
    pts, g = ball_points_and_gauges(body, x0, r)
    if len(pts) == 0:
        return pts
    keys = tuple(pts[:, j] for j in reversed(range(body.dim))) + (g,)
    order = np.lexsort(keys)
    return pts[order]


@dataclass(frozen=True)
class OmegaConstants:
    """Fitted sandwich constants for the lattice count N(x, r).

    c_omega is the body volume; on the fitted range,
    c_omega * max(r - c1, 0)^d <= N(x, r) <= c_omega * (r + c1)^d holds at
    every sampled center and radius, and c_omega * (c2 - c1)^d == 1.
    """

    c_omega: float
    c1: float
    c2: float
    lam: float
    r_max_fitted: float

    def upper(self, r: float, dim: int) -> float:
        return self.c_omega * (r + self.c1) ** dim

    def lower(self, r: float, dim: int) -> float:
        return self.c_omega * max(r - self.c1, 0.0) ** dim


def _sample_centers(dim: int) -> np.ndarray:
    offs = np.stack(np.meshgrid(*[[0.0, 0.5]] * dim, indexing="ij"), axis=-1).reshape(-1, dim)
    return offs


def estimate_constants(body: ConvexBody, r_max: float) -> OmegaConstants:
    """Fit c1 empirically over r in {0.5, 1.0, ..., r_max} and lattice/half-lattice centers.

    c1 is the smallest value on a 1e-3 grid satisfying both sandwich bounds at
    every sample; c2 is then forced by c_omega * (c2 - c1)^d = 1.  Fails if no
    c1 <= r_max / 2 works (a non-conforming body).
    """
    if r_max < 10:
        raise ValueError("estimate_constants requires r_max >= 10")
    d = body.dim
    c = body.volume()
    radii = np.arange(0.5, r_max + 1e-9, 0.5)
    need = 0.0
    for x0 in _sample_centers(d):
        for r in radii:
            n = count_lattice(body, x0, float(r))
            # upper bound: N <= c (r + c1)^d
            need = max(need, (n / c) ** (1.0 / d) - r)
            # lower bound: N >= c max(r - c1, 0)^d
            if n == 0:
                need = max(need, r)
            elif n < c * r**d:
                need = max(need, r - (n / c) ** (1.0 / d))
    c1 = math.ceil(max(need, 0.0) / 1e-3) * 1e-3
    if c1 > r_max / 2:
        raise ValueError(f"no admissible c1 <= r_max/2 (needed {c1:.3f}); body does not conform")
    c2 = c1 + c ** (-1.0 / d)
    return OmegaConstants(c_omega=c, c1=c1, c2=c2, lam=body.lambda_bound(), r_max_fitted=float(r_max))
