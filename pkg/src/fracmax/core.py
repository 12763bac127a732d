"""Function containers, discrete gradients and norms on the integer lattice.

Everything downstream (operators, geometry, experiments) consumes the two
types defined here: finitely supported real functions on Z^d stored over a
dense integer box, and their forward-difference gradient fields.  All
objects are immutable after construction and all operations are pure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

# Dense storage refuses boxes above this cell count; sparse inputs are
# densified on load, so an absurd bounding box would otherwise OOM silently.
MAX_BOX_CELLS = 10**8


def _as_int_vec(v, dim: int, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(v, dtype=np.int64))
    if arr.shape != (dim,):
        raise ValueError(f"{name} must be an integer vector of length {dim}, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class EvaluationWindow:
    """Inclusive integer box [lo, hi] on which a maximal function is materialized."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(int(x) for x in np.atleast_1d(self.lo))
        hi = tuple(int(x) for x in np.atleast_1d(self.hi))
        if len(lo) != len(hi):
            raise ValueError("window lo and hi must have equal dimension")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError(f"window requires lo <= hi componentwise, got {lo} > {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def shape(self) -> tuple:
        return tuple(h - l + 1 for l, h in zip(self.lo, self.hi))

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def points(self) -> np.ndarray:
        """All lattice points of the window, raster (row-major) order, shape (size, dim)."""
        axes = [np.arange(l, h + 1) for l, h in zip(self.lo, self.hi)]
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def contains(self, n) -> bool:
        n = np.asarray(n)
        return bool(np.all(n >= self.lo) and np.all(n <= self.hi))


@dataclass(frozen=True)
class LatticeFunction:
    """Finitely supported real function on Z^d over a dense integer box.

    Values outside [box_lo, box_hi] are implicitly zero.  The value array is
    stored with shape box_hi - box_lo + 1 (row-major by dimension order) and
    is read-only.
    """

    dim: int
    box_lo: tuple
    box_hi: tuple
    values: np.ndarray

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        lo = _as_int_vec(self.box_lo, self.dim, "box_lo")
        hi = _as_int_vec(self.box_hi, self.dim, "box_hi")
        if np.any(lo > hi):
            raise ValueError("box_lo must be <= box_hi componentwise")
        shape = tuple(int(x) for x in (hi - lo + 1))
        ncells = int(np.prod([float(s) for s in shape]))
        if ncells > MAX_BOX_CELLS:
            raise ValueError(f"box of {ncells} cells exceeds the {MAX_BOX_CELLS} dense-storage bound")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.size != ncells:
            raise ValueError(f"value count {vals.size} does not match box of {ncells} cells")
        vals = vals.reshape(shape).copy()
        vals.flags.writeable = False
        object.__setattr__(self, "box_lo", tuple(int(x) for x in lo))
        object.__setattr__(self, "box_hi", tuple(int(x) for x in hi))
        object.__setattr__(self, "values", vals)

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zeros(dim: int, box_lo, box_hi) -> "LatticeFunction":
        lo = _as_int_vec(box_lo, dim, "box_lo")
        hi = _as_int_vec(box_hi, dim, "box_hi")
        return LatticeFunction(dim, tuple(lo), tuple(hi), np.zeros(tuple(hi - lo + 1)))

    @staticmethod
    def delta(dim: int, at=None) -> "LatticeFunction":
        """Point mass of height one at ``at`` (origin by default)."""
        at = np.zeros(dim, dtype=np.int64) if at is None else _as_int_vec(at, dim, "at")
        return LatticeFunction(dim, tuple(at), tuple(at), np.array([1.0]))

    @staticmethod
    def indicator_box(box_lo, box_hi) -> "LatticeFunction":
        lo = np.atleast_1d(np.asarray(box_lo, dtype=np.int64))
        hi = np.atleast_1d(np.asarray(box_hi, dtype=np.int64))
        return LatticeFunction(len(lo), tuple(lo), tuple(hi), np.ones(tuple(hi - lo + 1)))

    @staticmethod
    def from_points(dim: int, points: Iterable, values: Iterable) -> "LatticeFunction":
        """Densify a sparse point list onto its bounding box."""
        pts = np.asarray(list(points), dtype=np.int64).reshape(-1, dim)
        vals = np.asarray(list(values), dtype=np.float64)
        if len(pts) != len(vals):
            raise ValueError("points and values must have equal length")
        if len(pts) == 0:
            return LatticeFunction.zeros(dim, [0] * dim, [0] * dim)
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        f = LatticeFunction.zeros(dim, tuple(lo), tuple(hi))
        arr = np.array(f.values)
        for p, v in zip(pts, vals):
            arr[tuple(p - lo)] += v
        arr.flags.writeable = False
        object.__setattr__(f, "values", arr)
        return f

    # -- basic queries ------------------------------------------------------

    @property
    def shape(self) -> tuple:
        return self.values.shape

    def window(self) -> EvaluationWindow:
        return EvaluationWindow(self.box_lo, self.box_hi)

    def __call__(self, n) -> float:
        n = _as_int_vec(n, self.dim, "n")
        idx = n - np.asarray(self.box_lo)
        if np.any(idx < 0) or np.any(idx >= np.asarray(self.shape)):
            return 0.0
        return float(self.values[tuple(idx)])

    def at(self, pts: np.ndarray) -> np.ndarray:
        """Vectorized point evaluation; pts has shape (..., dim)."""
        pts = np.asarray(pts, dtype=np.int64)
        idx = pts - np.asarray(self.box_lo)
        inside = np.all((idx >= 0) & (idx < np.asarray(self.shape)), axis=-1)
        out = np.zeros(pts.shape[:-1])
        if np.any(inside):
            sel = idx[inside]
            out[inside] = self.values[tuple(sel[..., i] for i in range(self.dim))]
        return out

    def support_box(self):
        """Tight bounding box (lo, hi) of the nonzero values, or None if f == 0."""
        nz = np.argwhere(self.values != 0.0)
        if len(nz) == 0:
            return None
        lo = nz.min(axis=0) + np.asarray(self.box_lo)
        hi = nz.max(axis=0) + np.asarray(self.box_lo)
        return tuple(int(x) for x in lo), tuple(int(x) for x in hi)

    def materialize(self, win: EvaluationWindow) -> np.ndarray:
        """Dense value array of f over an arbitrary window (zero outside the box)."""
        if win.dim != self.dim:
            raise ValueError("window dimension mismatch")
        out = np.zeros(win.shape)
        lo = np.maximum(win.lo, self.box_lo)
        hi = np.minimum(win.hi, self.box_hi)
        if np.any(lo > hi):
            return out
        src = tuple(slice(l - bl, h - bl + 1) for l, h, bl in zip(lo, hi, self.box_lo))
        dst = tuple(slice(l - wl, h - wl + 1) for l, h, wl in zip(lo, hi, win.lo))
        out[dst] = self.values[src]
        return out

    # -- algebra ------------------------------------------------------------

    def shifted(self, k) -> "LatticeFunction":
        """Translate: returns f(. - k)."""
        k = _as_int_vec(k, self.dim, "k")
        return LatticeFunction(self.dim, tuple(np.asarray(self.box_lo) + k), tuple(np.asarray(self.box_hi) + k), self.values)

    def scaled(self, c: float) -> "LatticeFunction":
        return LatticeFunction(self.dim, self.box_lo, self.box_hi, c * self.values)

    def abs(self) -> "LatticeFunction":
        return LatticeFunction(self.dim, self.box_lo, self.box_hi, np.abs(self.values))

    def __add__(self, other: "LatticeFunction") -> "LatticeFunction":
        if not isinstance(other, LatticeFunction) or other.dim != self.dim:
            return NotImplemented
        lo = np.minimum(self.box_lo, other.box_lo)
        hi = np.maximum(self.box_hi, other.box_hi)
        win = EvaluationWindow(tuple(lo), tuple(hi))
        return LatticeFunction(self.dim, win.lo, win.hi, self.materialize(win) + other.materialize(win))

    def __mul__(self, c: float) -> "LatticeFunction":
        return self.scaled(float(c))

    __rmul__ = __mul__

    # -- serialization ------------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "dim": self.dim,
            "box_lo": list(self.box_lo),
            "box_hi": list(self.box_hi),
            "values": [float(v) for v in self.values.ravel()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @staticmethod
    def from_json_obj(obj: dict) -> "LatticeFunction":
        dim = int(obj["dim"])
        if "points" in obj:
            pts = [p["n"] for p in obj["points"]]
            vals = [p["v"] for p in obj["points"]]
            return LatticeFunction.from_points(dim, pts, vals)
        return LatticeFunction(dim, tuple(obj["box_lo"]), tuple(obj["box_hi"]), np.asarray(obj["values"]))

    @staticmethod
    def from_json(s: str) -> "LatticeFunction":
        return LatticeFunction.from_json_obj(json.loads(s))


@dataclass(frozen=True)
class GradientField:
    """Forward-difference gradient: component i at n is f(n + e_i) - f(n)."""

    dim: int
    components: tuple

    def __post_init__(self):
        if len(self.components) != self.dim:
            raise ValueError("need one component per dimension")
        object.__setattr__(self, "components", tuple(self.components))

    def magnitude(self) -> LatticeFunction:
        """Pointwise Euclidean length of the gradient vector, over the union box."""
        lo = np.min([c.box_lo for c in self.components], axis=0)
        hi = np.max([c.box_hi for c in self.components], axis=0)
        win = EvaluationWindow(tuple(lo), tuple(hi))
        sq = np.zeros(win.shape)
        for c in self.components:
            sq += c.materialize(win) ** 2
        return LatticeFunction(self.dim, win.lo, win.hi, np.sqrt(sq))

    def component_l1_sum(self) -> float:
        """Sum over directions of the component l1 norms.

        Counts each sign-change face once, so for an indicator of the box
        [-k, k]^d it equals 2 d (2k+1)^(d-1) exactly.  This is the norm used
        wherever an exact boundary-count identity is asserted; `lp_norm`
        applies the pointwise Euclidean magnitude instead.
        """
        return float(sum(np.sum(np.abs(c.values)) for c in self.components))


def gradient(f: LatticeFunction) -> GradientField:
    """Forward-difference gradient field of f.

    Component i lives on f's box expanded by one cell on the low side of
    direction i (the difference f(n + e_i) - f(n) can be nonzero one step
    before the box starts).
    """
    comps = []
    lo = np.asarray(f.box_lo)
    hi = np.asarray(f.box_hi)
    for i in range(f.dim):
        clo = lo.copy()
        clo[i] -= 1
        win = EvaluationWindow(tuple(clo), tuple(hi))
        base = f.materialize(win)
        shift_lo = clo.copy()
        shift_lo[i] += 1
        shift_hi = hi.copy()
        shift_hi[i] += 1
        ahead = f.materialize(EvaluationWindow(tuple(shift_lo), tuple(shift_hi)))
        comps.append(LatticeFunction(f.dim, win.lo, win.hi, ahead - base))
    return GradientField(f.dim, tuple(comps))


def lp_norm(f: Union[LatticeFunction, GradientField], p: float) -> float:
    """l^p norm over Z^d; for a GradientField the pointwise magnitude is Euclidean.

    p = inf returns the sup of the pointwise magnitude.  Rejects p < 1.
    """
    if isinstance(f, GradientField):
        f = f.magnitude()
    p = float(p)
    if not np.isinf(p) and p < 1.0:
        raise ValueError(f"lp_norm requires p >= 1, got {p}")
    a = np.abs(f.values)
    if np.isinf(p):
        return float(a.max()) if a.size else 0.0
    if p == 1.0:
        return float(a.sum())
    return float(np.power(np.sum(a**p), 1.0 / p))
