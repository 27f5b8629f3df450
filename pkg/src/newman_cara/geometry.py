"""Convex combinations over finite point sets and their sparsification.

Two engines live here:

* ``caratheodory_reduce`` removes points along affine dependences until at
  most ``d + 1`` remain, without moving the represented point.
* ``approx_caratheodory_sample`` replaces a combination by the empirical
  distribution of ``k`` i.i.d. draws from it, retrying until the draw lies
  within ``delta`` of the original point in the max norm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidInputError, ReductionFailedError, SamplingFailedError

WEIGHT_SUM_TOL = 1e-12
RENORMALIZE_TOL = 1e-15
PIVOT_TOL = 1e-10

# A point is a 1-D float array of length ``d``.
Point = np.ndarray


@dataclass(frozen=True, eq=False)
class PointSet:
    """``m`` points in R^d, stored as the rows of an ``(m, d)`` array.

    Integer and boolean arrays are kept as-is (0/1 protocol tables are large)
    and promoted to float64 row by row when evaluated.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points)
        if pts.dtype == bool:
            pts = pts.astype(np.uint8)
        if pts.ndim != 2:
            raise InvalidInputError(f"points must be a 2-D array, got shape {pts.shape}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InvalidInputError(f"need at least one point of positive dimension, got {pts.shape}")
        if not np.issubdtype(pts.dtype, np.number):
            raise InvalidInputError(f"points must be numeric, got dtype {pts.dtype}")
        if np.issubdtype(pts.dtype, np.floating) and not np.isfinite(pts).all():
            raise InvalidInputError("points contain NaN or Inf")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_rows(cls, rows, dimension=None):
        arr = np.asarray(rows, dtype=np.float64)
        if arr.ndim == 1 and dimension == 1:
            arr = arr[:, None]
        if dimension is not None and (arr.ndim != 2 or arr.shape[1] != dimension):
            raise InvalidInputError(f"points do not all have dimension {dimension}")
        return cls(arr)

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def point(self, i) -> Point:
        return self.points[i].astype(np.float64)

    def max_abs(self) -> float:
        return float(np.abs(self.points).max())


@dataclass(frozen=True, eq=False)
class ConvexCombination:
    """Sparse weights over a ``PointSet``.

    The support is stored sorted by index with zero weights dropped; weights
    must be nonnegative and sum to one within ``WEIGHT_SUM_TOL``.
    """

    pointset: PointSet
    indices: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).ravel()
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        if idx.shape != w.shape:
            raise InvalidInputError(f"{idx.size} indices but {w.size} weights")
        if idx.size and (idx.min() < 0 or idx.max() >= len(self.pointset)):
            raise InvalidInputError(f"index out of range for point set of size {len(self.pointset)}")
        if not np.isfinite(w).all() or (w < 0).any():
            raise InvalidInputError("weights must be finite and nonnegative")
        order = np.argsort(idx, kind="stable")
        idx, w = idx[order], w[order]
        if idx.size > 1 and (np.diff(idx) == 0).any():
            raise InvalidInputError("duplicate indices in support")
        keep = w > 0
        idx, w = idx[keep], w[keep]
        if idx.size == 0:
            raise InvalidInputError("empty support")
        total = math.fsum(w)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidInputError(f"weights sum to {total!r}, not 1")
        idx.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_dense(cls, pointset, weights):
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (len(pointset),):
            raise InvalidInputError(f"expected {len(pointset)} weights, got shape {w.shape}")
        nz = np.flatnonzero(w)
        return cls(pointset, nz, w[nz])

    @classmethod
    def point_mass(cls, pointset, index):
        return cls(pointset, [index], [1.0])

    @property
    def dimension(self) -> int:
        return self.pointset.dimension

    @property
    def support(self):
        return list(zip(self.indices.tolist(), self.weights.tolist()))

    def __len__(self):
        return self.indices.size

    def dense(self):
        out = np.zeros(len(self.pointset))
        out[self.indices] = self.weights
        return out


def eval_combination(c: ConvexCombination) -> Point:
    """Return ``sum_i w_i p_i``, accumulated in ascending index order."""
    pts = c.pointset.points
    if c.indices.size and c.indices.max() >= pts.shape[0]:
        raise InvalidInputError("combination refers to points outside its point set")
    acc = np.zeros(pts.shape[1], dtype=np.float64)
    for i, w in zip(c.indices.tolist(), c.weights.tolist()):
        acc += w * pts[i]
    return acc


def linf_distance(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64))))


def _lifted(ps, indices):
    cols = ps.points[indices].astype(np.float64).T
    return np.vstack([cols, np.ones((1, cols.shape[1]))])


def find_affine_dependence(ps: PointSet, indices) -> Optional[np.ndarray]:
    """Find ``lam != 0`` with ``sum(lam) == 0`` and ``sum(lam_i p_i) == 0``.

    Runs Gauss-Jordan elimination with partial pivoting over the columns
    ``(p_i, 1)`` in the given order and stops at the first column that is
    (numerically) a combination of the earlier pivot columns. That column
    gets coefficient 1 and the pivots absorb the rest.

    Returns ``None`` when every lifted column is a pivot, i.e. the points are
    affinely independent. Pivots smaller than ``PIVOT_TOL`` times the
    largest column norm count as zero.
    """
    idx = np.asarray(indices, dtype=np.int64).ravel()
    if idx.size < 1:
        raise InvalidInputError("need at least one index")
    if idx.min() < 0 or idx.max() >= len(ps):
        raise InvalidInputError("index out of range")
    if np.unique(idx).size != idx.size:
        raise InvalidInputError("indices must be distinct")

    a = _lifted(ps, idx)
    rows, m = a.shape
    tol = PIVOT_TOL * float(np.linalg.norm(a, axis=0).max())
    pivot_cols = []
    r = 0
    for j in range(m):
        if r < rows:
            p = r + int(np.argmax(np.abs(a[r:, j])))
            pivot = a[p, j]
        else:
            pivot = 0.0
        if abs(pivot) <= tol:
            # column j is spanned by the pivot columns found so far
            lam = np.zeros(m)
            lam[j] = 1.0
            for row, col in enumerate(pivot_cols):
                lam[col] = -a[row, j]
            return lam
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] /= a[r, j]
        others = np.arange(rows) != r
        a[others] -= np.outer(a[others, j], a[r])
        pivot_cols.append(j)
        r += 1
    return None


def caratheodory_reduce(c: ConvexCombination) -> ConvexCombination:
    """Shrink the support to at most ``d + 1`` points, keeping the point fixed.

    Each round takes the ``d + 2`` lowest-indexed support points, finds an
    affine dependence ``lam`` among them and moves the weights to
    ``w - t * lam`` with the largest ``t`` keeping them nonnegative. Every
    weight that lands on zero is dropped, so each round removes at least one
    point.
    """
    d = c.dimension
    if len(c) <= d + 1:
        return c
    ps = c.pointset
    idx = c.indices.copy()
    w = c.weights.copy()
    while idx.size > d + 1:
        block = d + 2
        lam = find_affine_dependence(ps, idx[:block])
        if lam is None or not (lam > 0).any():
            raise ReductionFailedError(
                f"no affine dependence among {block} points in dimension {d}", idx[:block].tolist()
            )
        wb = w[:block]
        pos = lam > 0
        ratios = np.full(block, np.inf)
        ratios[pos] = wb[pos] / lam[pos]
        t = ratios.min()
        new = wb - t * lam
        hit = ratios <= t * (1.0 + 1e-12)
        new[hit] = 0.0
        new[new < 0] = 0.0
        w[:block] = new
        keep = w > 0
        if keep.sum() >= idx.size:
            raise ReductionFailedError("elimination round removed no point", idx.tolist())
        idx, w = idx[keep], w[keep]
        total = math.fsum(w)
        if abs(total - 1.0) > RENORMALIZE_TOL:
            w = w / total
    return ConvexCombination(ps, idx, w)


def sample_count(dimension: int, delta: float, eta: float) -> int:
    """Number of i.i.d. draws so that, for coordinates in [-1, 1], all
    ``dimension`` empirical means land within ``delta`` with probability at
    least ``1 - eta`` (Hoeffding plus a union bound)."""
    return math.ceil(2.0 * math.log(2.0 * dimension / eta) / delta**2)


@dataclass(frozen=True)
class SamplingPlan:
    dimension: int
    delta: float
    eta: float = 0.01
    max_retries: int = 16
    k: int = field(init=False)

    def __post_init__(self):
        if not (isinstance(self.dimension, (int, np.integer)) and self.dimension >= 1):
            raise InvalidInputError(f"dimension must be a positive integer, got {self.dimension!r}")
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise InvalidInputError(f"delta must be > 0, got {self.delta!r}")
        if not (0 < self.eta < 1):
            raise InvalidInputError(f"eta must lie in (0, 1), got {self.eta!r}")
        if self.max_retries < 1:
            raise InvalidInputError(f"max_retries must be positive, got {self.max_retries!r}")
        object.__setattr__(self, "k", sample_count(int(self.dimension), self.delta, self.eta))


@dataclass(frozen=True, eq=False)
class SampleOutcome:
    combination: ConvexCombination
    distance: float
    attempts: int


def draw_empirical(c: ConvexCombination, k: int, rng: np.random.Generator) -> ConvexCombination:
    """Empirical distribution of ``k`` inverse-CDF draws from ``c``'s weights."""
    cdf = np.cumsum(c.weights)
    pos = np.searchsorted(cdf, rng.random(k), side="right")
    np.minimum(pos, c.indices.size - 1, out=pos)
    counts = np.bincount(pos, minlength=c.indices.size)
    nz = counts > 0
    return ConvexCombination(c.pointset, c.indices[nz], counts[nz] / k)


def sample_until_close(c: ConvexCombination, plan: SamplingPlan, seed=None) -> SampleOutcome:
    """Las Vegas sparsification; also reports the distance and attempt count."""
    ps = c.pointset
    if plan.dimension != ps.dimension:
        raise InvalidInputError(f"plan is for dimension {plan.dimension}, points have {ps.dimension}")
    if ps.max_abs() > 1.0:
        raise InvalidInputError("approximate sparsification needs every point inside the unit L-inf ball")
    target = eval_combination(c)
    rng = np.random.default_rng(seed)
    best = math.inf
    for attempt in range(1, plan.max_retries + 1):
        cand = draw_empirical(c, plan.k, rng)
        dist = linf_distance(eval_combination(cand), target)
        if dist <= plan.delta:
            return SampleOutcome(cand, dist, attempt)
        best = min(best, dist)
    raise SamplingFailedError(
        f"{plan.max_retries} draws of k={plan.k} all missed delta={plan.delta} (best {best:.6g})",
        plan.max_retries,
        best,
    )


def approx_caratheodory_sample(c: ConvexCombination, plan: SamplingPlan, seed=None) -> ConvexCombination:
    """Return a combination with at most ``plan.k`` points within ``plan.delta`` of ``c``.

    The bound is checked exactly before returning; if ``plan.max_retries``
    draws all miss, ``SamplingFailedError`` is raised. ``seed`` is anything
    ``numpy.random.default_rng`` accepts.
    """
    return sample_until_close(c, plan, seed).combination


def combination_to_json(c: ConvexCombination) -> dict:
    return {
        "dimension": c.dimension,
        "points": c.pointset.points.astype(np.float64).tolist(),
        "weights": [{"index": i, "weight": w} for i, w in c.support],
    }


def combination_from_json(doc: dict):
    """Parse the interchange document; returns ``(PointSet, ConvexCombination | None)``."""
    try:
        d = doc["dimension"]
        rows = doc["points"]
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"missing field {exc}") from None
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise InvalidInputError(f"dimension must be a positive integer, got {d!r}")
    if not isinstance(rows, list) or any(not isinstance(r, list) or len(r) != d for r in rows):
        raise InvalidInputError(f"points must be a list of length-{d} lists")
    try:
        ps = PointSet.from_rows(rows, d)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(str(exc)) from None
    wdoc = doc.get("weights")
    if wdoc is None:
        return ps, None
    try:
        idx = [int(e["index"]) for e in wdoc]
        w = [float(e["weight"]) for e in wdoc]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"bad weights entry: {exc}") from None
    return ps, ConvexCombination(ps, idx, w)
