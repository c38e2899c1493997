"""Convex bodies, complements and separated unions.

All values are immutable after construction and safe to share across
worker processes.  Dimensions d = 1, 2, 3 are fully supported; several
exactness guarantees (vertex enumeration, complement containment) are
documented per dimension on the functions that provide them.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ..constants import FEASIBILITY_TOL, UNIT_TOL
from ..errors import (
    EmptyRegionError,
    PreconditionViolation,
    UnboundedRegionError,
)


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite 1-d float array, optionally checking its dimension."""
    p = np.asarray(x, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"expected a 1-d coordinate array, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("coordinates must be finite")
    if dim is not None and p.size != dim:
        raise ValueError(f"expected dimension {dim}, got {p.size}")
    return p


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")

    @property
    def dim(self) -> int:
        return self.center.size

    def support(self, u: np.ndarray) -> float:
        u = np.asarray(u, dtype=float)
        return float(self.center @ u + self.radius * np.linalg.norm(u))

    def diameter(self) -> float:
        return 2.0 * self.radius

    def contains_points(self, pts: np.ndarray, tol: float = FEASIBILITY_TOL) -> np.ndarray:
        pts = np.atleast_2d(pts)
        delta = pts - self.center
        # Squared comparison; decision-identical to |x - c| <= r + tol.
        return np.einsum("ij,ij->i", delta, delta) <= (self.radius + tol) ** 2


@dataclass(frozen=True)
class Hull:
    """Convex hull of finitely many points, kept in vertex form.

    Used as the probe body in containment questions; a single vertex is
    legal and makes every containment test a pure translation test.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.ndim != 2 or v.shape[0] == 0:
            raise ValueError("hull needs at least one vertex")
        if not np.all(np.isfinite(v)):
            raise ValueError("hull vertices must be finite")
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def support(self, u: np.ndarray) -> float:
        return float(np.max(self.vertices @ np.asarray(u, dtype=float)))

    def diameter(self) -> float:
        v = self.vertices
        if len(v) == 1:
            return 0.0
        d2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=-1)
        return float(np.sqrt(d2.max()))

    def scaled(self, factor: float) -> "Hull":
        return Hull(self.vertices * factor)


# A compact test body: hull of points or a ball.
VCompact = Hull | Ball


def support(body: VCompact, u) -> float:
    """Support value sup { <x, u> : x in body }.

    Positively homogeneous and subadditive in u; u need not be a unit
    vector.
    """
    return body.support(u)


def support_batch(body: VCompact, directions: np.ndarray) -> np.ndarray:
    """Support values for a batch of directions, shape (m, d) -> (m,)."""
    U = np.atleast_2d(np.asarray(directions, dtype=float))
    if isinstance(body, Ball):
        return U @ body.center + body.radius * np.linalg.norm(U, axis=1)
    return np.max(U @ body.vertices.T, axis=1)


def probe_diameter(body: VCompact) -> float:
    return body.diameter()


@dataclass(frozen=True)
class HPolytope:
    """Intersection of halfspaces { x : <u_i, x> <= b_i } with unit normals.

    Construction canonicalizes the representation: normals are rescaled to
    unit length (offsets rescaled accordingly), and halfspaces sharing a
    normal are merged keeping the smallest offset.  With ``bounded=True``
    the feasible region is verified nonempty and bounded at construction
    (vertex enumeration in d <= 2, recession-ray LP in d = 3).
    """

    normals: np.ndarray
    offsets: np.ndarray
    bounded: bool = True

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.normals, dtype=float))
        b = np.atleast_1d(np.asarray(self.offsets, dtype=float))
        if A.shape[0] != b.shape[0]:
            raise ValueError("normals and offsets must have matching length")
        if A.shape[0] == 0:
            raise ValueError("at least one halfspace required")
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms < UNIT_TOL):
            raise ValueError("zero normal vector")
        # Renormalize only rows that need it, so constructing from already
        # canonical data is bit-exact (erosion offsets rely on this).
        off_unit = np.abs(norms - 1.0) > UNIT_TOL
        if np.any(off_unit):
            A = A.copy()
            b = b.copy()
            A[off_unit] = A[off_unit] / norms[off_unit, None]
            b[off_unit] = b[off_unit] / norms[off_unit]
        A, b = _merge_duplicate_normals(A, b)
        object.__setattr__(self, "normals", A)
        object.__setattr__(self, "offsets", b)
        if self.bounded:
            _check_bounded_nonempty(A, b)

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    def contains_points(self, pts: np.ndarray, tol: float = FEASIBILITY_TOL) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return np.all(pts @ self.normals.T <= self.offsets + tol, axis=1)

    def translated(self, shift) -> "HPolytope":
        shift = as_point(shift, self.dim)
        return HPolytope(self.normals, self.offsets + self.normals @ shift, bounded=self.bounded)

    def scaled(self, factor: float) -> "HPolytope":
        """Dilation x -> factor * x about the origin (factor > 0)."""
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return HPolytope(self.normals, self.offsets * factor, bounded=self.bounded)


def _merge_duplicate_normals(A: np.ndarray, b: np.ndarray):
    """Merge halfspaces whose normals agree within UNIT_TOL, keeping min offset."""
    keep_rows = []
    keep_offs = []
    for i in range(A.shape[0]):
        for k, row in enumerate(keep_rows):
            if np.linalg.norm(A[i] - row) <= UNIT_TOL:
                keep_offs[k] = min(keep_offs[k], b[i])
                break
        else:
            keep_rows.append(A[i])
            keep_offs.append(b[i])
    return np.array(keep_rows), np.array(keep_offs)


def _check_bounded_nonempty(A: np.ndarray, b: np.ndarray) -> None:
    d = A.shape[1]
    if d == 1:
        lo, hi = _interval_of(A, b)
        if lo > hi + FEASIBILITY_TOL:
            raise EmptyRegionError("halfspace system is infeasible")
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise UnboundedRegionError("interval is unbounded")
        return
    if d == 2:
        from .polygons import polygon_vertices

        polygon_vertices(HPolytope(A, b, bounded=False))
        return
    if d == 3:
        if not _recession_cone_trivial(A):
            raise UnboundedRegionError("recession cone contains a ray")
        if chebyshev_center(A, b) is None:
            raise EmptyRegionError("halfspace system is infeasible")
        return
    raise ValueError(f"bounded validation not supported for d={d}")


def _interval_of(A: np.ndarray, b: np.ndarray):
    """Feasible interval [lo, hi] of a 1-d halfspace system."""
    a = A[:, 0]
    hi = np.min(b[a > 0] / a[a > 0]) if np.any(a > 0) else np.inf
    lo = np.max(b[a < 0] / a[a < 0]) if np.any(a < 0) else -np.inf
    return lo, hi


def _recession_cone_trivial(A: np.ndarray) -> bool:
    """True iff { y : A y <= 0 } = { 0 }, via 2d box-capped LPs."""
    from scipy.optimize import linprog

    d = A.shape[1]
    for j in range(d):
        for sign in (1.0, -1.0):
            c = np.zeros(d)
            c[j] = -sign
            res = linprog(c, A_ub=A, b_ub=np.zeros(A.shape[0]), bounds=[(-1, 1)] * d, method="highs")
            if res.status != 0:
                raise RuntimeError(f"recession LP failed: {res.message}")
            if -res.fun > 1e-7:
                return False
    return True


def chebyshev_center(A: np.ndarray, b: np.ndarray):
    """Center and radius of the largest inscribed ball, or None if infeasible.

    Assumes unit normals, so the constraint is <u_i, x> + r <= b_i.  An
    unbounded region reports an infinite radius with a NaN center.
    """
    from scipy.optimize import linprog

    m, d = A.shape
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_ub = np.hstack([A, np.ones((m, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=b, bounds=[(None, None)] * d + [(None, None)], method="highs")
    if res.status == 3:
        return np.full(d, np.nan), math.inf
    if res.status != 0 or res.x is None:
        return None
    x, r = res.x[:d], res.x[-1]
    if r < -FEASIBILITY_TOL:
        return None
    return x, max(r, 0.0)


def box(low, high) -> HPolytope:
    """Axis-aligned box [low_1, high_1] x ... x [low_d, high_d]."""
    low = as_point(low)
    high = as_point(high, low.size)
    if np.any(high < low):
        raise ValueError("box needs low <= high componentwise")
    d = low.size
    eye = np.eye(d)
    normals = np.vstack([eye, -eye])
    offsets = np.concatenate([high, -low])
    return HPolytope(normals, offsets)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box used as a sampling / observation window."""

    low: np.ndarray
    high: np.ndarray

    def __post_init__(self):
        lo = as_point(self.low)
        hi = as_point(self.high, lo.size)
        if np.any(hi < lo):
            raise ValueError("box needs low <= high componentwise")
        object.__setattr__(self, "low", lo)
        object.__setattr__(self, "high", hi)

    @property
    def dim(self) -> int:
        return self.low.size

    def volume(self) -> float:
        return float(np.prod(self.high - self.low))

    def sample(self, generator: np.random.Generator, n: int) -> np.ndarray:
        u = generator.random((n, self.dim))
        return self.low + u * (self.high - self.low)

    def contains_points(self, pts: np.ndarray, tol: float = FEASIBILITY_TOL) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return np.all((pts >= self.low - tol) & (pts <= self.high + tol), axis=1)

    def as_hpolytope(self) -> "HPolytope":
        return box(self.low, self.high)


def is_axis_box(poly: HPolytope) -> tuple[np.ndarray, np.ndarray] | None:
    """Return (low, high) if the polytope is exactly an axis-aligned box."""
    d = poly.dim
    if poly.normals.shape[0] != 2 * d:
        return None
    low = np.full(d, np.nan)
    high = np.full(d, np.nan)
    for u, b in zip(poly.normals, poly.offsets):
        j = int(np.argmax(np.abs(u)))
        rest = np.delete(u, j)
        if np.any(np.abs(rest) > UNIT_TOL):
            return None
        if u[j] > 0:
            high[j] = b
        else:
            low[j] = -b
    if np.any(np.isnan(low)) or np.any(np.isnan(high)):
        return None
    return low, high


@dataclass(frozen=True)
class ComplementBody:
    """Closure of the complement of a bounded convex body with interior."""

    inner: HPolytope | Ball

    def __post_init__(self):
        if isinstance(self.inner, Ball):
            if self.inner.radius <= 0:
                raise ValueError("inner ball must have positive radius")
        else:
            if not self.inner.bounded:
                raise ValueError("inner polytope must be constructed bounded")
            cc = chebyshev_center(self.inner.normals, self.inner.offsets)
            if cc is None or cc[1] <= FEASIBILITY_TOL:
                raise ValueError("inner polytope must have nonempty interior")

    @property
    def dim(self) -> int:
        return self.inner.dim

    def contains_points(self, pts: np.ndarray, tol: float = FEASIBILITY_TOL) -> np.ndarray:
        """Membership in cl(inner complement): outside or on the inner boundary."""
        pts = np.atleast_2d(pts)
        if isinstance(self.inner, Ball):
            return np.linalg.norm(pts - self.inner.center, axis=1) >= self.inner.radius - tol
        return np.any(pts @ self.inner.normals.T >= self.inner.offsets - tol, axis=1)


ConvexComponent = HPolytope | Ball
Component = ConvexComponent | ComplementBody


@dataclass(frozen=True)
class SetModel:
    """Host set: a positively separated finite union of components.

    ``separation`` is a declared lower bound on pairwise distances between
    components; it is verified at construction (alternating projections
    between bounded convex components; margin checks against complement
    components).  A single-component model may leave it at infinity.
    """

    components: tuple[Component, ...]
    separation: float = math.inf

    def __init__(self, components, separation: float = math.inf):
        comps = tuple(components) if isinstance(components, (list, tuple)) else (components,)
        if len(comps) == 0:
            raise ValueError("at least one component required")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "separation", float(separation))
        dims = {c.dim for c in comps}
        if len(dims) != 1:
            raise ValueError("components must share one dimension")
        n_compl = sum(isinstance(c, ComplementBody) for c in comps)
        if n_compl > 1:
            raise ValueError("at most one complement component is possible")
        if len(comps) > 1:
            if not (0 < self.separation < math.inf):
                raise ValueError("multi-component models need a finite positive separation")
            _validate_separation(comps, self.separation)

    @property
    def dim(self) -> int:
        return self.components[0].dim

    @property
    def is_bounded(self) -> bool:
        return all(not isinstance(c, ComplementBody) for c in self.components)

    def contains_points(self, pts: np.ndarray, tol: float = FEASIBILITY_TOL) -> np.ndarray:
        pts = np.atleast_2d(pts)
        out = np.zeros(pts.shape[0], dtype=bool)
        for c in self.components:
            out |= c.contains_points(pts, tol)
        return out

    def bounding_box(self, indices=None) -> tuple[np.ndarray, np.ndarray]:
        """Axis-aligned bounding box of the selected bounded components."""
        if indices is None:
            indices = range(len(self.components))
        lows, highs = [], []
        for i in indices:
            c = self.components[i]
            if isinstance(c, ComplementBody):
                raise UnboundedRegionError("complement components have no bounding box")
            lo, hi = component_bbox(c)
            lows.append(lo)
            highs.append(hi)
        return np.min(lows, axis=0), np.max(highs, axis=0)


def component_bbox(c: ConvexComponent) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(c, Ball):
        return c.center - c.radius, c.center + c.radius
    verts = polytope_vertices_any_dim(c)
    return verts.min(axis=0), verts.max(axis=0)


def polytope_vertices_any_dim(poly: HPolytope) -> np.ndarray:
    """Vertices of a bounded polytope; exact in d <= 2, facet-enumerated in d = 3.

    d = 3 enumerates all triples of facets, so it is meant for small
    systems (model construction), not hot loops.
    """
    d = poly.dim
    A, b = poly.normals, poly.offsets
    if d == 1:
        lo, hi = _interval_of(A, b)
        return np.array([[lo], [hi]])
    if d == 2:
        from .polygons import polygon_vertices

        return polygon_vertices(poly)
    if d == 3:
        verts = []
        for idx in itertools.combinations(range(A.shape[0]), 3):
            sub = A[list(idx)]
            if abs(np.linalg.det(sub)) < 1e-12:
                continue
            v = np.linalg.solve(sub, b[list(idx)])
            if np.all(A @ v <= b + FEASIBILITY_TOL):
                verts.append(v)
        if not verts:
            raise EmptyRegionError("no feasible vertices")
        return _dedupe_points(np.array(verts))
    raise ValueError(f"vertex enumeration not supported for d={d}")


def _dedupe_points(pts: np.ndarray, tol: float = FEASIBILITY_TOL) -> np.ndarray:
    out = []
    for p in pts:
        if not any(np.linalg.norm(p - q) <= 10 * tol for q in out):
            out.append(p)
    return np.array(out)


def project_point(body: ConvexComponent, z: np.ndarray) -> np.ndarray:
    """Euclidean projection of z onto a bounded convex component.

    Polytope projection enumerates candidate active sets of size 1..d,
    which is exact for d <= 3 and fine for the small systems used here.
    """
    z = np.asarray(z, dtype=float)
    if isinstance(body, Ball):
        v = z - body.center
        n = np.linalg.norm(v)
        if n <= body.radius:
            return z.copy()
        return body.center + v * (body.radius / n)
    A, b = body.normals, body.offsets
    if np.all(A @ z <= b + FEASIBILITY_TOL):
        return z.copy()
    d = A.shape[1]
    best = None
    best_d2 = np.inf
    for k in range(1, d + 1):
        for idx in itertools.combinations(range(A.shape[0]), k):
            sub = A[list(idx)]
            if np.linalg.matrix_rank(sub, tol=1e-10) < k:
                continue
            # Project z onto the affine subspace { x : sub x = b_idx }.
            rhs = sub @ z - b[list(idx)]
            try:
                lam = np.linalg.solve(sub @ sub.T, rhs)
            except np.linalg.LinAlgError:
                continue
            x = z - sub.T @ lam
            if np.all(A @ x <= b + 1e-8):
                d2 = float(np.sum((x - z) ** 2))
                if d2 < best_d2:
                    best_d2 = d2
                    best = x
    if best is None:
        raise EmptyRegionError("projection found no feasible face; polytope may be empty")
    return best


def convex_distance(a: ConvexComponent, b: ConvexComponent, tol: float = 1e-9, max_iter: int = 10_000):
    """Distance between two bounded convex components by alternating projection."""
    if isinstance(a, Ball) and isinstance(b, Ball):
        return max(0.0, float(np.linalg.norm(a.center - b.center)) - a.radius - b.radius)
    p = _any_interior_point(a)
    q = _any_interior_point(b)
    prev = np.inf
    for _ in range(max_iter):
        p = project_point(a, q)
        q = project_point(b, p)
        dist = float(np.linalg.norm(p - q))
        if abs(prev - dist) <= tol:
            return dist
        prev = dist
    return float(np.linalg.norm(p - q))


def _any_interior_point(c: ConvexComponent) -> np.ndarray:
    if isinstance(c, Ball):
        return c.center.copy()
    cc = chebyshev_center(c.normals, c.offsets)
    if cc is None:
        raise EmptyRegionError("component is empty")
    return cc[0]


def _validate_separation(comps, separation: float) -> None:
    bounded = [(i, c) for i, c in enumerate(comps) if not isinstance(c, ComplementBody)]
    complement = [(i, c) for i, c in enumerate(comps) if isinstance(c, ComplementBody)]
    for (i, a), (j, b) in itertools.combinations(bounded, 2):
        dist = convex_distance(a, b)
        if dist < separation - FEASIBILITY_TOL:
            raise PreconditionViolation(
                f"components {i} and {j} are at distance {dist:.6g} < separation {separation:.6g}"
            )
    for (i, a) in bounded:
        for (j, cb) in complement:
            if not _inside_with_margin(a, cb.inner, separation):
                raise PreconditionViolation(
                    f"component {i} must lie inside the inner region of component {j} "
                    f"with margin >= {separation:.6g}"
                )


def _inside_with_margin(body: ConvexComponent, inner: HPolytope | Ball, margin: float) -> bool:
    """True iff body + margin*B1 is contained in inner."""
    if isinstance(inner, Ball):
        if isinstance(body, Ball):
            return np.linalg.norm(body.center - inner.center) + body.radius + margin <= inner.radius + FEASIBILITY_TOL
        verts = polytope_vertices_any_dim(body)
        return bool(np.max(np.linalg.norm(verts - inner.center, axis=1)) + margin <= inner.radius + FEASIBILITY_TOL)
    shrunk = inner.offsets - margin
    if isinstance(body, Ball):
        return bool(np.all(inner.normals @ body.center + body.radius <= shrunk + FEASIBILITY_TOL))
    verts = polytope_vertices_any_dim(body)
    return bool(np.all(verts @ inner.normals.T <= shrunk + FEASIBILITY_TOL))


def single_component(model: SetModel) -> Component | None:
    return model.components[0] if len(model.components) == 1 else None
