"""Set containment predicates and Minkowski erosion.

The central question answered here is: does the translated scaled probe
``x + eps*L`` fit inside the host set ``K``?  For a single convex polytope
this reduces exactly to membership of ``x`` in a polytope with per-facet
offsets shifted by ``eps * h(L, u_i)``; the other component types get their
own exact decision procedures, and unions reduce to a per-component test
because a connected probe with diameter below the declared separation can
only touch one component.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..constants import FEASIBILITY_TOL
from ..errors import PreconditionViolation
from .bodies import (
    Ball,
    Box,
    ComplementBody,
    Component,
    HPolytope,
    Hull,
    SetModel,
    VCompact,
    is_axis_box,
    polytope_vertices_any_dim,
    probe_diameter,
    project_point,
    support_batch,
)


def eroded_offsets(poly: HPolytope, probe: VCompact, eps: float) -> np.ndarray:
    """Offsets of { x : x + eps*probe inside poly } = b_i - eps*h(probe, u_i)."""
    return poly.offsets - eps * support_batch(probe, poly.normals)


@dataclass(frozen=True)
class ErosionRegion:
    """The erosion { x : x + scale * structuring  is a subset of source }.

    ``exact_hrep`` is present when the source is a single polytope;
    ``exact_ball`` when the source and structuring element are both balls.
    Otherwise membership falls back to the containment predicate.
    """

    source: SetModel
    structuring: VCompact
    scale: float
    exact_hrep: HPolytope | None = None
    exact_ball: Ball | None = None
    known_empty: bool = False

    def contains_batch(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        if self.known_empty:
            return np.zeros(pts.shape[0], dtype=bool)
        if self.exact_hrep is not None:
            return self.exact_hrep.contains_points(pts)
        if self.exact_ball is not None:
            return self.exact_ball.contains_points(pts)
        return contains_set_batch(self.source, self.structuring, pts, self.scale)

    def contains(self, x) -> bool:
        return bool(self.contains_batch(np.atleast_2d(np.asarray(x, dtype=float)))[0])


def erode(model: SetModel, probe: VCompact, eps: float) -> ErosionRegion:
    """Erosion of the model by ``eps * probe``; exact forms where possible."""
    if eps < 0:
        raise ValueError("erosion scale must be nonnegative")
    comp = model.components[0] if len(model.components) == 1 else None
    if isinstance(comp, HPolytope):
        hrep = HPolytope(comp.normals, eroded_offsets(comp, probe, eps), bounded=False)
        return ErosionRegion(model, probe, eps, exact_hrep=hrep)
    if isinstance(comp, Ball) and isinstance(probe, Ball):
        radius = comp.radius - eps * probe.radius
        center = comp.center - eps * probe.center
        if radius < 0:
            return ErosionRegion(model, probe, eps, known_empty=True)
        return ErosionRegion(model, probe, eps, exact_ball=Ball(center, radius))
    return ErosionRegion(model, probe, eps)


def contains_set(model: SetModel, probe: VCompact, x, eps: float) -> bool:
    """True iff x + eps*probe is a subset of the model."""
    return bool(contains_set_batch(model, probe, np.atleast_2d(np.asarray(x, dtype=float)), eps)[0])


def contains_set_batch(model: SetModel, probe: VCompact, xs: np.ndarray, eps: float) -> np.ndarray:
    """Vectorized containment of x_k + eps*probe in the model, one bool per row.

    For multi-component models the probe must satisfy
    eps * diam(probe) < separation, so that the connected probe can only
    meet one component and containment in the union decomposes.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if len(model.components) > 1:
        if eps * probe_diameter(probe) >= model.separation:
            raise PreconditionViolation(
                "eps * diam(probe) must stay below the model separation for unions"
            )
    out = np.zeros(xs.shape[0], dtype=bool)
    for comp in model.components:
        rem = ~out
        if not np.any(rem):
            break
        out[rem] = _component_contains(comp, probe, xs[rem], eps)
    return out


def _component_contains(comp: Component, probe: VCompact, xs: np.ndarray, eps: float) -> np.ndarray:
    if isinstance(comp, HPolytope):
        offs = eroded_offsets(comp, probe, eps)
        return np.all(xs @ comp.normals.T <= offs + FEASIBILITY_TOL, axis=1)
    if isinstance(comp, Ball):
        if isinstance(probe, Ball):
            shift = xs + eps * probe.center
            return np.linalg.norm(shift - comp.center, axis=1) <= comp.radius - eps * probe.radius + FEASIBILITY_TOL
        pts = xs[:, None, :] + eps * probe.vertices[None, :, :]
        dist = np.linalg.norm(pts - comp.center, axis=2)
        return np.all(dist <= comp.radius + FEASIBILITY_TOL, axis=1)
    return _complement_contains(comp, probe, xs, eps)


# ---------------------------------------------------------------------------
# Complement components: the probe must avoid the interior of the inner body.
# ---------------------------------------------------------------------------


def _complement_contains(comp: ComplementBody, probe: VCompact, xs: np.ndarray, eps: float) -> np.ndarray:
    inner = comp.inner
    if isinstance(probe, Ball):
        centers = xs + eps * probe.center
        r = eps * probe.radius
        if isinstance(inner, Ball):
            return np.linalg.norm(centers - inner.center, axis=1) >= inner.radius + r - FEASIBILITY_TOL
        return _dist_to_polytope(inner, centers) >= r - FEASIBILITY_TOL
    if isinstance(inner, Ball):
        return _hull_avoids_ball(probe, xs, eps, inner)
    return _hull_avoids_polytope(probe, xs, eps, inner)


def _dist_to_polytope(poly: HPolytope, pts: np.ndarray) -> np.ndarray:
    bb = is_axis_box(poly)
    if bb is not None:
        lo, hi = bb
        gap = np.maximum(np.maximum(lo - pts, pts - hi), 0.0)
        return np.linalg.norm(gap, axis=1)
    return np.array([np.linalg.norm(p - project_point(poly, p)) for p in pts])


def _hull_avoids_ball(probe: Hull, xs: np.ndarray, eps: float, inner: Ball) -> np.ndarray:
    # Distance from the inner center to each translated hull, via projection
    # of the center onto the hull expressed in probe coordinates.
    out = np.empty(xs.shape[0], dtype=bool)
    for k, x in enumerate(xs):
        target = (inner.center - x) / eps if eps > 0 else None
        if eps == 0:
            # Degenerate probe: x itself must avoid the open ball.
            out[k] = np.linalg.norm(x - inner.center) >= inner.radius - FEASIBILITY_TOL
            continue
        proj = _project_onto_hull(probe.vertices, target)
        dist = eps * np.linalg.norm(proj - target)
        out[k] = dist >= inner.radius - FEASIBILITY_TOL
    return out


def _project_onto_hull(vertices: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Euclidean projection of z onto conv(vertices), exact for small hulls.

    Enumerates affinely independent vertex subsets of size <= d+1; the
    projection lies in the relative interior of one triangulated face, so
    the equality-constrained least-squares candidate with nonnegative
    barycentric weights and minimal distance is the exact answer.
    """
    import itertools

    m, d = vertices.shape
    if m == 1:
        return vertices[0]
    best = None
    best_d2 = np.inf
    for k in range(1, min(m, d + 1) + 1):
        for idx in itertools.combinations(range(m), k):
            V = vertices[list(idx)]
            if k > 1 and np.linalg.matrix_rank(V[1:] - V[0], tol=1e-12) < k - 1:
                continue
            if k == 1:
                lam = np.array([1.0])
            else:
                # Stationarity of min |lam@V - z|^2 with sum(lam) = 1.
                G = V @ V.T
                kkt = np.zeros((k + 1, k + 1))
                kkt[:k, :k] = G
                kkt[:k, k] = 1.0
                kkt[k, :k] = 1.0
                rhs = np.concatenate([V @ z, [1.0]])
                try:
                    sol = np.linalg.solve(kkt, rhs)
                except np.linalg.LinAlgError:
                    continue
                lam = sol[:k]
            if np.any(lam < -1e-10):
                continue
            p = lam @ V
            d2 = float(np.sum((p - z) ** 2))
            if d2 < best_d2:
                best_d2 = d2
                best = p
    return best


def _hull_avoids_polytope(probe: Hull, xs: np.ndarray, eps: float, inner: HPolytope) -> np.ndarray:
    """True where the translated hull does not meet the polytope interior.

    Decision is a separating-direction search (exact for convex polytopes):
    candidate axes are the inner facet normals, the probe hull facet
    normals, cross products of edge directions (d=3) and vertex
    differences.  d = 1 reduces to interval arithmetic.
    """
    d = probe.dim
    if d == 1:
        lo, hi = _interval_1d(inner)
        pmin = xs[:, 0] + eps * float(np.min(probe.vertices[:, 0]))
        pmax = xs[:, 0] + eps * float(np.max(probe.vertices[:, 0]))
        return (pmax <= lo + FEASIBILITY_TOL) | (pmin >= hi - FEASIBILITY_TOL)
    axes = _separation_axes(inner, probe)
    inner_verts = polytope_vertices_any_dim(inner)
    inner_proj = inner_verts @ axes.T
    inner_lo = inner_proj.min(axis=0)
    inner_hi = inner_proj.max(axis=0)
    h_probe = eps * np.max(axes @ probe.vertices.T, axis=1)  # h(eps*L, v)
    h_probe_neg = eps * np.max(-(axes @ probe.vertices.T), axis=1)  # h(eps*L, -v)
    proj = xs @ axes.T
    sep_low = proj + h_probe <= inner_lo + FEASIBILITY_TOL
    sep_high = -(proj) + h_probe_neg <= -(inner_hi) + FEASIBILITY_TOL
    return np.any(sep_low | sep_high, axis=1)


def _interval_1d(poly: HPolytope):
    a = poly.normals[:, 0]
    b = poly.offsets
    hi = np.min(b[a > 0] / a[a > 0])
    lo = np.max(b[a < 0] / a[a < 0])
    return lo, hi


def _separation_axes(inner: HPolytope, probe: Hull) -> np.ndarray:
    d = inner.dim
    cands = [inner.normals]
    hull_normals, hull_edges = _hull_face_data(probe.vertices)
    if hull_normals.size:
        cands.append(hull_normals)
    if d == 3:
        inner_edges = _pairwise_crosses(inner.normals, inner.normals)
        if inner_edges.size and hull_edges.size:
            cands.append(_pairwise_crosses(inner_edges, hull_edges))
        inner_verts = polytope_vertices_any_dim(inner)
        diffs = (probe.vertices[:, None, :] - inner_verts[None, :, :]).reshape(-1, 3)
        cands.append(diffs)
    axes = np.vstack(cands)
    norms = np.linalg.norm(axes, axis=1)
    axes = axes[norms > 1e-12] / norms[norms > 1e-12, None]
    return np.unique(np.round(axes, 12), axis=0)


def _pairwise_crosses(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    cr = np.cross(a[:, None, :], b[None, :, :]).reshape(-1, 3)
    norms = np.linalg.norm(cr, axis=1)
    return cr[norms > 1e-12]


def _hull_face_data(vertices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Outward facet normals and edge directions of a point hull.

    Handles degenerate (lower-rank) hulls: segments contribute their
    direction as an edge, planar 3-d hulls contribute the plane normal.
    """
    d = vertices.shape[1]
    center = vertices.mean(axis=0)
    centered = vertices - center
    if d == 2:
        hull = _monotone_chain(vertices)
        if hull.shape[0] < 2:
            return np.empty((0, 2)), np.empty((0, 2))
        edges = np.roll(hull, -1, axis=0) - hull
        if hull.shape[0] == 2:
            edges = edges[:1]
        normals = np.column_stack([edges[:, 1], -edges[:, 0]])
        return normals, edges
    if d == 3:
        rank = np.linalg.matrix_rank(centered, tol=1e-10)
        if rank >= 3:
            from scipy.spatial import ConvexHull

            hull = ConvexHull(vertices)
            normals = hull.equations[:, :3]
            edges = []
            for simplex in hull.simplices:
                pts = vertices[simplex]
                edges.extend(pts[(i + 1) % 3] - pts[i] for i in range(3))
            return normals, np.array(edges)
        if rank == 2:
            # Planar hull: plane normal plus in-plane edges.
            _, _, vt = np.linalg.svd(centered)
            n = vt[2]
            basis = vt[:2]
            flat = centered @ basis.T
            hull2 = _monotone_chain(flat)
            edges2 = np.roll(hull2, -1, axis=0) - hull2
            edges = edges2 @ basis
            in_plane_normals = np.column_stack([edges2[:, 1], -edges2[:, 0]]) @ basis
            return np.vstack([n[None, :], in_plane_normals]), edges
        if rank == 1:
            _, _, vt = np.linalg.svd(centered)
            return np.empty((0, 3)), vt[:1]
        return np.empty((0, 3)), np.empty((0, 3))
    raise ValueError("hull face data supported for d in {2, 3}")


def _monotone_chain(points: np.ndarray) -> np.ndarray:
    """Convex hull of 2-d points in counter-clockwise order."""
    pts = np.unique(np.round(points, 12), axis=0)
    if pts.shape[0] <= 2:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    seq = [(float(x), float(y)) for x, y in pts[order]]

    def half(items):
        out: list[tuple[float, float]] = []
        for p in items:
            while len(out) >= 2:
                ox, oy = out[-2]
                ax, ay = out[-1]
                if (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox) <= 1e-18:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = half(seq)
    upper = half(seq[::-1])
    return np.array(lower[:-1] + upper[:-1])


def model_contains_points(model: SetModel, pts: np.ndarray, tol: float = FEASIBILITY_TOL) -> np.ndarray:
    """Plain point membership in the model (probe = single point at origin)."""
    return model.contains_points(pts, tol)


def sample_window(window: Box | Ball, generator: np.random.Generator, n: int) -> np.ndarray:
    if isinstance(window, Box):
        return window.sample(generator, n)
    d = window.dim
    g = generator.standard_normal((n, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    radii = window.radius * generator.random(n) ** (1.0 / d)
    return window.center + g * radii[:, None]


def window_volume(window: Box | Ball) -> float:
    if isinstance(window, Box):
        return window.volume()
    from .polygons import unit_ball_volume

    return unit_ball_volume(window.dim) * window.radius ** window.dim


def volume_mc(
    contains_batch,
    window: Box | Ball,
    n_samples: int,
    generator: np.random.Generator,
    chunk: int = 262_144,
) -> tuple[float, float]:
    """Hit-or-miss volume estimate of a region through its membership oracle.

    Returns (estimate, standard_error) with
    estimate = |W| * hits/n and se = |W| * sqrt(p(1-p)/n).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    vol_w = window_volume(window)
    hits = 0
    done = 0
    while done < n_samples:
        take = min(chunk, n_samples - done)
        pts = sample_window(window, generator, take)
        hits += int(np.count_nonzero(contains_batch(pts)))
        done += take
    p = hits / n_samples
    return vol_w * p, vol_w * float(np.sqrt(p * (1.0 - p) / n_samples))
