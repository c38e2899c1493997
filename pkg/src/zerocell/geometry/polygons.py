"""Exact planar computations: vertex enumeration, areas, intrinsic volumes."""

from __future__ import annotations

import math

import numpy as np

from ..constants import FEASIBILITY_TOL
from ..errors import EmptyRegionError, UnboundedRegionError
from .bodies import Ball, HPolytope, chebyshev_center, _interval_of


def unit_ball_volume(d: int) -> float:
    """Lebesgue volume of the d-dimensional unit ball."""
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def polygon_vertices(poly: HPolytope) -> np.ndarray:
    """Counter-clockwise vertex cycle of a bounded 2-d halfspace intersection.

    All pairwise boundary-line intersections are formed and those violating
    any constraint by more than FEASIBILITY_TOL are discarded; this stays
    correct in the presence of redundant halfspaces, which are the common
    case for sampled cells.  Raises EmptyRegionError / UnboundedRegionError.
    """
    if poly.dim != 2:
        raise ValueError("polygon_vertices requires d=2")
    A, b = poly.normals, poly.offsets
    m = A.shape[0]
    angles = np.sort(np.arctan2(A[:, 1], A[:, 0]))
    gaps = np.diff(np.concatenate([angles, angles[:1] + 2 * np.pi]))
    if m < 3 or gaps.max() >= np.pi - 1e-12:
        # Normals do not positively span the plane: empty or unbounded.
        if chebyshev_center(A, b) is None:
            raise EmptyRegionError("halfspace system is infeasible")
        raise UnboundedRegionError("normals lie in a closed halfplane")

    ii, jj = np.triu_indices(m, k=1)
    det = A[ii, 0] * A[jj, 1] - A[ii, 1] * A[jj, 0]
    ok = np.abs(det) > 1e-12
    ii, jj, det = ii[ok], jj[ok], det[ok]
    # Cramer solve of the 2x2 systems  A[i] x = b[i], A[j] x = b[j].
    x = (b[ii] * A[jj, 1] - b[jj] * A[ii, 1]) / det
    y = (A[ii, 0] * b[jj] - A[jj, 0] * b[ii]) / det
    cand = np.column_stack([x, y])
    feas = np.all(cand @ A.T <= b + FEASIBILITY_TOL, axis=1)
    cand = cand[feas]
    if cand.shape[0] == 0:
        raise EmptyRegionError("no feasible vertex")
    cand = _dedupe_ordered(cand)
    return cand


def _dedupe_ordered(pts: np.ndarray) -> np.ndarray:
    center = pts.mean(axis=0)
    order = np.argsort(np.arctan2(pts[:, 1] - center[1], pts[:, 0] - center[0]))
    pts = pts[order]
    keep = [pts[0]]
    for p in pts[1:]:
        if np.linalg.norm(p - keep[-1]) > 10 * FEASIBILITY_TOL:
            keep.append(p)
    if len(keep) > 1 and np.linalg.norm(keep[0] - keep[-1]) <= 10 * FEASIBILITY_TOL:
        keep.pop()
    return np.array(keep)


def shoelace_area(verts: np.ndarray) -> float:
    if verts.shape[0] < 3:
        return 0.0
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.abs(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))


def cycle_perimeter(verts: np.ndarray) -> float:
    if verts.shape[0] < 2:
        return 0.0
    diffs = np.roll(verts, -1, axis=0) - verts
    return float(np.sum(np.linalg.norm(diffs, axis=1)))


def volume_exact(region: HPolytope | Ball) -> float:
    """Exact Lebesgue volume: interval length (d=1), shoelace area (d=2),
    or kappa_d r^d for balls in any dimension."""
    if isinstance(region, Ball):
        return unit_ball_volume(region.dim) * region.radius ** region.dim
    if region.dim == 1:
        lo, hi = _interval_of(region.normals, region.offsets)
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise UnboundedRegionError("interval is unbounded")
        return max(0.0, hi - lo)
    if region.dim == 2:
        return shoelace_area(polygon_vertices(region))
    raise ValueError("exact polytope volume supported only for d <= 2")


def intrinsic_volumes_2d(poly: HPolytope) -> tuple[float, float, float]:
    """(V0, V1, V2) of a bounded planar polytope in Steiner normalization.

    area(P + eps*B1) = V2 + 2*eps*V1 + pi*eps^2*V0, so V1 is half the
    boundary cycle length; degenerate (flat) polygons traverse both sides
    of the segment and still satisfy the formula.
    """
    verts = polygon_vertices(poly)
    v2 = shoelace_area(verts)
    v1 = 0.5 * cycle_perimeter(verts)
    return 1.0, v1, v2
