"""Reproducible random generation: density points, hyperplane batches, cells.

Randomness flows through counter-based Philox streams keyed by
(root_seed, stream_id): distinct stream ids give statistically independent
sequences and identical keys replay bit-identical output, which is what
makes results independent of worker scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betaincinv

from .boundary import (
    DIST_POWER_POLYTOPE,
    RADIAL_POWER_BALL,
    UNIFORM,
    BoundaryDensity,
    DirectionalIntensity,
    is_hemisphere_confined,
)
from .constants import FEASIBILITY_TOL, REJECTION_CAP, WINDOW_TAIL_PROB
from .errors import (
    MissingDensityBoundError,
    SamplerStallError,
    UnsupportedSpecError,
)
from .geometry import (
    Ball,
    Box,
    HPolytope,
    SetModel,
    polygon_vertices,
)


@dataclass(frozen=True)
class RngStream:
    """One reproducible random stream, addressed by (root_seed, stream_id)."""

    root_seed: int
    stream_id: int
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        bitgen = np.random.Philox(key=(np.uint64(self.root_seed), np.uint64(self.stream_id)))
        object.__setattr__(self, "generator", np.random.Generator(bitgen))

    def child(self, offset: int) -> "RngStream":
        return RngStream(self.root_seed, self.stream_id + offset)


def sample_points(model: SetModel, density: BoundaryDensity, rng: RngStream, size: int = 1) -> np.ndarray:
    """Draw points from the boundary density model; shape (size, d).

    Supported pairs: uniform on bounded components (bounding-box
    rejection), radial power on a single ball (exact beta inverse for the
    radius, uniform directions), distance power on a polytope only at
    exponent zero (which is uniform).  Anything else raises
    UnsupportedSpecError; rejection stalls past the proposal cap raise
    SamplerStallError.
    """
    if density.is_custom:
        raise UnsupportedSpecError("custom per-facet profiles are not samplable")
    gen = rng.generator
    if density.kind == RADIAL_POWER_BALL:
        if density.angular is not None:
            raise UnsupportedSpecError("anisotropic radial densities are not samplable")
        comp = model.components[density.support[0]]
        return _sample_radial_ball(comp, density.alpha, gen, size)
    if density.kind in (UNIFORM, DIST_POWER_POLYTOPE):
        if density.kind == DIST_POWER_POLYTOPE and density.alpha != 0.0:
            raise UnsupportedSpecError("distance-power sampling on polytopes needs alpha = 0")
        return _sample_uniform(model, density.support, gen, size)
    raise UnsupportedSpecError(f"unsupported density kind {density.kind!r}")


def _sample_radial_ball(comp: Ball, alpha: float, gen: np.random.Generator, size: int) -> np.ndarray:
    d = comp.dim
    u = gen.random(size)
    # Radius fraction has density proportional to tau^(d-1) (1-tau)^alpha.
    tau = betaincinv(d, alpha + 1.0, u)
    dirs = gen.standard_normal((size, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return comp.center + comp.radius * tau[:, None] * dirs


def _sample_uniform(model: SetModel, support: tuple[int, ...], gen: np.random.Generator, size: int) -> np.ndarray:
    comps = [model.components[i] for i in support]
    vols = np.array([_component_volume(c) for c in comps])
    weights = vols / vols.sum()
    counts = gen.multinomial(size, weights) if len(comps) > 1 else np.array([size])
    chunks = []
    for c, k in zip(comps, counts):
        if k:
            chunks.append(_rejection_uniform(c, gen, int(k)))
    pts = np.vstack(chunks) if chunks else np.zeros((0, model.dim))
    if len(chunks) > 1:
        gen.shuffle(pts, axis=0)
    return pts


def _component_volume(c) -> float:
    from .geometry import volume_exact

    return volume_exact(c)


def _rejection_uniform(comp, gen: np.random.Generator, size: int) -> np.ndarray:
    from .geometry import component_bbox

    lo, hi = component_bbox(comp)
    out = np.empty((size, lo.size))
    have = 0
    spent = 0
    while have < size:
        want = size - have
        batch = max(want * 2, 128)
        if spent + batch > REJECTION_CAP * size:
            raise SamplerStallError("uniform rejection sampler exceeded its proposal cap")
        pts = lo + gen.random((batch, lo.size)) * (hi - lo)
        ok = comp.contains_points(pts, tol=0.0)
        take = min(int(np.count_nonzero(ok)), want)
        if take:
            out[have : have + take] = pts[ok][:take]
            have += take
        spent += batch
    return out


# ---------------------------------------------------------------------------
# Poisson hyperplane batches and zero cells.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HyperplaneBatch:
    """Poisson draw of (distance, direction) pairs within a radius window."""

    distances: np.ndarray
    directions: np.ndarray
    radius: float
    alpha: float

    def __post_init__(self):
        t = np.asarray(self.distances, dtype=float).reshape(-1)
        u = np.asarray(self.directions, dtype=float)
        if t.size:
            u = u.reshape(t.size, -1)
            if np.any(t <= 0) or np.any(t > self.radius + 1e-12):
                raise ValueError("distances must lie in (0, radius]")
        else:
            u = u.reshape(0, u.shape[-1] if u.ndim >= 2 else 1)
        object.__setattr__(self, "distances", t)
        object.__setattr__(self, "directions", u)

    @property
    def size(self) -> int:
        return self.distances.size


def expected_batch_size(nu: DirectionalIntensity, alpha: float, radius: float) -> float:
    return nu.total_mass() * radius ** (alpha + 1.0) / (alpha + 1.0)


def sample_hyperplanes(
    nu: DirectionalIntensity, alpha: float, radius: float, rng: RngStream
) -> HyperplaneBatch:
    """Poisson batch with intensity t^alpha dt x nu on (0, radius] x sphere.

    Counts are Poisson with mean mass * R^(a+1)/(a+1); distances use the
    inverse transform R * U^(1/(a+1)); directions are categorical over the
    atoms and rejection-sampled against the spherical density, which must
    declare its maximum.
    """
    if not alpha > -1.0:
        raise ValueError("alpha must exceed -1")
    if radius <= 0:
        raise ValueError("radius must be positive")
    gen = rng.generator
    mean = expected_batch_size(nu, alpha, radius)
    n = int(gen.poisson(mean))
    t = radius * gen.random(n) ** (1.0 / (alpha + 1.0))
    t = t[t > 0]
    n = t.size
    dirs = _sample_directions(nu, gen, n)
    return HyperplaneBatch(t, dirs, radius, alpha)


def _sample_directions(nu: DirectionalIntensity, gen: np.random.Generator, n: int) -> np.ndarray:
    d = nu.dimension
    if n == 0:
        return np.zeros((0, d))
    atom_mass = float(np.sum(nu.atom_weights))
    sph_mass = nu.spherical.total_mass if nu.spherical is not None else 0.0
    total = atom_mass + sph_mass
    out = np.empty((n, d))
    pick_sph = gen.random(n) < (sph_mass / total)
    n_atom = int(np.count_nonzero(~pick_sph))
    if n_atom:
        probs = nu.atom_weights / atom_mass
        idx = gen.choice(len(probs), size=n_atom, p=probs)
        out[~pick_sph] = nu.atom_directions[idx]
    n_sph = n - n_atom
    if n_sph:
        out[pick_sph] = _rejection_sphere(nu, gen, n_sph)
    return out


def _rejection_sphere(nu: DirectionalIntensity, gen: np.random.Generator, n: int) -> np.ndarray:
    sph = nu.spherical
    bound = sph.max_value()
    if not (bound > 0) or not math.isfinite(bound):
        raise MissingDensityBoundError("spherical density needs a declared positive maximum")
    d = nu.dimension
    out = np.empty((n, d))
    have = 0
    spent = 0
    while have < n:
        batch = max((n - have) * 2, 64)
        if spent + batch > REJECTION_CAP * n:
            raise SamplerStallError("direction rejection sampler exceeded its proposal cap")
        cand = gen.standard_normal((batch, d))
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        accept = gen.random(batch) * bound <= sph(cand)
        take = min(int(np.count_nonzero(accept)), n - have)
        if take:
            out[have : have + take] = cand[accept][:take]
            have += take
        spent += batch
    return out


def default_window_radius(nu: DirectionalIntensity, alpha: float) -> float:
    """Radius at which an entirely empty batch has probability WINDOW_TAIL_PROB."""
    mass = nu.total_mass()
    return ((alpha + 1.0) * (-math.log(WINDOW_TAIL_PROB)) / mass) ** (1.0 / (alpha + 1.0))


@dataclass(frozen=True)
class ZeroCellSample:
    """One realization of the cell containing the origin, window-clipped."""

    cell: HPolytope
    truncated_by_window: bool
    possibly_unbounded: bool
    batch_size: int

    def contains_origin(self) -> bool:
        d = self.cell.dim
        return bool(self.cell.contains_points(np.zeros((1, d)))[0])


def zero_cell(batch: HyperplaneBatch, window: Box, possibly_unbounded: bool = False) -> ZeroCellSample:
    """Intersection of the batch halfspaces with the window box.

    The origin satisfies every batch halfspace strictly (distances are
    positive), so the cell is never empty; an empty batch returns the
    window itself, flagged as truncated.
    """
    d = window.dim
    wpoly = window.as_hpolytope()
    if batch.size == 0:
        return ZeroCellSample(wpoly, True, possibly_unbounded, 0)
    normals = np.vstack([batch.directions, wpoly.normals])
    offsets = np.concatenate([batch.distances, wpoly.offsets])
    cell = HPolytope(normals, offsets, bounded=False)
    truncated = _window_facet_active(cell, wpoly, d)
    return ZeroCellSample(cell, truncated, possibly_unbounded, batch.size)


def _window_facet_active(cell: HPolytope, wpoly: HPolytope, d: int) -> bool:
    if d == 1:
        lo, hi = _cell_interval(cell)
        wlo, whi = _cell_interval(wpoly)
        return bool(lo <= wlo + FEASIBILITY_TOL or hi >= whi - FEASIBILITY_TOL)
    if d == 2:
        verts = polygon_vertices(cell)
        slack = wpoly.offsets - verts @ wpoly.normals.T
        return bool(np.any(slack.min(axis=0) <= FEASIBILITY_TOL))
    # d >= 3: support LP per window facet.
    from scipy.optimize import linprog

    for u, b in zip(wpoly.normals, wpoly.offsets):
        res = linprog(-u, A_ub=cell.normals, b_ub=cell.offsets, bounds=[(None, None)] * d, method="highs")
        if res.status == 0 and -res.fun >= b - FEASIBILITY_TOL:
            return True
    return False


def _cell_interval(poly: HPolytope) -> tuple[float, float]:
    a = poly.normals[:, 0]
    b = poly.offsets
    hi = float(np.min(b[a > 0] / a[a > 0]))
    lo = float(np.max(b[a < 0] / a[a < 0]))
    return lo, hi


def sample_zero_cell(
    nu: DirectionalIntensity,
    alpha: float,
    rng: RngStream,
    window: Box | None = None,
    radius: float | None = None,
) -> ZeroCellSample:
    """Draw one zero cell; window defaults to the box circumscribing the
    default radius, and the unboundedness flag comes from the hemisphere
    test on the intensity."""
    r = radius if radius is not None else default_window_radius(nu, alpha)
    if window is None:
        d = nu.dimension
        window = Box(-r * np.ones(d), r * np.ones(d))
    batch = sample_hyperplanes(nu, alpha, r, rng)
    return zero_cell(batch, window, possibly_unbounded=is_hemisphere_confined(nu))


def probe_fits_in_batch(batch: HyperplaneBatch, window: Box, probe) -> bool:
    """Exact inclusion test of a probe body in the (window-clipped) cell.

    The probe fits iff its support value in each hyperplane direction stays
    below the distance, and it fits in the window box.
    """
    from .geometry import support_batch

    wpoly = window.as_hpolytope()
    h_w = support_batch(probe, wpoly.normals)
    if np.any(h_w > wpoly.offsets + FEASIBILITY_TOL):
        return False
    if batch.size == 0:
        return True
    h = support_batch(probe, batch.directions)
    return bool(np.all(h <= batch.distances + FEASIBILITY_TOL))
