"""The random intersection body and its inclusion / volume statistics.

Translating the host set by each of n sampled points and intersecting
gives a shrinking random body; rescaled by n^(1/(alpha+1)) it converges
in distribution to the zero cell driven by the host's directional
intensity.  This module provides the finite-n side: per-trial inclusion
tests, the exact product formula for inclusion probabilities, explicit
polytope realizations and windowed volume moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryDensity, DirectionalIntensity, erosion_mass
from .errors import EmptyRegionError, UnboundedRegionError
from .geometry import (
    Ball,
    Box,
    HPolytope,
    SetModel,
    VCompact,
    contains_set_batch,
    sample_window,
    volume_exact,
    window_volume,
)
from .sampling import RngStream, sample_hyperplanes, sample_points, zero_cell
from .stats import wilson_interval


@dataclass(frozen=True)
class InclusionTrialResult:
    included: bool
    n: int
    scaling_exponent: float
    failures: int

    def __post_init__(self):
        if self.included != (self.failures == 0):
            raise ValueError("included must mean zero failures")


def inclusion_trial(
    probe: VCompact,
    model: SetModel,
    density: BoundaryDensity,
    n: int,
    rng: RngStream,
    block: int = 4096,
) -> InclusionTrialResult:
    """One trial: does the probe fit in the rescaled n-point intersection body?

    Equivalent formulation used here: every sampled point must lie in the
    host eroded by n^(-gamma) * probe.  Evaluation is blockwise and stops
    at the first failing block, so the failure count is exact only up to
    the evaluated region (it is at least 1 whenever included is False).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    gamma = density.scaling_exponent
    eps = float(n) ** (-gamma)
    failures = 0
    drawn = 0
    while drawn < n:
        take = min(block, n - drawn)
        pts = sample_points(model, density, rng, take)
        ok = contains_set_batch(model, probe, pts, eps)
        failures += int(np.count_nonzero(~ok))
        drawn += take
        if failures:
            break
    return InclusionTrialResult(failures == 0, n, gamma, failures)


def empirical_inclusion(
    probe: VCompact,
    model: SetModel,
    density: BoundaryDensity,
    n: int,
    trials: int,
    root_seed: int,
    stream_offset: int = 0,
) -> tuple[float, tuple[float, float]]:
    """Success frequency of the inclusion trial over independent streams,
    with its 95% Wilson interval."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    successes = 0
    for t in range(trials):
        rng = RngStream(root_seed, stream_offset + t)
        successes += int(inclusion_trial(probe, model, density, n, rng).included)
    p = successes / trials
    return p, wilson_interval(successes, trials, z=1.96)


def closed_form_inclusion(
    model: SetModel,
    density: BoundaryDensity,
    probe: VCompact,
    n: int,
    mc_points: int = 1_000_000,
    rng: RngStream | None = None,
) -> tuple[float, float]:
    """(1 - shell mass at scale n^(-gamma))^n and its propagated error.

    The shell mass is exact where a closed form exists (stderr 0);
    otherwise Monte Carlo error is pushed through the power by the delta
    method n (1-m)^(n-1) * se.
    """
    eps = float(n) ** (-density.scaling_exponent)
    shell = erosion_mass(model, density, probe, eps, mc_points=mc_points, rng=rng)
    base = max(0.0, 1.0 - shell.value)
    value = base**n
    stderr = 0.0
    if shell.method == "monte_carlo":
        stderr = n * base ** (n - 1) * shell.stderr
    return value, stderr


@dataclass(frozen=True)
class IntersectionBody:
    """Explicit intersection of polytope translates, with an emptiness flag."""

    polytope: HPolytope
    is_empty: bool


def realize_intersection(host: HPolytope, points: np.ndarray) -> IntersectionBody:
    """Intersection of host - p over the sampled points, kept in H-form.

    Each normal keeps its tightest translated offset
    b_i - max_j <u_i, p_j>; the result is exact and may be empty.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        raise ValueError("at least one translation point required")
    shifts = np.max(pts @ host.normals.T, axis=0)
    offsets = host.offsets - shifts
    poly = HPolytope(host.normals, offsets, bounded=False)
    return IntersectionBody(poly, _polytope_empty(poly))


def _polytope_empty(poly: HPolytope) -> bool:
    d = poly.dim
    if d == 1:
        a, b = poly.normals[:, 0], poly.offsets
        hi = np.min(b[a > 0] / a[a > 0]) if np.any(a > 0) else np.inf
        lo = np.max(b[a < 0] / a[a < 0]) if np.any(a < 0) else -np.inf
        return bool(lo > hi)
    from .geometry import chebyshev_center

    return chebyshev_center(poly.normals, poly.offsets) is None


@dataclass(frozen=True)
class MomentEstimate:
    m: int
    value: float
    stderr: float
    window: Box
    n: int
    trials: int

    def __post_init__(self):
        if self.stderr < 0 or self.value < 0:
            raise ValueError("moment estimates are nonnegative")


@dataclass(frozen=True)
class IntersectionProcess:
    """Finite-n side: host model, boundary density and the sample size."""

    model: SetModel
    density: BoundaryDensity
    n: int


@dataclass(frozen=True)
class ZeroCellProcess:
    """Limit side: directional intensity and boundary exponent."""

    intensity: DirectionalIntensity
    alpha: float
    radius: float | None = None


def volume_moment(
    process: IntersectionProcess | ZeroCellProcess,
    m: int,
    window: Box,
    trials: int,
    root_seed: int,
    mc_points: int = 4096,
    stream_offset: int = 0,
) -> MomentEstimate:
    """Monte Carlo moment of the windowed volume of the scaled realization.

    Per-trial volumes are exact for polytopal realizations in d <= 2;
    hosts without an explicit polytope realization (balls, unions,
    complements) are measured by hit-or-miss sampling of the full
    containment predicate inside the window.
    """
    if m < 1:
        raise ValueError("moment order must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    vols = np.empty(trials)
    for t in range(trials):
        rng = RngStream(root_seed, stream_offset + t)
        vols[t] = _one_volume(process, window, rng, mc_points)
    powered = vols**m
    value = float(np.mean(powered))
    stderr = float(np.std(powered, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    n = process.n if isinstance(process, IntersectionProcess) else 0
    return MomentEstimate(m, value, stderr, window, n, trials)


def _one_volume(process, window: Box, rng: RngStream, mc_points: int) -> float:
    if isinstance(process, ZeroCellProcess):
        # Hyperplanes farther than the window circumradius cannot change the
        # windowed cell, so that radius makes the windowed volume exact.
        radius = process.radius if process.radius is not None else window_circumradius(window)
        batch = sample_hyperplanes(process.intensity, process.alpha, radius, rng)
        sample = zero_cell(batch, window)
        return _windowed_polytope_volume(sample.cell, window)
    scale = float(process.n) ** process.density.scaling_exponent
    pts = sample_points(process.model, process.density, rng, process.n)
    host = process.model.components[0] if len(process.model.components) == 1 else None
    if isinstance(host, HPolytope) and host.dim <= 2:
        body = realize_intersection(host, pts)
        if body.is_empty:
            return 0.0
        scaled = HPolytope(body.polytope.normals, body.polytope.offsets * scale, bounded=False)
        return _windowed_polytope_volume(scaled, window)
    # Predicate-based volume: a window point y is in the scaled body iff
    # every sampled point keeps the translated singleton probe inside.
    probe_pts = sample_window(window, rng.generator, mc_points)
    hits = _scaled_membership(process.model, pts, probe_pts, scale)
    return window_volume(window) * float(np.count_nonzero(hits)) / mc_points


def window_circumradius(window: Box) -> float:
    corners = np.abs(np.stack([window.low, window.high]))
    return float(np.linalg.norm(corners.max(axis=0)))


def _windowed_polytope_volume(poly: HPolytope, window: Box) -> float:
    wpoly = window.as_hpolytope()
    joint = HPolytope(
        np.vstack([poly.normals, wpoly.normals]),
        np.concatenate([poly.offsets, wpoly.offsets]),
        bounded=False,
    )
    try:
        return volume_exact(joint)
    except EmptyRegionError:
        return 0.0
    except UnboundedRegionError:
        raise


def _scaled_membership(
    model: SetModel, sample_pts: np.ndarray, probe_pts: np.ndarray, scale: float, chunk: int = 262_144
) -> np.ndarray:
    """For window points y: is y/scale + p in the model for every sample p.

    When the translated cloud can only reach a single component (checked
    by bounding boxes against the separation), the all-samples condition
    collapses: for a ball component it is a farthest-point test over the
    sample hull, for a polytope it is membership in the realized
    intersection offsets.  Otherwise a generic full pass runs.
    """
    from .constants import FEASIBILITY_TOL

    base = probe_pts / scale
    comp = _sole_reachable_component(model, base, sample_pts)
    if isinstance(comp, Ball):
        anchors = _farthest_anchors(sample_pts)
        targets = comp.center - base
        d2 = np.max(
            np.sum((targets[:, None, :] - anchors[None, :, :]) ** 2, axis=2), axis=1
        )
        return d2 <= (comp.radius + FEASIBILITY_TOL) ** 2
    if isinstance(comp, HPolytope):
        shifts = np.max(sample_pts @ comp.normals.T, axis=0)
        offs = comp.offsets - shifts
        return np.all(base @ comp.normals.T <= offs + FEASIBILITY_TOL, axis=1)
    # Generic exact pass over all (point, sample) pairs.
    P = probe_pts.shape[0]
    n = sample_pts.shape[0]
    out = np.ones(P, dtype=bool)
    max_pairs = max(1, chunk // n)
    for start in range(0, P, max_pairs):
        stop = min(start + max_pairs, P)
        block = base[start:stop]
        shifted = (block[:, None, :] + sample_pts[None, :, :]).reshape(-1, model.dim)
        ok = model.contains_points(shifted).reshape(stop - start, n)
        out[start:stop] = np.all(ok, axis=1)
    return out


def _sole_reachable_component(model: SetModel, base: np.ndarray, sample_pts: np.ndarray):
    """The single component the translated cloud could possibly meet, or None.

    Sound bounding-box argument: the cloud lies in the Minkowski sum of
    the two point sets' boxes; components whose boxes keep a positive gap
    from it are unreachable.
    """
    from .geometry import ComplementBody, component_bbox

    if any(isinstance(c, ComplementBody) for c in model.components):
        return None
    lo = base.min(axis=0) + sample_pts.min(axis=0)
    hi = base.max(axis=0) + sample_pts.max(axis=0)
    reachable = []
    for c in model.components:
        clo, chi = component_bbox(c)
        gap = np.maximum(clo - hi, lo - chi)
        if np.max(gap) <= 1e-12:
            reachable.append(c)
        if len(reachable) > 1:
            return None
    return reachable[0] if len(reachable) == 1 else None


def _farthest_anchors(sample_pts: np.ndarray) -> np.ndarray:
    """Points achieving farthest-distance queries: the sample hull vertices."""
    if sample_pts.shape[1] == 2 and sample_pts.shape[0] >= 8:
        from .geometry.containment import _monotone_chain

        hull = _monotone_chain(sample_pts)
        if hull.shape[0] >= 3:
            return hull
    return sample_pts
