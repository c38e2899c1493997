"""Boundary densities, directional intensities, shell masses, reach bounds."""

import math

import numpy as np
import pytest

from zerocell.boundary import (
    AngularWeight,
    BoundaryDensity,
    DirectionalIntensity,
    ReachData,
    SphericalDensity,
    directional_intensity,
    erosion_depth_bounds,
    erosion_mass,
    inclusion_exponent,
    is_hemisphere_confined,
)
from zerocell.errors import DomainError, SpecMismatchError
from zerocell.geometry import Ball, ComplementBody, Hull, SetModel, box, polygon_vertices

SQUARE_MODEL = SetModel([box([0.0, 0.0], [1.0, 1.0])])
SQUARE_UNIFORM = BoundaryDensity.uniform(SQUARE_MODEL)
DISK_MODEL = SetModel([Ball([0.0, 0.0], 1.0)])
DISK_UNIFORM = BoundaryDensity.uniform(DISK_MODEL)


class TestDensitySpecs:
    def test_alpha_at_most_minus_one_rejected(self):
        with pytest.raises(DomainError):
            BoundaryDensity.radial_power(DISK_MODEL, -1.0)
        with pytest.raises(DomainError):
            BoundaryDensity.radial_power(DISK_MODEL, -1.5)

    def test_scaling_exponent_inverse(self):
        for alpha in (-0.5, 0.0, 1.0, 3.0):
            spec = BoundaryDensity.radial_power(DISK_MODEL, alpha)
            assert spec.scaling_exponent * (alpha + 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_radial_normalization_alpha_one(self):
        spec = BoundaryDensity.radial_power(DISK_MODEL, 1.0)
        assert spec.norm_constant == pytest.approx(3.0 / math.pi, rel=1e-12)

    def test_kind_mismatch(self):
        with pytest.raises(SpecMismatchError):
            BoundaryDensity.radial_power(SQUARE_MODEL, 1.0)
        with pytest.raises(SpecMismatchError):
            BoundaryDensity.dist_power(DISK_MODEL, 1.0)


class TestDirectionalIntensity:
    def test_square_uniform_atoms(self):
        nu = directional_intensity(SQUARE_MODEL, SQUARE_UNIFORM)
        assert nu.atom_directions.shape == (4, 2)
        assert np.allclose(np.sort(nu.atom_weights), [1, 1, 1, 1])
        dirs = {tuple(np.round(d, 9)) for d in nu.atom_directions}
        assert dirs == {(1, 0), (-1, 0), (0, 1), (0, -1)}
        assert nu.total_mass() == pytest.approx(4.0)

    def test_disk_uniform_mass(self):
        nu = directional_intensity(DISK_MODEL, DISK_UNIFORM)
        assert nu.atom_directions.shape[0] == 0
        assert nu.total_mass() == pytest.approx(2.0)

    def test_dead_facet_dropped(self):
        # g = 0 on the top facet of the square removes its atom.
        top_idx = None
        sq = SQUARE_MODEL.components[0]
        for i, u in enumerate(sq.normals):
            if np.allclose(u, [0, 1]):
                top_idx = i
        custom = BoundaryDensity(
            alpha=0.0,
            kind="uniform",
            norm_constant=1.0,
            support=(0,),
            facet_g=((0, top_idx, 0.0),),
        )
        nu = directional_intensity(SQUARE_MODEL, custom)
        assert nu.atom_directions.shape[0] == 3
        assert not any(np.allclose(d, [0, 1]) for d in nu.atom_directions)

    def test_mass_matches_independent_facet_lengths(self):
        tri = SetModel([box([0.0, 0.0], [2.0, 3.0])])
        dens = BoundaryDensity.uniform(tri)
        nu = directional_intensity(tri, dens)
        verts = polygon_vertices(tri.components[0])
        perimeter = np.sum(np.linalg.norm(np.roll(verts, -1, axis=0) - verts, axis=1))
        assert nu.total_mass() == pytest.approx(perimeter / 6.0)  # g = 1/area

    def test_complement_orientation(self):
        # Complement facets carry the host's outward normal, which points
        # into the inner body.
        inner = box([-1.0, -1.0], [1.0, 1.0])
        model = SetModel([ComplementBody(inner)])
        dens = BoundaryDensity(alpha=0.0, kind="uniform", norm_constant=0.5, support=(0,))
        nu = directional_intensity(model, dens)
        dirs = {tuple(np.round(d, 9)) for d in nu.atom_directions}
        assert dirs == {(1, 0), (-1, 0), (0, 1), (0, -1)}
        # Each facet has length 2 and weight g * 2 = 1.
        assert np.allclose(nu.atom_weights, 1.0)

    def test_two_ball_support_restriction(self):
        model = SetModel([Ball([0.0, 0.0], 1.0), Ball([5.0, 0.0], 1.0)], separation=3.0)
        dens = BoundaryDensity.uniform(model, support=(0,))
        nu = directional_intensity(model, dens)
        assert nu.total_mass() == pytest.approx(2.0)


class TestInclusionExponent:
    def test_point_probe_is_zero(self):
        nu = directional_intensity(SQUARE_MODEL, SQUARE_UNIFORM)
        assert inclusion_exponent(nu, Hull([[0.0, 0.0]]), 0.0) == 0.0

    def test_square_ball_probe(self):
        # Matches the closed-form erosion limit (1 - (1 - 2 rho eps)^2)/eps -> 4 rho.
        nu = directional_intensity(SQUARE_MODEL, SQUARE_UNIFORM)
        for rho in (0.1, 0.25, 0.6):
            assert inclusion_exponent(nu, Ball([0.0, 0.0], rho), 0.0) == pytest.approx(4 * rho)

    def test_disk_ball_probe(self):
        nu = directional_intensity(DISK_MODEL, DISK_UNIFORM)
        for rho in (0.1, 0.5):
            assert inclusion_exponent(nu, Ball([0.0, 0.0], rho), 0.0) == pytest.approx(2 * rho, rel=1e-9)

    def test_homogeneity_in_probe_scale(self):
        nu = directional_intensity(DISK_MODEL, DISK_UNIFORM)
        hull = Hull([[0.3, 0.1], [-0.2, 0.4], [0.1, -0.5]])
        for alpha in (-0.5, 0.0, 2.0):
            lam0 = inclusion_exponent(nu, hull, alpha)
            rho = 1.7
            lam1 = inclusion_exponent(nu, Hull(hull.vertices * rho), alpha)
            assert lam1 == pytest.approx(rho ** (alpha + 1.0) * lam0, rel=1e-9)

    def test_monotone_under_hull_inclusion(self):
        nu = directional_intensity(SQUARE_MODEL, SQUARE_UNIFORM)
        big = Hull([[0.5, 0.0], [-0.5, 0.3], [0.0, -0.6]])
        small = Hull([[0.25, 0.0], [-0.1, 0.1]])  # inside hull(big)
        assert inclusion_exponent(nu, small, 0.5) <= inclusion_exponent(nu, big, 0.5)

    def test_radial_alpha_one(self):
        spec = BoundaryDensity.radial_power(DISK_MODEL, 1.0)
        nu = directional_intensity(DISK_MODEL, spec)
        rho = 0.5
        assert inclusion_exponent(nu, Ball([0.0, 0.0], rho), 1.0) == pytest.approx(3 * rho * rho, rel=1e-9)


class TestErosionMass:
    def test_box_closed_form(self):
        shell = erosion_mass(SQUARE_MODEL, SQUARE_UNIFORM, Ball([0.0, 0.0], 1.0), 0.1)
        assert shell.method == "exact"
        assert shell.value == pytest.approx(1 - 0.8**2, abs=1e-15)

    def test_disk_closed_form(self):
        shell = erosion_mass(DISK_MODEL, DISK_UNIFORM, Ball([0.0, 0.0], 1.0), 0.1)
        assert shell.method == "exact"
        assert shell.value == pytest.approx(1 - 0.9**2, rel=1e-12)

    def test_zero_scale(self):
        shell = erosion_mass(SQUARE_MODEL, SQUARE_UNIFORM, Ball([0.0, 0.0], 1.0), 0.0)
        assert shell.value == 0.0 and shell.method == "exact"

    def test_nondecreasing_in_scale(self):
        vals = [
            erosion_mass(SQUARE_MODEL, SQUARE_UNIFORM, Ball([0.0, 0.0], 1.0), e).value
            for e in np.linspace(0, 0.6, 15)
        ]
        assert np.all(np.diff(vals) >= -1e-15)

    def test_monte_carlo_path_agrees(self):
        # Hull probe on a disk has no closed form; MC must agree with the
        # polytope-free exact value computed by hand for a segment probe.
        from zerocell.sampling import RngStream

        probe = Hull([[0.0, 0.0], [1.0, 0.0]])
        shell = erosion_mass(DISK_MODEL, DISK_UNIFORM, probe, 0.2, mc_points=200_000, rng=RngStream(3, 0))
        assert shell.method == "monte_carlo"
        # Oracle: area where x + [0, 0.2] segment leaves the unit disk is
        # area(disk) - area(disk cap intersection), computed numerically.
        xs = np.linspace(-1, 1, 2001)
        ys = np.linspace(-1, 1, 2001)
        X, Y = np.meshgrid(xs, ys)
        in_disk = X**2 + Y**2 <= 1
        fits = in_disk & ((X + 0.2) ** 2 + Y**2 <= 1)
        frac_fail = (in_disk.sum() - fits.sum()) / in_disk.sum()
        assert abs(shell.value - frac_fail) <= 4 * shell.stderr + 2e-3

    def test_dist_power_box_closed_form(self):
        spec = BoundaryDensity.dist_power(SQUARE_MODEL, 1.0)
        # int over the square of dist(x, boundary) is 1/6, so c = 6.
        assert spec.norm_constant == pytest.approx(6.0, rel=1e-12)
        shell = erosion_mass(SQUARE_MODEL, spec, Ball([0.0, 0.0], 1.0), 0.1)
        assert shell.method == "exact"
        # Shell integral: int_0^w t * (4 - 8t) dt = 2 w^2 - (8/3) w^3.
        w = 0.1
        assert shell.value == pytest.approx(6 * (2 * w**2 - 8 * w**3 / 3), rel=1e-12)


class TestReachBounds:
    def test_degenerate_chord_exact(self):
        rd = ReachData(delta_plus=1.0, delta_minus=1.0, r_bound=1.0, h_val=1.0)
        tp, tm = erosion_depth_bounds(1e-4, rd)
        assert tm == 1e-4
        assert tp == 1e-4

    def test_zero_support_gives_zero_plus(self):
        rd = ReachData(delta_plus=1.0, delta_minus=1.0, r_bound=1.0, h_val=0.0)
        tp, tm = erosion_depth_bounds(1e-3, rd)
        assert tp == 0.0
        assert tm >= 0.0

    def test_frozen_ratios_at_one_thousandth(self):
        # Formula-evaluated oracle values; the transition depths sit at
        # h -/+ (r^2 - h^2) eps / (2 delta) to first order.
        rd = ReachData(delta_plus=2.0, delta_minus=2.0, r_bound=1.0, h_val=0.5)
        tp, tm = erosion_depth_bounds(1e-3, rd)
        assert tp / 1e-3 == pytest.approx(0.4998124999911475, abs=1e-12)
        assert tm / 1e-3 == pytest.approx(0.5001875000090195, abs=1e-12)

    def test_ordering_and_limits_on_grid(self):
        for h in (0.0, 0.5, 1.0):
            for r in (1.0, 2.0):
                if h > r:
                    continue
                for dp in (1.0, 2.0):
                    for dm in (1.0, 2.0):
                        rd = ReachData(dp, dm, r, h)
                        upper = min(dp, dm, 1.0) / r
                        for eps in np.geomspace(upper * 1e-6, upper * 0.99, 40):
                            tp, tm = erosion_depth_bounds(float(eps), rd)
                            assert 0.0 <= tp <= tm + 1e-18

    def test_ratio_convergence_dyadic(self):
        rd = ReachData(delta_plus=2.0, delta_minus=2.0, r_bound=1.0, h_val=0.5)
        devs = []
        for k in range(5, 21):
            eps = 2.0**-k
            tp, tm = erosion_depth_bounds(eps, rd)
            devs.append(max(abs(tp / eps - 0.5), abs(tm / eps - 0.5)))
        assert all(a >= b for a, b in zip(devs, devs[1:]))
        assert devs[-1] < 1e-3

    def test_domain_guard(self):
        rd = ReachData(delta_plus=1.0, delta_minus=1.0, r_bound=2.0, h_val=0.5)
        with pytest.raises(DomainError):
            erosion_depth_bounds(0.6, rd)
        with pytest.raises(DomainError):
            erosion_depth_bounds(0.0, rd)


class TestHemisphere:
    def test_square_not_confined(self):
        nu = directional_intensity(SQUARE_MODEL, SQUARE_UNIFORM)
        assert not is_hemisphere_confined(nu)

    def test_upper_atoms_confined(self):
        s = 0.7071067811865476
        nu = DirectionalIntensity.from_atoms([[1, 0], [0, 1], [s, s]], [1, 1, 1])
        assert is_hemisphere_confined(nu)

    def test_half_circle_density_confined(self):
        sph = SphericalDensity(1.0, 2, AngularWeight("arc", 1.0, 0.0, math.pi))
        nu = DirectionalIntensity(2, np.zeros((0, 2)), np.zeros(0), sph)
        assert is_hemisphere_confined(nu)

    def test_full_circle_density_not_confined(self):
        nu = directional_intensity(DISK_MODEL, DISK_UNIFORM)
        assert not is_hemisphere_confined(nu)

    def test_d1_single_atom(self):
        assert is_hemisphere_confined(DirectionalIntensity.from_atoms([[1.0]], [1.0]))
        assert not is_hemisphere_confined(DirectionalIntensity.from_atoms([[1.0], [-1.0]], [1.0, 1.0]))

    def test_d3_octant_confined(self):
        nu = DirectionalIntensity.from_atoms(np.eye(3), [1, 1, 1])
        assert is_hemisphere_confined(nu)
        full = np.vstack([np.eye(3), -np.eye(3)])
        assert not is_hemisphere_confined(DirectionalIntensity.from_atoms(full, np.ones(6)))
