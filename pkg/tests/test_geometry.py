"""Geometry layer: support values, erosion, containment, volumes."""

import math

import numpy as np
import pytest

from zerocell.errors import (
    EmptyRegionError,
    PreconditionViolation,
    UnboundedRegionError,
)
from zerocell.geometry import (
    Ball,
    Box,
    ComplementBody,
    HPolytope,
    Hull,
    SetModel,
    box,
    contains_set,
    contains_set_batch,
    convex_distance,
    erode,
    intrinsic_volumes_2d,
    polygon_vertices,
    project_point,
    support,
    support_batch,
    volume_exact,
    volume_mc,
)
from zerocell.sampling import RngStream

SQUARE = box([0.0, 0.0], [1.0, 1.0])
SQUARE_MODEL = SetModel([SQUARE])


class TestSupport:
    def test_square_axis(self):
        hull = Hull([[1, 1], [1, -1], [-1, 1], [-1, -1]])
        assert support(hull, [1.0, 0.0]) == 1.0

    def test_centered_ball_is_radius(self):
        assert support(Ball([0.0, 0.0], 0.7), [0.0, 1.0]) == pytest.approx(0.7)

    def test_shifted_ball(self):
        # Frozen from a 1e6-point boundary sampling oracle (2.4999999999876).
        assert support(Ball([1.0, 2.0], 0.5), [0.0, 1.0]) == pytest.approx(2.5, abs=1e-12)

    def test_homogeneity_and_subadditivity(self):
        gen = RngStream(101, 0).generator
        for _ in range(50):
            hull = Hull(gen.normal(size=(5, 2)))
            u = gen.normal(size=2)
            v = gen.normal(size=2)
            lam = float(gen.random()) * 3.0 + 0.1
            assert support(hull, lam * u) == pytest.approx(lam * support(hull, u), rel=1e-12)
            assert support(hull, u + v) <= support(hull, u) + support(hull, v) + 1e-12

    def test_batch_matches_scalar(self):
        hull = Hull([[0.3, -1.2], [2.0, 0.1], [-0.5, 0.8]])
        dirs = RngStream(7, 7).generator.normal(size=(20, 2))
        batch = support_batch(hull, dirs)
        for u, h in zip(dirs, batch):
            assert h == pytest.approx(support(hull, u))


class TestErode:
    def test_box_by_unit_ball(self):
        region = erode(SQUARE_MODEL, Ball([0.0, 0.0], 1.0), 0.1)
        verts = polygon_vertices(region.exact_hrep)
        assert volume_exact(region.exact_hrep) == pytest.approx(0.64)
        assert np.allclose(np.sort(verts, axis=0), [[0.1, 0.1], [0.1, 0.1], [0.9, 0.9], [0.9, 0.9]])

    def test_ball_by_ball_shrinks_radius(self):
        model = SetModel([Ball([0.0, 0.0], 1.0)])
        region = erode(model, Ball([0.0, 0.0], 0.5), 0.2)
        assert region.exact_ball.radius == pytest.approx(0.9)

    def test_square_by_segment_grid_oracle(self):
        # Brute-force membership grid oracle: erosion by a horizontal unit
        # segment at scale 0.2 is the box [0, 0.8] x [0, 1].
        region = erode(SQUARE_MODEL, Hull([[0.0, 0.0], [1.0, 0.0]]), 0.2)
        xs = np.linspace(-0.1, 1.1, 400)
        X, Y = np.meshgrid(xs, xs)
        pts = np.column_stack([X.ravel(), Y.ravel()])
        got = region.contains_batch(pts)
        want = (pts[:, 0] >= -1e-9) & (pts[:, 0] <= 0.8 + 1e-9) & (pts[:, 1] >= -1e-9) & (pts[:, 1] <= 1 + 1e-9)
        assert np.array_equal(got, want)

    def test_rejects_negative_scale(self):
        with pytest.raises(ValueError):
            erode(SQUARE_MODEL, Ball([0.0, 0.0], 1.0), -0.1)

    def test_scale_zero_is_identity(self):
        region = erode(SQUARE_MODEL, Hull([[0.3, -0.4], [0.1, 0.2]]), 0.0)
        pts = RngStream(5, 1).generator.random((200, 2)) * 1.5 - 0.25
        assert np.array_equal(region.contains_batch(pts), SQUARE.contains_points(pts))

    def test_monotone_in_scale(self):
        probe = Hull([[0.5, 0.0], [-0.2, 0.4], [0.0, -0.3]])
        small = erode(SQUARE_MODEL, probe, 0.05)
        large = erode(SQUARE_MODEL, probe, 0.2)
        pts = RngStream(5, 2).generator.random((500, 2))
        inside_large = large.contains_batch(pts)
        inside_small = small.contains_batch(pts)
        assert np.all(~inside_large | inside_small)

    def test_two_code_paths_agree_exactly(self):
        # Containment and the explicit eroded H-form must give identical
        # answers point for point.
        probe = Hull([[0.4, 0.1], [-0.3, 0.2], [0.0, -0.5]])
        gen = RngStream(5, 3).generator
        for eps in (0.0, 0.01, 0.1, 0.3):
            region = erode(SQUARE_MODEL, probe, eps)
            pts = gen.random((400, 2)) * 1.4 - 0.2
            direct = contains_set_batch(SQUARE_MODEL, probe, pts, eps)
            via_hrep = region.exact_hrep.contains_points(pts)
            assert np.array_equal(direct, via_hrep)


class TestContainsSet:
    def test_inscribed_disk(self):
        assert contains_set(SQUARE_MODEL, Ball([0.0, 0.0], 1.0), [0.5, 0.5], 0.4)

    def test_two_ball_gap(self):
        model = SetModel([Ball([0.0, 0.0], 1.0), Ball([5.0, 0.0], 1.0)], separation=3.0)
        assert not contains_set(model, Ball([0.0, 0.0], 1.0), [2.5, 0.0], 0.5)

    def test_union_precondition(self):
        model = SetModel([Ball([0.0, 0.0], 1.0), Ball([5.0, 0.0], 1.0)], separation=3.0)
        with pytest.raises(PreconditionViolation):
            contains_set(model, Ball([0.0, 0.0], 1.0), [0.0, 0.0], 2.0)

    def test_sampled_subset_oracle(self):
        # Every point of a dense sample of x + eps*L must be in K exactly
        # when the predicate says the whole set fits.
        probe = Hull([[0.0, 0.0], [1.0, 0.2], [0.4, 0.9]])
        gen = RngStream(77, 0).generator
        weights = gen.random((100_000, 3))
        weights /= weights.sum(axis=1, keepdims=True)
        cloud = weights @ probe.vertices
        for trial in range(40):
            x = gen.random(2) * 1.2 - 0.1
            eps = 0.05
            claimed = contains_set(SQUARE_MODEL, probe, x, eps)
            sampled = bool(np.all(SQUARE.contains_points(x + eps * cloud, tol=0.0)))
            if claimed != sampled:
                # Disagreement allowed only within the 1e-9 boundary slack.
                offs = SQUARE.offsets - eps * support_batch(probe, SQUARE.normals)
                slack = np.min(offs - SQUARE.normals @ x)
                assert abs(slack) < 1e-7

    def test_hull_in_ball(self):
        model = SetModel([Ball([0.0, 0.0], 1.0)])
        probe = Hull([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        assert contains_set(model, probe, [0.0, 0.0], 0.9)
        assert not contains_set(model, probe, [0.2, 0.0], 0.9)

    def test_complement_square_inner(self):
        outer = ComplementBody(box([-1.0, -1.0], [1.0, 1.0]))
        model = SetModel([outer])
        probe = Ball([0.0, 0.0], 0.5)
        assert contains_set(model, probe, [2.0, 0.0], 1.0)  # fully outside
        assert not contains_set(model, probe, [1.2, 0.0], 1.0)  # pokes inside
        assert contains_set(model, probe, [1.5, 0.0], 1.0)  # tangent contact allowed

    def test_complement_with_hull_probe_matches_clipping_oracle(self):
        # Independent oracle: Sutherland-Hodgman clipping of the translated
        # hull against the inner box; positive clip area means the probe
        # pokes into the interior.
        inner = box([-1.0, -1.0], [1.0, 1.0])
        model = SetModel([ComplementBody(inner)])
        probe = Hull([[0.0, 0.0], [1.0, 0.3], [0.5, 1.1], [-0.4, 0.8]])
        gen = RngStream(78, 0).generator
        from zerocell.geometry.containment import _monotone_chain

        def clip_area(poly_pts):
            poly = _monotone_chain(poly_pts)
            for a, b in zip(inner.normals, inner.offsets):
                if len(poly) == 0:
                    break
                out = []
                n = len(poly)
                for i in range(n):
                    p, q = poly[i], poly[(i + 1) % n]
                    pin, qin = a @ p <= b + 1e-15, a @ q <= b + 1e-15
                    if pin:
                        out.append(p)
                    if pin != qin:
                        t = (b - a @ p) / (a @ (q - p))
                        out.append(p + t * (q - p))
                poly = np.array(out) if out else np.zeros((0, 2))
            if len(poly) < 3:
                return 0.0
            xx, yy = poly[:, 0], poly[:, 1]
            return 0.5 * abs(np.dot(xx, np.roll(yy, -1)) - np.dot(np.roll(xx, -1), yy))

        for _ in range(200):
            x = gen.random(2) * 6.0 - 3.0
            eps = float(gen.random()) * 1.5
            claimed = contains_set(model, probe, x, eps)
            area = clip_area(x + eps * probe.vertices)
            if area > 1e-10:
                assert not claimed
            elif area == 0.0:
                assert claimed

    def test_paper_style_union_with_complement(self):
        inner_square = box([-1.0, -1.0], [1.0, 1.0])
        model = SetModel(
            [box([-0.25, -0.25], [0.25, 0.25]), ComplementBody(inner_square)],
            separation=0.5,
        )
        probe = Ball([0.0, 0.0], 1.0)
        assert contains_set(model, probe, [0.0, 0.0], 0.2)
        assert contains_set(model, probe, [3.0, 3.0], 0.2)
        assert not contains_set(model, probe, [0.5, 0.5], 0.2)  # in the gap

    def test_complement_3d_box_inner(self):
        inner = box([-1.0, -1.0, -1.0], [1.0, 1.0, 1.0])
        model = SetModel([ComplementBody(inner)])
        tetra = Hull([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        assert contains_set(model, tetra, [2.0, 2.0, 2.0], 1.0)
        assert not contains_set(model, tetra, [0.0, 0.0, 0.0], 1.0)
        assert contains_set(model, tetra, [1.0, 0.0, 0.0], 1.0)  # face contact

    def test_complement_3d_sampled_oracle(self):
        inner = box([-1.0, -1.0, -1.0], [1.0, 1.0, 1.0])
        model = SetModel([ComplementBody(inner)])
        tetra = Hull([[0.0, 0.0, 0.0], [1.1, 0.1, 0.0], [0.2, 0.9, 0.1], [0.3, 0.2, 1.2]])
        gen = RngStream(79, 0).generator
        w = gen.random((20_000, 4))
        w /= w.sum(axis=1, keepdims=True)
        cloud = w @ tetra.vertices
        for _ in range(100):
            x = gen.random(3) * 6.0 - 3.0
            eps = float(gen.random())
            claimed = contains_set(model, tetra, x, eps)
            strictly_inside = np.all(np.abs(x + eps * cloud) < 1.0 - 1e-7, axis=1)
            assert claimed == (not bool(np.any(strictly_inside)))


class TestPolygonVertices:
    def test_unit_square(self):
        verts = polygon_vertices(SQUARE)
        assert sorted(map(tuple, np.round(verts, 12))) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_empty_system(self):
        poly = HPolytope([[1, 0], [0, 1], [-0.7071067811865476, -0.7071067811865476]], [0, 0, -2], bounded=False)
        with pytest.raises(EmptyRegionError):
            polygon_vertices(poly)

    def test_unbounded_system(self):
        poly = HPolytope([[1, 0], [0, 1]], [1, 1], bounded=False)
        with pytest.raises(UnboundedRegionError):
            polygon_vertices(poly)

    def test_circumscribed_tangents(self):
        gen = RngStream(9, 0).generator
        theta = np.sort(gen.random(50)) * 2 * np.pi
        normals = np.column_stack([np.cos(theta), np.sin(theta)])
        poly = HPolytope(normals, np.ones(50), bounded=False)
        verts = polygon_vertices(poly)
        assert np.all(np.linalg.norm(verts, axis=1) >= 1 - 1e-9)
        x, y = verts[:, 0], verts[:, 1]
        area = 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
        assert area >= np.pi - 1e-9

    def test_feasibility_and_convexity(self):
        gen = RngStream(9, 1).generator
        for _ in range(25):
            m = int(gen.integers(4, 12))
            theta = gen.random(m) * 2 * np.pi
            normals = np.column_stack([np.cos(theta), np.sin(theta)])
            offsets = gen.random(m) + 0.2
            poly = HPolytope(normals, offsets, bounded=False)
            try:
                verts = polygon_vertices(poly)
            except (EmptyRegionError, UnboundedRegionError):
                continue
            assert np.all(verts @ normals.T <= offsets + 1e-9)
            if len(verts) >= 3:
                e = np.roll(verts, -1, axis=0) - verts
                cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
                assert np.all(cross >= -1e-9)


class TestVolumes:
    def test_unit_square(self):
        assert volume_exact(SQUARE) == pytest.approx(1.0)

    def test_disk_area(self):
        assert volume_exact(Ball([0.0, 0.0], 1.0)) == pytest.approx(math.pi)

    def test_shrunk_box(self):
        assert volume_exact(box([0.1, 0.1], [0.9, 0.9])) == pytest.approx(0.64)

    def test_ball_constants(self):
        assert volume_exact(Ball([0.0], 1.0)) == pytest.approx(2.0)
        assert volume_exact(Ball([0.0, 0.0, 0.0], 1.0)) == pytest.approx(4 * math.pi / 3)

    def test_interval_length(self):
        assert volume_exact(box([0.25], [0.75])) == pytest.approx(0.5)


class TestVolumeMC:
    def test_unit_square_estimate(self):
        gen = RngStream(21, 0).generator
        est, se = volume_mc(SQUARE.contains_points, Box([-1.0, -1.0], [2.0, 2.0]), 1_000_000, gen)
        assert abs(est - 1.0) <= 3 * se

    def test_empty_region_is_exact_zero(self):
        gen = RngStream(21, 1).generator
        est, se = volume_mc(lambda pts: np.zeros(len(pts), dtype=bool), Box([0.0, 0.0], [1.0, 1.0]), 1000, gen)
        assert est == 0.0 and se == 0.0

    def test_disk_vs_pi(self):
        gen = RngStream(21, 2).generator
        ball = Ball([0.0, 0.0], 1.0)
        est, se = volume_mc(ball.contains_points, Box([-1.0, -1.0], [1.0, 1.0]), 1_000_000, gen)
        assert abs(est - math.pi) <= 3 * se

    def test_calibration_over_seeds(self):
        # Coverage of the 4-standard-error band over 200 seeds.
        hits = 0
        for seed in range(200):
            gen = RngStream(1000 + seed, 0).generator
            est, se = volume_mc(SQUARE.contains_points, Box([-0.5, -0.5], [1.5, 1.5]), 4000, gen)
            if abs(est - 1.0) <= 4 * se:
                hits += 1
        assert hits >= 198

    def test_ball_window(self):
        gen = RngStream(21, 3).generator
        est, se = volume_mc(SQUARE.contains_points, Ball([0.5, 0.5], 2.0), 400_000, gen)
        assert abs(est - 1.0) <= 4 * se


class TestIntrinsicVolumes:
    def test_unit_square_steiner(self):
        # Steiner-fit oracle on dilation areas gave (1.0008, 2.0009, 0.9999)
        # on a 2400^2 grid; the exact values are (V2, V1, V0) = (1, 2, 1).
        v0, v1, v2 = intrinsic_volumes_2d(SQUARE)
        assert (v0, v1, v2) == (1.0, pytest.approx(2.0), pytest.approx(1.0))

    def test_degenerate_segment(self):
        # Steiner fit of a length-1 segment gives V1 = 1 (the length):
        # area(seg + eps B) = 2 eps V1 + pi eps^2.
        poly = HPolytope([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 0, 0, 0], bounded=False)
        v0, v1, v2 = intrinsic_volumes_2d(poly)
        assert v0 == 1.0
        assert v1 == pytest.approx(1.0)
        assert v2 == pytest.approx(0.0, abs=1e-12)

    def test_scaling_homogeneity(self):
        tri = HPolytope([[0, -1], [-1, 0], [0.7071067811865476, 0.7071067811865476]], [0, 0, 1], bounded=False)
        v0, v1, v2 = intrinsic_volumes_2d(tri)
        rho = 2.5
        s0, s1, s2 = intrinsic_volumes_2d(HPolytope(tri.normals, tri.offsets * rho, bounded=False))
        assert s0 == 1.0
        assert s1 == pytest.approx(rho * v1)
        assert s2 == pytest.approx(rho * rho * v2)


class TestModelValidation:
    def test_separation_violation_rejected(self):
        with pytest.raises(PreconditionViolation):
            SetModel([Ball([0.0, 0.0], 1.0), Ball([2.5, 0.0], 1.0)], separation=1.0)

    def test_valid_union(self):
        model = SetModel([Ball([0.0, 0.0], 1.0), Ball([5.0, 0.0], 1.0)], separation=3.0)
        assert model.separation == 3.0

    def test_complement_margin(self):
        with pytest.raises(PreconditionViolation):
            SetModel(
                [box([-0.9, -0.9], [0.9, 0.9]), ComplementBody(box([-1.0, -1.0], [1.0, 1.0]))],
                separation=0.5,
            )

    def test_convex_distance(self):
        a = box([0.0, 0.0], [1.0, 1.0])
        b = box([3.0, 0.0], [4.0, 1.0])
        assert convex_distance(a, b) == pytest.approx(2.0, abs=1e-6)
        assert convex_distance(Ball([0.0, 0.0], 1.0), b) == pytest.approx(2.0, abs=1e-6)

    def test_projection(self):
        p = project_point(SQUARE, np.array([2.0, 0.5]))
        assert np.allclose(p, [1.0, 0.5])
        p2 = project_point(SQUARE, np.array([2.0, 2.0]))
        assert np.allclose(p2, [1.0, 1.0])

    def test_duplicate_normals_merged(self):
        poly = HPolytope([[1, 0], [1, 0], [-1, 0], [0, 1], [0, -1]], [2.0, 1.0, 0.0, 1.0, 0.0])
        assert poly.normals.shape[0] == 4
        idx = np.argmax(poly.normals @ np.array([1.0, 0.0]))
        assert poly.offsets[idx] == 1.0

    def test_bounded_flag_checked(self):
        with pytest.raises(UnboundedRegionError):
            HPolytope([[1, 0], [0, 1]], [1, 1], bounded=True)
        with pytest.raises((EmptyRegionError, UnboundedRegionError)):
            HPolytope([[1, 0], [-1, 0], [0, 1], [0, -1]], [-1, 0, 1, 1], bounded=True)

    def test_bounded_3d_recession(self):
        cube = box([0.0, 0.0, 0.0], [1.0, 1.0, 1.0])
        assert cube.bounded
        with pytest.raises(UnboundedRegionError):
            HPolytope(np.vstack([np.eye(3), [[-1, 0, 0], [0, -1, 0]]]), [1, 1, 1, 0, 0], bounded=True)
