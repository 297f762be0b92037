import numpy as np
import pytest

from birkhoff import (InvalidCurve, NoValidPole, PolyCurve, PoleTooClose,
                      TooFewVertices, WeightedLink, choose_pole,
                      curve_resample, great_circle, min_curve_distance,
                      round_circle, spherical_distance, stereographic_project)
from birkhoff.flows import hopf_fibers
from birkhoff.geometry import reach_proxy, renormalize, self_clearance


def test_renormalize_unit_norms():
    pts = np.array([[2.0, 0, 0, 0], [1.0, 1.0, 1.0, 1.0]])
    out = renormalize(pts)
    assert np.allclose(np.linalg.norm(out, axis=1), 1.0, atol=1e-12)


class TestPolyCurveValidity:
    def test_too_few_vertices(self):
        with pytest.raises(TooFewVertices):
            PolyCurve(np.array([[0, 0, 0], [1, 0, 0]]))

    def test_duplicate_consecutive_vertices(self):
        with pytest.raises(InvalidCurve):
            PolyCurve(np.array([[0, 0, 0], [0, 0, 0], [1, 0, 0], [0, 1, 0]]))

    def test_hairpin_rejected(self):
        verts = np.array([[0, 0, 0], [1, 0, 0], [0, 0, 0.0], [1, 0, 0]])
        # vertex 0 equals vertex 2 exactly
        with pytest.raises(InvalidCurve):
            PolyCurve(verts)

    def test_nan_rejected(self):
        verts = np.array([[0, 0, 0], [1, np.nan, 0], [0, 1, 0]])
        with pytest.raises(InvalidCurve):
            PolyCurve(verts)

    def test_sphere_norm_enforced(self):
        verts = np.array([[1.1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]])
        with pytest.raises(InvalidCurve):
            PolyCurve(verts, ambient="s3")

    def test_sphere_renormalized_after_construction(self):
        c = great_circle(32)
        assert np.allclose(np.linalg.norm(c.vertices, axis=1), 1.0, atol=1e-12)

    def test_vertices_immutable(self):
        c = round_circle(16)
        with pytest.raises(ValueError):
            c.vertices[0, 0] = 5.0

    def test_reversed_flips_order(self):
        c = round_circle(8)
        r = c.reversed()
        assert np.allclose(r.vertices[0], c.vertices[0])
        assert np.allclose(r.vertices[1], c.vertices[-1])


class TestWeightedLink:
    def test_all_zero_multiplicities_rejected(self):
        c1 = round_circle(16)
        c2 = round_circle(16, center=(5, 0, 0))
        with pytest.raises(InvalidCurve):
            WeightedLink((c1, c2), (0, 0))

    def test_separation_cached(self):
        c1 = round_circle(16)
        c2 = round_circle(16, center=(5, 0, 0))
        link = WeightedLink((c1, c2), (1, -2))
        assert link.separation == pytest.approx(3.0, abs=0.05)

    def test_overlapping_components_rejected(self):
        c1 = round_circle(64)
        c2 = round_circle(64, center=(1e-9, 0, 0))
        with pytest.raises(InvalidCurve):
            WeightedLink((c1, c2), (1, 1))

    def test_mixed_ambient_rejected(self):
        with pytest.raises(InvalidCurve):
            WeightedLink((round_circle(8),), (1, 1))


class TestStereographicProjection:
    def test_equatorial_circle_maps_to_unit_circle(self):
        c = great_circle(64, plane=(0, 1))
        img = stereographic_project(c, np.array([0.0, 0.0, 0.0, 1.0]))
        assert img.n == 64
        radii = np.linalg.norm(img.vertices, axis=1)
        assert np.allclose(radii, 1.0, atol=1e-12)
        assert np.allclose(img.vertices[:, 2], 0.0, atol=1e-12)
        assert img.pole is not None

    def test_pole_on_curve_rejected(self):
        c = great_circle(64, plane=(0, 1))
        with pytest.raises(PoleTooClose):
            stereographic_project(c, np.array([1.0, 0.0, 0.0, 0.0]))


class TestChoosePole:
    def test_equatorial_circle_pole_at_right_angle(self):
        c = great_circle(64, plane=(0, 1))
        pole = choose_pole([c])
        dmin = spherical_distance(c.vertices, pole).min()
        assert dmin == pytest.approx(np.pi / 2, abs=1e-6)

    def test_empty_list_rejected(self):
        with pytest.raises(NoValidPole):
            choose_pole([])

    def test_three_hopf_fibers_leave_room(self):
        fibers = hopf_fibers(3, n_vertices=64)
        pole = choose_pole(fibers)
        verts = np.vstack([f.vertices for f in fibers])
        dmin = spherical_distance(verts, pole).min()
        assert dmin > 0.3
        # exhaustive check over the candidate grid: no candidate does better
        from birkhoff.geometry import _kronecker_sphere_grid
        cands = np.vstack([_kronecker_sphere_grid(64), np.eye(4), -np.eye(4)])
        best = max(np.arccos(np.clip(c @ verts.T, -1, 1)).min() for c in cands)
        assert dmin == pytest.approx(best, abs=1e-12)


class TestResample:
    def test_circle_to_square(self):
        c = round_circle(100)
        sq = curve_resample(c, 4)
        assert sq.n == 4
        # 4 divides 100, so the samples land exactly on original vertices
        radii = np.linalg.norm(sq.vertices, axis=1)
        assert np.allclose(radii, 1.0, atol=1e-12)
        edges = sq.edge_lengths()
        assert np.allclose(edges, edges[0], atol=1e-12)

    def test_idempotent_on_uniform_curve(self):
        c = round_circle(32)
        again = curve_resample(c, 32)
        assert np.allclose(again.vertices, c.vertices, atol=1e-9)

    def test_too_few(self):
        with pytest.raises(TooFewVertices):
            curve_resample(round_circle(16), 2)

    def test_spherical_resample_stays_on_sphere(self):
        c = great_circle(50)
        r = curve_resample(c, 17)
        assert np.allclose(np.linalg.norm(r.vertices, axis=1), 1.0, atol=1e-12)


def test_min_curve_distance_concentric():
    c1 = round_circle(128, radius=1.0)
    c2 = round_circle(128, radius=3.0)
    assert min_curve_distance(c1, c2) == pytest.approx(2.0, abs=1e-3)


def test_self_clearance_circle():
    c = round_circle(64)
    # nearest non-adjacent feature of a round polygon: two edges away
    expected = np.linalg.norm(c.vertices[0] - c.vertices[2])
    assert self_clearance(c) <= expected + 1e-12
    assert reach_proxy(c) == pytest.approx(0.5 * self_clearance(c))
