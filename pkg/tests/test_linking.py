import numpy as np
import pytest

from birkhoff import (CurvesTooClose, DegenerateProjection, LinkingMatrix,
                      NonIntegerResult, PolyCurve, WeightedLink,
                      curve_resample, gauss_linking_sum, linking_matrix,
                      linking_number, linking_number_crossings,
                      linking_number_crossings_robust, periodic_orbit,
                      round_circle, seifert_field, stereographic_project)
from birkhoff.flows import hopf_fibers
from conftest import random_disjoint_pair

GENERIC_DIRECTION = (0.23, 1.0, 0.11)


def hand_verified_pair(n=200):
    """Circle in the xy-plane and a circle through its spanning disc.

    The second curve crosses the flat spanning disc of the first exactly once,
    downward against the disc orientation, so Lk = -1 by direct intersection
    count.
    """
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    g1 = PolyCurve(np.stack([np.cos(t), np.sin(t), 0 * t], axis=1))
    g2 = PolyCurve(np.stack([1 + np.cos(t), 0 * t, np.sin(t)], axis=1))
    return g1, g2


class TestGaussLinking:
    def test_hand_verified_value(self):
        g1, g2 = hand_verified_pair()
        assert linking_number(g1, g2) == -1

    def test_hopf_fibers_link_plus_one(self, hopf_fiber_pair):
        f1, f2 = hopf_fiber_pair
        assert linking_number(f1, f2) == 1

    def test_split_circles(self):
        c1 = round_circle(64)
        c2 = round_circle(64, center=(5.0, 0.0, 0.0))
        assert linking_number(c1, c2) == 0

    def test_seifert_23_fibers_link_six(self):
        field = seifert_field(2, 3)
        o1 = periodic_orbit(field, np.array([0.6, 0.0, 0.8, 0.0]), 256)
        o2 = periodic_orbit(field, np.array([0.8, 0.0, 0.0, 0.6]), 256)
        assert linking_number(o1, o2) == 6

    def test_symmetry_exact(self, hopf_fiber_pair):
        f1, f2 = hopf_fiber_pair
        assert linking_number(f1, f2) == linking_number(f2, f1)

    def test_orientation_reversal(self, hopf_fiber_pair):
        f1, f2 = hopf_fiber_pair
        assert linking_number(f1.reversed(), f2) == -1
        assert linking_number(f1, f2.reversed()) == -1
        assert linking_number(f1.reversed(), f2.reversed()) == 1

    def test_residual_below_gate(self):
        g1, g2 = hand_verified_pair()
        total = gauss_linking_sum(g1, g2)
        assert abs(total - round(total)) < 1e-9

    def test_too_close_rejected(self):
        c1 = round_circle(64)
        c2 = round_circle(64, center=(1e-8, 0.0, 0.0))
        with pytest.raises(CurvesTooClose):
            linking_number(c1, c2)

    def test_near_tangent_pair_still_exact(self):
        # coaxial circles a hair apart: the closed form stays exact
        c1 = round_circle(256)
        c2 = round_circle(256, center=(0.0, 0.0, 1e-4))
        res = gauss_linking_sum(c1, c2)
        assert abs(res - round(res)) < 1e-8
        assert linking_number(c1, c2) == 0

    def test_impossible_gate_raises_after_refinement(self):
        g1, g2 = hand_verified_pair(24)
        with pytest.raises(NonIntegerResult):
            linking_number(g1, g2, eps_int=0.0)

    def test_isotopy_smoke(self):
        g1, g2 = hand_verified_pair(60)
        theta = 0.7
        rot = np.array([[np.cos(theta), -np.sin(theta), 0],
                        [np.sin(theta), np.cos(theta), 0],
                        [0, 0, 1.0]])
        shift = np.array([0.3, -2.0, 1.1])
        m1 = PolyCurve(g1.vertices @ rot.T + shift)
        m2 = PolyCurve(g2.vertices @ rot.T + shift)
        assert linking_number(m1, m2) == linking_number(g1, g2) == -1


class TestProjectionAndResampling:
    def test_projection_invariance_across_poles(self, hopf_fiber_pair):
        f1, f2 = hopf_fiber_pair
        poles = [np.array([0.0, 0.3, 0.1, 0.95]), np.array([0.7, 0.1, -0.7, 0.1])]
        values = []
        for pole in poles:
            pole = pole / np.linalg.norm(pole)
            p1 = stereographic_project(f1, pole)
            p2 = stereographic_project(f2, pole)
            values.append(linking_number(p1, p2))
        assert values[0] == values[1] == 1

    def test_resampling_invariance(self, hopf):
        coarse = periodic_orbit(hopf, np.array([1.0, 0, 0, 0]), 16)
        fine = periodic_orbit(hopf, np.array([1.0, 0, 0, 0]), 256)
        other = periodic_orbit(hopf, np.array([0.0, 0, 1.0, 0]), 128)
        assert linking_number(coarse, other) == 1
        assert linking_number(fine, other) == 1
        assert linking_number(curve_resample(coarse, 64), other) == 1


class TestCrossingOracle:
    def test_hand_verified_value(self):
        g1, g2 = hand_verified_pair()
        assert linking_number_crossings(g1, g2, GENERIC_DIRECTION) == -1

    def test_split_circles(self):
        c1 = round_circle(32)
        c2 = round_circle(32, center=(5.0, 0.0, 0.0))
        assert linking_number_crossings(c1, c2, GENERIC_DIRECTION) == 0

    def test_hopf_fibers_after_projection(self, hopf_fiber_pair):
        f1, f2 = hopf_fiber_pair
        from birkhoff.geometry import project_with_common_pole
        p1, p2 = project_with_common_pole([f1, f2])
        assert linking_number_crossings(p1, p2, (0.0, 0.0, 1.0)) == 1

    def test_seifert_pair_agrees_with_gauss(self):
        field = seifert_field(2, 3)
        o1 = periodic_orbit(field, np.array([0.6, 0.0, 0.8, 0.0]), 200)
        o2 = periodic_orbit(field, np.array([0.8, 0.0, 0.0, 0.6]), 200)
        assert linking_number_crossings_robust(o1, o2) == 6

    def test_degenerate_direction_detected(self):
        # projecting along z collapses a circle in the xz-plane onto a segment
        # crossing the other curve's projection: parallel overlaps abound
        t = np.linspace(0, 2 * np.pi, 8, endpoint=False)
        square1 = PolyCurve(np.stack([np.cos(t), np.sin(t), 0 * t], axis=1))
        square2 = PolyCurve(np.stack([np.cos(t), np.sin(t), 0 * t + 0.5], axis=1))
        with pytest.raises(DegenerateProjection):
            linking_number_crossings(square1, square2, (0.0, 0.0, 1.0))

    def test_robust_retry_succeeds(self):
        t = np.linspace(0, 2 * np.pi, 8, endpoint=False)
        square1 = PolyCurve(np.stack([np.cos(t), np.sin(t), 0 * t], axis=1))
        square2 = PolyCurve(np.stack([np.cos(t), np.sin(t), 0 * t + 0.5], axis=1))
        assert linking_number_crossings_robust(square1, square2) == 0

    def test_oracle_equivalence_on_random_pairs(self):
        rng = np.random.default_rng(2024)
        for _ in range(40):
            c1, c2 = random_disjoint_pair(rng)
            gauss = linking_number(c1, c2)
            crossings = linking_number_crossings_robust(c1, c2)
            assert gauss == crossings


class TestLinkingMatrix:
    def test_three_hopf_fibers(self):
        fibers = hopf_fibers(3, 128)
        link = WeightedLink(tuple(fibers), (1, 1, 1))
        lk = linking_matrix(link)
        off = lk.entries[~np.eye(3, dtype=bool)]
        assert np.all(off == 1)

    def test_single_component_empty(self):
        fibers = hopf_fibers(1, 64)
        lk = linking_matrix(WeightedLink(tuple(fibers), (1,)))
        assert lk.m == 1
        with pytest.raises(ValueError):
            lk.entry(0, 0)

    def test_seifert_35_pair(self):
        field = seifert_field(3, 5)
        o1 = periodic_orbit(field, np.array([0.6, 0.0, 0.8, 0.0]), 512)
        o2 = periodic_orbit(field, np.array([0.0, 0.8, 0.6, 0.0]), 512)
        lk = linking_matrix(WeightedLink((o1, o2), (1, 1)))
        assert lk.entry(0, 1) == 15
        assert lk.entry(1, 0) == 15

    def test_symmetry_required(self):
        with pytest.raises(ValueError):
            LinkingMatrix(("a", "b"), np.array([[0, 1], [2, 0]]))
