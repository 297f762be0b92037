import numpy as np
import pytest

from birkhoff import PolyCurve, hopf_field, min_curve_distance, periodic_orbit


@pytest.fixture(scope="session")
def hopf():
    return hopf_field()


@pytest.fixture(scope="session")
def hopf_fiber_pair(hopf):
    """Two disjoint Hopf fibers, 128 vertices each."""
    f1 = periodic_orbit(hopf, np.array([1.0, 0.0, 0.0, 0.0]), 128)
    f2 = periodic_orbit(hopf, np.array([0.0, 0.0, 1.0, 0.0]), 128)
    return f1.with_name("fiber_a"), f2.with_name("fiber_b")


def random_loop(rng, n_vertices=14, scale=1.0, center=(0.0, 0.0, 0.0)):
    """Closed random polygon: a closed-up random walk, validated."""
    while True:
        steps = rng.normal(size=(n_vertices, 3))
        steps -= steps.mean(axis=0)
        verts = np.cumsum(steps, axis=0) * scale + np.asarray(center)
        edges = np.linalg.norm(np.roll(verts, -1, axis=0) - verts, axis=1)
        if edges.min() > 1e-3:
            return PolyCurve(verts)


def random_disjoint_pair(rng, min_sep=0.05):
    """Two random loops rejection-sampled for separation."""
    while True:
        c1 = random_loop(rng)
        offset = rng.normal(size=3)
        offset *= (4.0 + 2.0 * rng.random()) / np.linalg.norm(offset)
        c2 = random_loop(rng, center=offset)
        if min_curve_distance(c1, c2) > min_sep:
            return c1, c2
