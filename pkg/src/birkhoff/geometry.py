"""Geometric substrate: points on the unit 3-sphere and closed polygonal curves.

Curves live either in ordinary 3-space (``ambient="r3"``) or on the unit
sphere in 4-space (``ambient="s3"``). A curve is an ordered vertex list with
an implicit closing edge; orientation is the traversal order and reversal is
always explicit. Spherical vertices are renormalized after every operation so
norm drift never accumulates.

Stereographic charts are orientation-consistent across poles: the frame
(u1, u2, u3, pole) is always positively oriented in 4-space, so linking
numbers computed in any chart agree exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import InvalidCurve, NoValidPole, PoleTooClose, TooFewVertices

EPS_NORM = 1e-12     # sphere-point norm tolerance after renormalization
EPS_EDGE = 1e-9      # minimum edge length
EPS_SEP = 1e-6       # minimum separation between link components
DELTA_POLE = 0.05    # minimum spherical distance (rad) from pole to vertices


def renormalize(points: np.ndarray) -> np.ndarray:
    """Rescale rows of ``points`` onto the unit sphere."""
    points = np.asarray(points, dtype=float)
    norms = np.linalg.norm(points, axis=-1, keepdims=True)
    if np.any(norms == 0.0):
        raise InvalidCurve("cannot renormalize a zero vector")
    return points / norms


def spherical_distance(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Geodesic distance on the unit sphere (radians)."""
    dots = np.clip(np.sum(np.asarray(p) * np.asarray(q), axis=-1), -1.0, 1.0)
    return np.arccos(dots)


def random_sphere_points(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform points on the unit 3-sphere, shape (n, 4)."""
    g = rng.standard_normal((n, 4))
    while True:
        bad = np.linalg.norm(g, axis=1) < 1e-8
        if not np.any(bad):
            break
        g[bad] = rng.standard_normal((int(bad.sum()), 4))
    return renormalize(g)


def _kronecker_sphere_grid(n: int) -> np.ndarray:
    """Fixed low-discrepancy set of n points on the 3-sphere.

    Additive-recurrence sequence in [0,1)^3 mapped through the standard
    uniform parametrization (z1, z2) = (sqrt(1-u) e^{2pi i v}, sqrt(u) e^{2pi i w}).
    """
    # root of x**4 = x + 1 (generalized golden ratio for a 3D sequence)
    phi = 1.2207440846057595
    alpha = np.array([1.0 / phi, 1.0 / phi**2, 1.0 / phi**3])
    k = np.arange(1, n + 1)[:, None]
    u, v, w = ((0.5 + k * alpha) % 1.0).T
    r1 = np.sqrt(1.0 - u)
    r2 = np.sqrt(u)
    return np.stack(
        [r1 * np.cos(2 * np.pi * v), r1 * np.sin(2 * np.pi * v),
         r2 * np.cos(2 * np.pi * w), r2 * np.sin(2 * np.pi * w)], axis=1)


@dataclass(frozen=True)
class PolyCurve:
    """Closed polygonal curve in 3-space or on the unit 3-sphere.

    Parameters
    ----------
    vertices : (n, 3) or (n, 4) array
        Ordered vertex list; the edge from the last vertex back to the first
        is implicit. Orientation is the traversal order.
    ambient : "r3" | "s3"
        Must match the vertex width (3 or 4 columns).
    times : optional (n,) array
        Flow times of the samples when the curve came from an orbit.
    period : optional float
        Flow period when the curve is a periodic orbit.
    pole : optional (4,) array
        Chart pole recorded by stereographic projection.
    """

    vertices: np.ndarray
    ambient: str = "r3"
    name: str = ""
    times: np.ndarray | None = None
    period: float | None = None
    pole: np.ndarray | None = None
    field_name: str | None = None

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=float)
        if verts.ndim != 2:
            raise InvalidCurve("vertices must be a 2-d array")
        if self.ambient not in ("r3", "s3"):
            raise InvalidCurve(f"unknown ambient {self.ambient!r}")
        dim = 3 if self.ambient == "r3" else 4
        if verts.shape[1] != dim:
            raise InvalidCurve(
                f"ambient {self.ambient!r} needs {dim} coordinates, got {verts.shape[1]}")
        if not np.all(np.isfinite(verts)):
            raise InvalidCurve("vertices contain NaN or Inf")
        if len(verts) < 3:
            raise TooFewVertices("a closed curve needs at least 3 vertices")
        if self.ambient == "s3":
            norms = np.linalg.norm(verts, axis=1)
            if np.any(np.abs(norms - 1.0) > 1e-6):
                raise InvalidCurve("spherical vertices deviate from the unit sphere")
            verts = verts / norms[:, None]
        edges = np.roll(verts, -1, axis=0) - verts
        if np.any(np.linalg.norm(edges, axis=1) < EPS_EDGE):
            raise InvalidCurve("consecutive vertices coincide")
        # zero-area hairpin: a vertex exactly equal to its second successor
        if np.any(np.all(verts == np.roll(verts, -2, axis=0), axis=1)):
            raise InvalidCurve("vertex repeats its successor's successor")
        verts = verts.copy()
        verts.flags.writeable = False
        object.__setattr__(self, "vertices", verts)
        if self.times is not None:
            t = np.asarray(self.times, dtype=float).copy()
            if t.shape != (len(verts),):
                raise InvalidCurve("times must align with vertices")
            t.flags.writeable = False
            object.__setattr__(self, "times", t)

    # -- basic queries --------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def is_spherical(self) -> bool:
        return self.ambient == "s3"

    def edge_vectors(self) -> np.ndarray:
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(self.edge_vectors(), axis=1)

    def total_length(self) -> float:
        return float(self.edge_lengths().sum())

    def reversed(self) -> "PolyCurve":
        """Explicit orientation reversal (vertex order flipped, start kept).

        Flow metadata is dropped: the reversed curve is no orbit of the field.
        """
        verts = np.vstack([self.vertices[:1], self.vertices[:0:-1]])
        return replace(self, vertices=verts, times=None, period=None,
                       field_name=None)

    def with_name(self, name: str) -> "PolyCurve":
        return replace(self, name=name)


@dataclass(frozen=True)
class WeightedLink:
    """Disjoint closed curves with integer multiplicities n_i.

    The all-zero multiplicity vector is rejected; individual negative or zero
    entries are allowed. ``separation`` (minimum pairwise distance between
    distinct components) is computed once at construction.
    """

    components: tuple[PolyCurve, ...]
    multiplicities: tuple[int, ...]
    eps_sep: float = EPS_SEP
    separation: float = field(init=False)

    def __post_init__(self):
        comps = tuple(self.components)
        mults = tuple(int(m) for m in self.multiplicities)
        if len(comps) == 0:
            raise InvalidCurve("a link needs at least one component")
        if len(comps) != len(mults):
            raise InvalidCurve("multiplicities must align with components")
        if all(m == 0 for m in mults):
            raise InvalidCurve("all multiplicities are zero")
        ambients = {c.ambient for c in comps}
        if len(ambients) > 1:
            raise InvalidCurve("components live in different ambients")
        sep = np.inf
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                sep = min(sep, min_curve_distance(comps[i], comps[j]))
        if sep <= self.eps_sep:
            raise InvalidCurve(
                f"components not disjoint: separation {sep:.3e} <= {self.eps_sep:.3e}")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "multiplicities", mults)
        object.__setattr__(self, "separation", float(sep))

    @property
    def m(self) -> int:
        return len(self.components)

    @property
    def ambient(self) -> str:
        return self.components[0].ambient

    def names(self) -> tuple[str, ...]:
        return tuple(c.name or f"component_{k}" for k, c in enumerate(self.components))


# -- distances ---------------------------------------------------------------

def _point_to_segments(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from point p to each segment [a_k, b_k]."""
    d = b - a
    denom = np.einsum("ij,ij->i", d, d)
    denom = np.where(denom == 0.0, 1.0, denom)
    t = np.clip(np.einsum("ij,ij->i", p - a, d) / denom, 0.0, 1.0)
    closest = a + t[:, None] * d
    return np.linalg.norm(closest - p, axis=1)


def _segments_to_segments_min(a0, a1, b0, b1, block: int = 64) -> float:
    """Minimum distance between segment sets {[a0_i,a1_i]} and {[b0_j,b1_j]}."""
    best = np.inf
    v = (b1 - b0)[None, :, :]
    cc = np.einsum("kij,kij->ki", v, v)
    for lo in range(0, len(a0), block):
        p = a0[lo:lo + block][:, None, :]
        u = (a1[lo:lo + block] - a0[lo:lo + block])[:, None, :]
        r = p - b0[None, :, :]
        aa = np.einsum("kij,kij->ki", u, u)
        bb = np.einsum("kij,kij->ki", u, v)
        dd = np.einsum("kij,kij->ki", u, r)
        ee = np.einsum("kij,kij->ki", v, r)
        den = aa * cc - bb * bb
        s = np.where(den > 1e-30 * aa * cc,
                     (bb * ee - cc * dd) / np.where(den == 0, 1.0, den), 0.0)
        s = np.clip(s, 0.0, 1.0)
        t = (bb * s + ee) / cc
        # clamping t moves the closest point; recompute s for clamped t
        t_cl = np.clip(t, 0.0, 1.0)
        s = np.where(t != t_cl, np.clip((bb * t_cl - dd) / aa, 0.0, 1.0), s)
        pa = p + s[..., None] * u
        pb = b0[None, :, :] + t_cl[..., None] * v
        best = min(best, float(np.min(np.sum((pa - pb) ** 2, axis=2))))
    return float(np.sqrt(best))


def _min_vertex_distance(v1: np.ndarray, v2: np.ndarray, block: int = 1024) -> float:
    n1 = np.einsum("ij,ij->i", v1, v1)
    n2 = np.einsum("ij,ij->i", v2, v2)
    best = np.inf
    for lo in range(0, len(v1), block):
        d2 = n1[lo:lo + block, None] + n2[None, :] - 2.0 * (v1[lo:lo + block] @ v2.T)
        best = min(best, float(d2.min()))
    return math.sqrt(max(best, 0.0))


def min_curve_distance(c1: PolyCurve, c2: PolyCurve) -> float:
    """Minimum Euclidean distance between two closed polygonal curves."""
    a0, a1 = c1.vertices, np.roll(c1.vertices, -1, axis=0)
    b0, b1 = c2.vertices, np.roll(c2.vertices, -1, axis=0)
    return _segments_to_segments_min(a0, a1, b0, b1)


def curves_separated_by(c1: PolyCurve, c2: PolyCurve, threshold: float) -> bool:
    """Fast check that two curves are at least ``threshold`` apart.

    Uses a vertex-distance bound to avoid the exact segment computation when
    the curves are clearly separated.
    """
    vmin = _min_vertex_distance(c1.vertices, c2.vertices)
    slack = 0.5 * (float(c1.edge_lengths().max()) + float(c2.edge_lengths().max()))
    if vmin - slack > threshold:
        return True
    return min_curve_distance(c1, c2) > threshold


def self_clearance(curve: PolyCurve, block: int = 128) -> float:
    """Min over vertices of the distance to the non-adjacent part of the curve."""
    v = curve.vertices
    n = len(v)
    a = v[None, :, :]
    d = (np.roll(v, -1, axis=0) - v)[None, :, :]
    dd = np.einsum("kij,kij->ki", d, d)
    best = np.inf
    idx = np.arange(n)
    for lo in range(0, n, block):
        p = v[lo:lo + block][:, None, :]
        t = np.clip(np.einsum("kij,kij->ki", p - a, d) / dd, 0.0, 1.0)
        closest = a + t[..., None] * d
        dist2 = np.sum((closest - p) ** 2, axis=2)
        # mask the two edges adjacent to each vertex in this block
        rows = idx[lo:lo + block]
        dist2[np.arange(len(rows)), rows] = np.inf
        dist2[np.arange(len(rows)), (rows - 1) % n] = np.inf
        best = min(best, float(dist2.min()))
    return math.sqrt(best)


def reach_proxy(curve: PolyCurve) -> float:
    """Conservative embedding radius: half the minimum vertex clearance.

    Cached on the (immutable) curve after the first call.
    """
    cached = curve.__dict__.get("_reach_proxy")
    if cached is None:
        cached = 0.5 * self_clearance(curve)
        object.__setattr__(curve, "_reach_proxy", cached)
    return cached


# -- chart operations --------------------------------------------------------

def _chart_frame(pole: np.ndarray) -> np.ndarray:
    """Orthonormal (u1,u2,u3) of pole-perp with det[u1,u2,u3,pole] = +1."""
    pole = renormalize(np.asarray(pole, dtype=float))
    order = np.argsort(np.abs(pole), kind="stable")
    basis: list[np.ndarray] = []
    for k in order:
        e = np.zeros(4)
        e[k] = 1.0
        w = e - (e @ pole) * pole
        for b in basis:
            w = w - (w @ b) * b
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            basis.append(w / nrm)
        if len(basis) == 3:
            break
    U = np.stack(basis, axis=1)
    if np.linalg.det(np.column_stack([U, pole])) < 0:
        U = U[:, [1, 0, 2]]
    return U


def stereographic_project(curve: PolyCurve, pole: np.ndarray,
                          delta_pole: float = DELTA_POLE) -> PolyCurve:
    """Project a spherical curve to 3-space from ``pole``.

    The chart is an orientation-preserving homeomorphism of the complement of
    the pole, so linking numbers of disjoint curves are preserved, with the
    same sign in every chart.

    Raises
    ------
    PoleTooClose
        If any vertex is within ``delta_pole`` radians of the pole.
    """
    if not curve.is_spherical:
        raise InvalidCurve("stereographic projection needs a spherical curve")
    pole = renormalize(np.asarray(pole, dtype=float))
    dist = spherical_distance(curve.vertices, pole)
    if float(dist.min()) <= delta_pole:
        raise PoleTooClose(
            f"vertex at spherical distance {dist.min():.4f} <= {delta_pole} from pole")
    U = _chart_frame(pole)
    den = 1.0 - curve.vertices @ pole
    image = (curve.vertices @ U) / den[:, None]
    return PolyCurve(image, ambient="r3", name=curve.name, pole=pole,
                     times=curve.times, period=curve.period,
                     field_name=curve.field_name)


def choose_pole(curves: Sequence[PolyCurve], n_candidates: int = 64,
                delta_pole: float = DELTA_POLE) -> np.ndarray:
    """Pick a projection pole far from every vertex of every curve.

    Scans a fixed low-discrepancy grid of ``n_candidates`` points plus the 8
    signed coordinate axes and returns the candidate maximizing the minimum
    spherical distance to all vertices.

    Raises
    ------
    NoValidPole
        If even the best candidate is within ``delta_pole`` of a vertex.
    """
    curves = list(curves)
    if not curves:
        raise NoValidPole("no curves given")
    for c in curves:
        if not c.is_spherical:
            raise InvalidCurve("choose_pole needs spherical curves")
    verts = np.vstack([c.vertices for c in curves])
    axes = np.vstack([np.eye(4), -np.eye(4)])
    cands = np.vstack([_kronecker_sphere_grid(max(n_candidates, 64)), axes])
    dots = np.clip(cands @ verts.T, -1.0, 1.0)
    min_dist = np.arccos(dots).min(axis=1)
    best = int(np.argmax(min_dist))
    if min_dist[best] <= delta_pole:
        raise NoValidPole(
            f"best candidate only {min_dist[best]:.4f} rad from a vertex")
    return cands[best]


def project_with_common_pole(curves: Sequence[PolyCurve],
                             delta_pole: float = DELTA_POLE) -> list[PolyCurve]:
    """Project several spherical curves through one shared chart."""
    pole = choose_pole(curves, delta_pole=delta_pole)
    return [stereographic_project(c, pole, delta_pole=delta_pole) for c in curves]


# -- resampling --------------------------------------------------------------

def curve_resample(curve: PolyCurve, n: int) -> PolyCurve:
    """Arclength-uniform resampling with ``n`` vertices.

    The first output vertex is the first input vertex, so the closed
    traversal is preserved up to parametrization. Spherical curves are
    renormalized after interpolation.
    """
    if n < 3:
        raise TooFewVertices("resampling needs n >= 3")
    v = curve.vertices
    closed = np.vstack([v, v[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    targets = np.arange(n) * (total / n)
    idx = np.searchsorted(s, targets, side="right") - 1
    idx = np.clip(idx, 0, len(seg) - 1)
    local = (targets - s[idx]) / seg[idx]
    pts = closed[idx] + local[:, None] * (closed[idx + 1] - closed[idx])
    if curve.is_spherical:
        pts = renormalize(pts)
    return PolyCurve(pts, ambient=curve.ambient, name=curve.name,
                     pole=curve.pole, period=curve.period,
                     field_name=curve.field_name)


# -- small factories ---------------------------------------------------------

def round_circle(n: int = 64, radius: float = 1.0,
                 center=(0.0, 0.0, 0.0), normal=(0.0, 0.0, 1.0),
                 name: str = "") -> PolyCurve:
    """Planar round circle in 3-space, counterclockwise seen from ``normal``."""
    normal = np.asarray(normal, dtype=float)
    normal = normal / np.linalg.norm(normal)
    a = np.zeros(3)
    a[np.argmin(np.abs(normal))] = 1.0
    u = a - (a @ normal) * normal
    u /= np.linalg.norm(u)
    w = np.cross(normal, u)
    t = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    pts = (np.asarray(center, dtype=float)
           + radius * (np.outer(np.cos(t), u) + np.outer(np.sin(t), w)))
    return PolyCurve(pts, ambient="r3", name=name)


def great_circle(n: int = 64, plane=(0, 1), name: str = "") -> PolyCurve:
    """Great circle of the 3-sphere in the coordinate plane ``plane``."""
    i, j = plane
    t = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    pts = np.zeros((n, 4))
    pts[:, i] = np.cos(t)
    pts[:, j] = np.sin(t)
    return PolyCurve(pts, ambient="s3", name=name)
