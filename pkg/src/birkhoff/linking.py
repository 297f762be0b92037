"""Integer linking numbers of disjoint closed polygonal curves.

Two independent routes are provided and must agree:

* ``linking_number`` evaluates the Gauss double sum segment pair by segment
  pair. Each ordered pair contributes the signed area of the spherical
  quadrilateral swept by the chord direction, in closed form (two oriented
  solid-angle triangles), so the sum is exact up to rounding and the result
  is gated on being within ``eps_int`` of an integer.

* ``linking_number_crossings`` counts signed crossings between the two
  curves in a generic planar projection and returns half their sum.

Sign conventions are right-handed throughout: two fibers of the positive
Hopf fibration, projected through an orientation-consistent chart, link +1.

Spherical curves are accepted directly; they are projected to 3-space
through one shared stereographic chart before either computation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (CurvesTooClose, DegenerateProjection, InvalidCurve,
                     NonIntegerResult)
from .geometry import (DELTA_POLE, EPS_SEP, PolyCurve, WeightedLink,
                       curve_resample, min_curve_distance,
                       project_with_common_pole)

EPS_INT = 1e-6   # residual gate |gauss sum - nearest integer|
EPS_PAR = 1e-9   # parallelism / degeneracy tolerance for projections
MAX_REFINE = 4   # automatic 2x resampling attempts on residual failure


def _oriented_solid_angle(a, b, c):
    """Signed solid angle of the spherical triangle (a, b, c), unit inputs."""
    num = np.einsum("...i,...i->...", a, np.cross(b, c))
    den = (1.0 + np.einsum("...i,...i->...", a, b)
           + np.einsum("...i,...i->...", b, c)
           + np.einsum("...i,...i->...", c, a))
    return 2.0 * np.arctan2(num, den)


def _unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def gauss_linking_sum(c1: PolyCurve, c2: PolyCurve) -> float:
    """Gauss double sum over all segment pairs, divided by 4*pi.

    Exactly the linking number for disjoint curves, up to floating-point
    rounding. Accumulation order is fixed (segment-index blocks in order) so
    results are bit-for-bit reproducible.
    """
    P, Q = c1.vertices, c2.vertices
    a0, a1 = P, np.roll(P, -1, axis=0)
    b0, b1 = Q, np.roll(Q, -1, axis=0)
    b0 = b0[None, :, :]
    b1 = b1[None, :, :]
    block = max(1, 65536 // len(Q))
    total = 0.0
    for lo in range(0, len(P), block):
        p0 = a0[lo:lo + block][:, None, :]
        p1 = a1[lo:lo + block][:, None, :]
        v00 = _unit(b0 - p0)
        v01 = _unit(b1 - p0)
        v10 = _unit(b0 - p1)
        v11 = _unit(b1 - p1)
        area = (_oriented_solid_angle(v00, v10, v11)
                + _oriented_solid_angle(v00, v11, v01))
        total += float(area.sum())
    return total / (4.0 * np.pi)


def _as_r3_pair(c1: PolyCurve, c2: PolyCurve,
                delta_pole: float = DELTA_POLE) -> tuple[PolyCurve, PolyCurve]:
    if c1.ambient != c2.ambient:
        raise InvalidCurve("curves live in different ambients")
    if c1.is_spherical:
        c1, c2 = project_with_common_pole([c1, c2], delta_pole=delta_pole)
    return c1, c2


@dataclass(frozen=True)
class LinkingResult:
    value: int
    residual: float
    refinements: int


def linking_number_detailed(c1: PolyCurve, c2: PolyCurve,
                            eps_int: float = EPS_INT,
                            eps_sep: float = EPS_SEP,
                            max_refine: int = MAX_REFINE,
                            delta_pole: float = DELTA_POLE) -> LinkingResult:
    """Gauss-sum linking number with the recorded residual.

    Near-integer failures trigger automatic 2x resampling of both curves, up
    to ``max_refine`` times, before surfacing ``NonIntegerResult``.
    """
    sep = min_curve_distance(c1, c2)
    if sep <= eps_sep:
        raise CurvesTooClose(
            f"separation {sep:.3e} <= {eps_sep:.3e} between "
            f"{c1.name or 'curve 1'} and {c2.name or 'curve 2'}")
    p1, p2 = _as_r3_pair(c1, c2, delta_pole=delta_pole)
    for attempt in range(max_refine + 1):
        total = gauss_linking_sum(p1, p2)
        nearest = round(total)
        residual = abs(total - nearest)
        if residual < eps_int:
            return LinkingResult(int(nearest), residual, attempt)
        p1 = curve_resample(p1, 2 * p1.n)
        p2 = curve_resample(p2, 2 * p2.n)
    raise NonIntegerResult(
        f"Gauss sum residual {residual:.3e} >= {eps_int:.1e} after "
        f"{max_refine} refinements (curves under-resolved or nearly touching)")


def linking_number(c1: PolyCurve, c2: PolyCurve,
                   eps_int: float = EPS_INT,
                   eps_sep: float = EPS_SEP,
                   delta_pole: float = DELTA_POLE) -> int:
    """Linking number of two disjoint closed curves (exact integer)."""
    return linking_number_detailed(c1, c2, eps_int=eps_int, eps_sep=eps_sep,
                                   delta_pole=delta_pole).value


# -- signed-crossing oracle ---------------------------------------------------

def _projection_frame(direction) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    d = np.asarray(direction, dtype=float)
    n = np.linalg.norm(d)
    if n == 0:
        raise DegenerateProjection("zero projection direction")
    d = d / n
    u = np.zeros(3)
    u[int(np.argmin(np.abs(d)))] = 1.0
    u = u - (u @ d) * d
    u /= np.linalg.norm(u)
    v = np.cross(d, u)
    if np.linalg.det(np.stack([u, v, d], axis=1)) < 0:
        u, v = v, u
    return u, v, d


def _point_segment_plane_distance(p, a, b):
    """2D distance from points p to segments [a, b] (rowwise)."""
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    dd = np.where(dd == 0.0, 1.0, dd)
    t = np.clip(np.einsum("ij,ij->i", p - a, d) / dd, 0.0, 1.0)
    closest = a + t[:, None] * d
    return np.linalg.norm(closest - p, axis=1)


def _segment_pair_plane_distance(p0, p1, q0, q1):
    """2D distance between non-crossing segment pairs (endpoint criterion)."""
    return np.minimum.reduce([
        _point_segment_plane_distance(p0, q0, q1),
        _point_segment_plane_distance(p1, q0, q1),
        _point_segment_plane_distance(q0, p0, p1),
        _point_segment_plane_distance(q1, p0, p1),
    ])


def linking_number_crossings(c1: PolyCurve, c2: PolyCurve, direction,
                             eps_par: float = EPS_PAR) -> int:
    """Half the signed count of inter-curve crossings in a planar projection.

    The frame (u, v, direction) is right-handed and the strand with the
    larger ``direction`` coordinate is the over strand; a crossing counts +1
    when the projected (over, under) tangent pair is positively oriented.

    Raises
    ------
    DegenerateProjection
        If the direction is not generic for this pair (near-parallel edges
        that might meet, grazing or height-degenerate intersections).
    """
    c1, c2 = _as_r3_pair(c1, c2)
    u, v, d = _projection_frame(direction)
    scale = max(float(np.abs(c1.vertices).max()), float(np.abs(c2.vertices).max()), 1.0)

    def proj(c):
        pts = np.stack([c.vertices @ u, c.vertices @ v], axis=1)
        return pts, c.vertices @ d

    p0, hp0 = proj(c1)
    q0, hq0 = proj(c2)
    p1, hp1 = np.roll(p0, -1, axis=0), np.roll(hp0, -1)
    q1, hq1 = np.roll(q0, -1, axis=0), np.roll(hq0, -1)

    r = (p1 - p0)[:, None, :]          # (N,1,2) edge vectors of c1
    s = (q1 - q0)[None, :, :]          # (1,M,2) edge vectors of c2
    w = q0[None, :, :] - p0[:, None, :]
    cross = lambda a, b: a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    den = cross(r, s)                   # (N,M)
    num_s = cross(w, s)                 # parameter along c1 edges * den
    num_t = cross(w, r)                 # parameter along c2 edges * den

    len_r = np.linalg.norm(r, axis=2)
    len_s = np.linalg.norm(s, axis=2)
    near_parallel = np.abs(den) <= eps_par * len_r * len_s
    with np.errstate(divide="ignore", invalid="ignore"):
        si = np.where(near_parallel, np.nan, num_s / den)
        ti = np.where(near_parallel, np.nan, num_t / den)

    margin = eps_par
    inside = (si > margin) & (si < 1 - margin) & (ti > margin) & (ti < 1 - margin)
    grazing = (~near_parallel
               & (si > -margin) & (si < 1 + margin)
               & (ti > -margin) & (ti < 1 + margin)
               & ~inside)
    if np.any(grazing):
        raise DegenerateProjection("projected edges meet at or near an endpoint")

    if np.any(near_parallel):
        # a near-parallel pair only hides a crossing if the segments come
        # close in the plane; far-apart parallel edges are harmless
        ii, jj = np.nonzero(near_parallel)
        d_min = _segment_pair_plane_distance(p0[ii], p1[ii], q0[jj], q1[jj])
        if np.any(d_min <= 1e3 * eps_par * scale):
            raise DegenerateProjection("near-parallel projected edges nearly touch")

    if not np.any(inside):
        return 0
    ii, jj = np.nonzero(inside)
    h1 = hp0[ii] + si[ii, jj] * (hp1[ii] - hp0[ii])
    h2 = hq0[jj] + ti[ii, jj] * (hq1[jj] - hq0[jj])
    if np.any(np.abs(h1 - h2) <= eps_par * scale):
        raise DegenerateProjection("strands at equal height at a crossing")
    signs = np.where(h1 > h2, np.sign(den[ii, jj]), -np.sign(den[ii, jj]))
    total = int(signs.sum())
    if total % 2 != 0:
        raise DegenerateProjection("odd signed crossing total (missed crossing)")
    return total // 2


def _perturbation_directions(n: int) -> np.ndarray:
    """Fixed deterministic unit directions for projection retries."""
    phi = 1.3247179572447460  # root of x**3 = x + 1
    alpha = np.array([1.0 / phi, 1.0 / phi**2])
    k = np.arange(1, n + 1)[:, None]
    uu, vv = ((0.5 + k * alpha) % 1.0).T
    z = 2.0 * uu - 1.0
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.stack([rho * np.cos(2 * np.pi * vv), rho * np.sin(2 * np.pi * vv), z],
                    axis=1)


def linking_number_crossings_robust(c1: PolyCurve, c2: PolyCurve,
                                    direction=(0.0, 0.0, 1.0),
                                    max_retries: int = 32,
                                    eps_par: float = EPS_PAR) -> int:
    """Crossing count with deterministic retry over perturbed directions."""
    d0 = np.asarray(direction, dtype=float)
    trials = [d0] + list(d0 + 0.37 * _perturbation_directions(max_retries))
    last: Exception | None = None
    for d in trials:
        try:
            return linking_number_crossings(c1, c2, d, eps_par=eps_par)
        except DegenerateProjection as exc:
            last = exc
    raise DegenerateProjection(
        f"no generic direction among {max_retries + 1} candidates: {last}")


# -- matrix assembly ----------------------------------------------------------

@dataclass(frozen=True)
class LinkingMatrix:
    """Symmetric pairwise linking numbers; the diagonal is not defined.

    ``entries[i, j]`` for i != j is Lk(component_i, component_j); use
    :meth:`entry` to get diagonal access errors rather than a silent 0.
    """

    names: tuple[str, ...]
    entries: np.ndarray
    max_residual: float = 0.0

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=int).copy()
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("linking matrix must be square")
        if not np.array_equal(e, e.T):
            raise ValueError("linking matrix must be symmetric")
        np.fill_diagonal(e, 0)
        e.flags.writeable = False
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    def entry(self, i: int, j: int) -> int:
        if i == j:
            raise ValueError("diagonal of a linking matrix is not defined")
        return int(self.entries[i, j])

    def row_sum(self, i: int, multiplicities) -> int:
        """Sum over j != i of n_j * Lk(i, j)."""
        mults = np.asarray(list(multiplicities), dtype=int)
        return int(self.entries[i] @ mults - self.entries[i, i] * mults[i])

    def to_json(self) -> dict:
        rows = [[(int(self.entries[i, j]) if i != j else None)
                 for j in range(self.m)] for i in range(self.m)]
        return {"names": list(self.names), "lk": rows,
                "max_residual": self.max_residual}


def linking_matrix(link: WeightedLink,
                   eps_int: float = EPS_INT,
                   eps_sep: float = EPS_SEP,
                   delta_pole: float = DELTA_POLE) -> LinkingMatrix:
    """All pairwise linking numbers of a link's components."""
    m = link.m
    entries = np.zeros((m, m), dtype=int)
    names = link.names()
    worst = 0.0
    comps = list(link.components)
    if comps and comps[0].is_spherical:
        comps = project_with_common_pole(comps, delta_pole=delta_pole)
    for i in range(m):
        for j in range(i + 1, m):
            try:
                res = linking_number_detailed(comps[i], comps[j],
                                              eps_int=eps_int, eps_sep=eps_sep)
            except (CurvesTooClose, NonIntegerResult) as exc:
                raise type(exc)(f"pair ({names[i]}, {names[j]}): {exc}") from exc
            entries[i, j] = entries[j, i] = res.value
            worst = max(worst, res.residual)
    return LinkingMatrix(names, entries, max_residual=worst)
