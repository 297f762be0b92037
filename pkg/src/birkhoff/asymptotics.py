"""Asymptotic invariants: helicity, the Ruelle invariant, and genus trends.

Helicity of a volume-preserving field is estimated as the average asymptotic
linking number: draw point pairs uniformly, flow each point for time T, close
the arcs by short geodesics, and average Lk(loop1, loop2)/T^2. The invariant
measure is fixed to the normalized round volume, which every built-in field
preserves.

Along a periodic orbit three framings coexist: the one induced by the
transverse field zeta, the zero-framing of a spanning surface, and the real
framing carried by the differential of the flow. Their pairwise offsets give

    Slk^zeta(gamma) = Slk^DX(gamma) - R(gamma),

where R is the Ruelle invariant (rotation of the linearized flow against the
zeta framing, in full turns) and only Slk^zeta is always an integer. Slk^DX
is computed through this identity and, whenever the linearized monodromy is a
full rotation, cross-checked geometrically by linking the orbit with a
push-off along the transported frame, so each of the three values is
falsifiable by the other two.

The genus-trend experiment drives a family of rescaled torus-knot fields
(speeds divided by sqrt(p*q), so the orbit periods grow like sqrt(p*q)) and
tabulates g/t^2 against half the helicity; a single fixed flow cannot realize
the growing-period limit, so the family substitutes for it. The Ruelle value
2 for a Hopf fiber used in the tests is derived (explicit variational
solution of the rotation field), not quoted.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (CurvesTooClose, FramingEquationViolated,
                     MissingTransverseField, NonIntegerResult, NotPeriodic,
                     TooManyRejections)
from .flows import (DEFAULT_STEP, FlowField, close_arc, integrate_orbit,
                    periodic_orbit, seifert_field, transport_with_positions)
from .framing import self_linking
from .geometry import (EPS_SEP, PolyCurve, curve_resample,
                       curves_separated_by, reach_proxy, renormalize)
from .linking import linking_number
from .sections import genus as section_genus

EPS_FRAME = 1e-3


# -- helicity -------------------------------------------------------------------

@dataclass(frozen=True)
class HelicityEstimate:
    """Monte-Carlo helicity estimate (per unit normalized volume)."""

    value: float
    stderr: float
    num_pairs: int
    arc_duration: float
    seed: int
    rejected: int = 0
    field_name: str = ""

    def to_json(self) -> dict:
        return {"value": self.value, "stderr": self.stderr,
                "num_pairs": self.num_pairs, "arc_duration": self.arc_duration,
                "seed": self.seed, "rejected": self.rejected,
                "field": self.field_name}


def _closed_orbit_loop(field: FlowField, point, T: float, h: float) -> PolyCurve:
    arc = integrate_orbit(field, point, T, h=h)
    return close_arc(arc)


def _pair_term(field: FlowField, p1, p2, T: float, h: float,
               eps_sep: float, max_link_vertices: int) -> float | None:
    """Lk(loop1, loop2)/T^2 for one sampled pair, or None when rejected."""
    c1 = _closed_orbit_loop(field, p1, T, h)
    c2 = _closed_orbit_loop(field, p2, T, h)
    if c1.n > max_link_vertices:
        c1 = curve_resample(c1, max_link_vertices)
    if c2.n > max_link_vertices:
        c2 = curve_resample(c2, max_link_vertices)
    if not curves_separated_by(c1, c2, eps_sep):
        return None
    try:
        lk = linking_number(c1, c2, eps_sep=eps_sep)
    except (CurvesTooClose, NonIntegerResult):
        return None
    return lk / (T * T)


def estimate_helicity(field: FlowField, T: float, num_pairs: int,
                      seed: int = 0, h: float = DEFAULT_STEP,
                      eps_sep: float = EPS_SEP,
                      max_link_vertices: int = 512,
                      workers: int = 1) -> HelicityEstimate:
    """Average asymptotic linking over seeded uniform point pairs.

    Pairs whose closed loops come closer than ``eps_sep`` are rejected and
    redrawn from the same stream (the count is reported); more rejections
    than ``num_pairs`` aborts with ``TooManyRejections``. Identical seeds
    give bitwise-identical estimates: terms accumulate in draw order
    regardless of ``workers``.
    """
    if T <= 0:
        raise ValueError("arc duration must be positive")
    if num_pairs < 1:
        raise ValueError("need at least one pair")
    rng = np.random.default_rng(seed)
    terms: list[float] = []
    rejected = 0

    def draw_pair():
        pts = rng.standard_normal((2, 4))
        while np.any(np.linalg.norm(pts, axis=1) < 1e-8):
            pts = rng.standard_normal((2, 4))
        return renormalize(pts)

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while len(terms) < num_pairs:
            want = num_pairs - len(terms)
            batch = [draw_pair() for _ in range(want)]
            if pool is not None:
                results = list(pool.map(
                    lambda pq: _pair_term(field, pq[0], pq[1], T, h,
                                          eps_sep, max_link_vertices), batch))
            else:
                results = [_pair_term(field, pq[0], pq[1], T, h,
                                      eps_sep, max_link_vertices) for pq in batch]
            for res in results:
                if res is None:
                    rejected += 1
                    if rejected > num_pairs:
                        raise TooManyRejections(
                            f"{rejected} rejected pairs versus {len(terms)} "
                            f"accepted: arc duration {T:g} too large for the "
                            f"separation tolerance")
                else:
                    terms.append(res)
    finally:
        if pool is not None:
            pool.shutdown()
    arr = np.array(terms)
    if np.all(arr == arr[0]):
        # identical samples: the mean is that value and the spread is zero,
        # exactly (summing would round both)
        value, stderr = float(arr[0]), 0.0
    else:
        value = float(arr.mean())
        stderr = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
    return HelicityEstimate(value=value, stderr=stderr, num_pairs=num_pairs,
                            arc_duration=float(T), seed=seed,
                            rejected=rejected, field_name=field.name)


# -- framings along periodic orbits ----------------------------------------------

def _cross4(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Rowwise u with <u, d> = det[a, b, c, d] for all d (4-space cross product)."""
    M = np.stack([a, b, c], axis=-1)          # (..., 4, 3)
    n = M.shape[:-2]
    u = np.empty(n + (4,))
    rows = np.arange(4)
    for i in range(4):
        sub = M[..., rows != i, :]
        u[..., i] = ((-1) ** (i + 3)) * np.linalg.det(sub)
    return u


def _zeta_frame_angles(field: FlowField, xs: np.ndarray, vs: np.ndarray) -> np.ndarray:
    """Unwrapped angle of transported vectors against the zeta normal frame."""
    if field.transverse is None:
        raise MissingTransverseField(f"field {field.name!r} has no transverse field")
    vel = np.asarray(field.velocity(xs), dtype=float)
    xhat = vel / np.linalg.norm(vel, axis=1, keepdims=True)
    zeta = np.asarray(field.transverse(xs), dtype=float)
    e1 = zeta - np.einsum("ij,ij->i", zeta, xs)[:, None] * xs \
        - np.einsum("ij,ij->i", zeta, xhat)[:, None] * xhat
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = _cross4(xs, xhat, e1)
    e2 /= np.linalg.norm(e2, axis=1, keepdims=True)
    theta = np.arctan2(np.einsum("ij,ij->i", vs, e2),
                       np.einsum("ij,ij->i", vs, e1))
    return np.unwrap(theta)


def _transport_along(field: FlowField, orbit: PolyCurve, h: float):
    if orbit.period is None or orbit.period <= 0:
        raise NotPeriodic("orbit has no positive recorded period")
    if field.transverse is None:
        raise MissingTransverseField(f"field {field.name!r} has no transverse field")
    x0 = orbit.vertices[0]
    v0 = np.asarray(field.transverse(x0[None, :]), dtype=float)[0]
    times, xs, vs = transport_with_positions(field, x0, v0,
                                             float(orbit.period), h=h)
    theta = _zeta_frame_angles(field, xs, vs)
    return times, xs, vs, theta


def ruelle_invariant(field: FlowField, orbit: PolyCurve, h: float = 2e-3) -> float:
    """Rotation (in full turns) of the linearized flow against the zeta framing
    over one period of the orbit."""
    _, _, _, theta = _transport_along(field, orbit, h)
    return float((theta[-1] - theta[0]) / (2.0 * math.pi))


def _flow_framing_value(slk_zeta: Fraction, xs, vs, theta,
                        eps_frame: float) -> tuple[float, float]:
    """(Slk^DX, Ruelle) from one transport, with the geometric cross-check."""
    ruelle = float((theta[-1] - theta[0]) / (2.0 * math.pi))
    value = float(slk_zeta) + ruelle
    rotation = theta[-1] - theta[0]
    off_integer = abs(rotation - 2.0 * math.pi * round(rotation / (2.0 * math.pi)))
    if off_integer < 1e-6:
        geometric = _transported_pushoff_linking(xs, vs)
        if abs(geometric - value) > eps_frame:
            raise FramingEquationViolated(
                f"flow-framing self-linking {value:.6f} disagrees with the "
                f"geometric push-off value {geometric}")
    return value, ruelle


def slk_flow_framing(field: FlowField, orbit: PolyCurve, h: float = 2e-3,
                     eps_frame: float = EPS_FRAME) -> float:
    """Self-linking of the orbit with respect to the flow-differential framing.

    Computed as Slk^zeta + Ruelle. When the transported frame closes up (the
    monodromy rotation is a whole number of turns within 1e-6) an independent
    geometric check runs: the orbit is pushed off along the transported frame
    and linked with itself; the two values must agree within ``eps_frame``.
    """
    slk_zeta = self_linking(orbit, field.zeta_framing())
    _, xs, vs, theta = _transport_along(field, orbit, h)
    value, _ = _flow_framing_value(slk_zeta, xs, vs, theta, eps_frame)
    return value


def _transported_pushoff_linking(xs: np.ndarray, vs: np.ndarray,
                                 max_vertices: int = 512) -> int:
    """Linking of the orbit with its push-off along the transported frame."""
    xs = xs[:-1]  # final sample repeats the start
    vs = vs[:-1]
    stride = max(1, int(math.ceil(len(xs) / max_vertices)))
    xs = xs[::stride]
    vs = vs[::stride]
    base = PolyCurve(renormalize(xs), ambient="s3")
    eps = 0.5 * reach_proxy(base)
    push = PolyCurve(renormalize(np.cos(eps) * xs + np.sin(eps) * vs), ambient="s3")
    return linking_number(base, push)


@dataclass(frozen=True)
class FramingTriple:
    """The three framing offsets along one periodic orbit.

    Invariant: slk_zeta = slk_dx - ruelle (within float tolerance); slk_zeta
    is an exact rational and an integer for plain framings on the 3-sphere.
    """

    slk_zeta: Fraction
    slk_dx: float
    ruelle: float
    orbit_name: str = ""
    period: float = 0.0

    def residual(self) -> float:
        return abs(float(self.slk_zeta) - (self.slk_dx - self.ruelle))


def framing_triple(field: FlowField, orbit: PolyCurve, framing=None,
                   h: float = 2e-3, eps_frame: float = EPS_FRAME) -> FramingTriple:
    """Assemble (Slk^zeta, Slk^DX, Ruelle) for one orbit and check consistency.

    Raises
    ------
    FramingEquationViolated
        If the three values fail their defining identity within ``eps_frame``
        (signals integrator or framing bugs).
    """
    if framing is None:
        framing = field.zeta_framing()
    slk_zeta = self_linking(orbit, framing)
    _, xs, vs, theta = _transport_along(field, orbit, h)
    slk_dx, ruelle = _flow_framing_value(slk_zeta, xs, vs, theta, eps_frame)
    triple = FramingTriple(slk_zeta=slk_zeta, slk_dx=slk_dx, ruelle=ruelle,
                           orbit_name=orbit.name, period=float(orbit.period or 0.0))
    if triple.residual() >= eps_frame:
        raise FramingEquationViolated(
            f"|Slk^zeta - (Slk^DX - R)| = {triple.residual():.3e} >= {eps_frame}")
    return triple


# -- asymptotic genus experiment ---------------------------------------------------

@dataclass(frozen=True)
class ExperimentRow:
    """One family member of the genus-versus-helicity trend."""

    p: int | None
    q: int | None
    t_n: float
    genus: int
    slk_zeta: Fraction
    g_over_t2: float
    slk_dx_over_t2: float
    ruelle_over_t2: float
    hel_ref: float          # half the estimated helicity (the trend target)
    rel_dev: float
    hel_stderr: float = 0.0


def seifert_fibonacci_family(depth: int, vertices_per_strand: int = 64,
                             max_vertices: int = 4096) -> list[tuple[FlowField, PolyCurve, float]]:
    """Rescaled torus-knot fields over consecutive Fibonacci pairs.

    Member n has speeds (p, q)/sqrt(p q), so its generic orbits keep linking
    p*q while the period grows to 2*pi*sqrt(p q); the list starts at (1, 2).
    """
    pairs = []
    a, b = 1, 2
    for _ in range(depth):
        pairs.append((a, b))
        a, b = b, a + b
    family = []
    start = renormalize(np.array([1.0, 0.0, 1.0, 0.0]))
    for p, q in pairs:
        field = seifert_field(p, q, scale=math.sqrt(p * q))
        n_verts = min(max_vertices, vertices_per_strand * (p + q))
        orbit = periodic_orbit(field, start, n_vertices=n_verts)
        family.append((field, orbit, float(orbit.period)))
    return family


def asymptotic_genus_experiment(family, hel_pairs: int = 4, hel_seed: int = 0,
                                h: float = 5e-3,
                                hel_step: float = DEFAULT_STEP,
                                eps_frame: float = EPS_FRAME,
                                workers: int = 1) -> list[ExperimentRow]:
    """Tabulate g/t^2 against half the helicity over a family of flows.

    Each family member is (field, periodic orbit, effective period t_n). The
    genus comes from the single-orbit surface formula g = 1 + (Slk^zeta - 1)/2
    evaluated through the exact pipeline; Slk^DX and the Ruelle invariant are
    reported scaled by 1/t^2 alongside. Rows are independent; an empty family
    gives an empty table.
    """
    rows: list[ExperimentRow] = []
    for field, orbit, t_n in family:
        try:
            triple = framing_triple(field, orbit, h=h, eps_frame=eps_frame)
            topo = section_genus([1], [[0]], [triple.slk_zeta])
            if topo.genus is None:
                raise FramingEquationViolated(
                    f"orbit of {field.name} does not bound a connected surface")
            hel = estimate_helicity(field, T=t_n, num_pairs=hel_pairs,
                                    seed=hel_seed, h=hel_step, workers=workers)
            t2 = t_n * t_n
            hel_ref = 0.5 * hel.value
            g_over = topo.genus / t2
            rel = abs(g_over - hel_ref) / abs(hel_ref) if hel_ref != 0 else math.inf
            rows.append(ExperimentRow(
                p=field.p, q=field.q, t_n=float(t_n), genus=topo.genus,
                slk_zeta=triple.slk_zeta, g_over_t2=g_over,
                slk_dx_over_t2=triple.slk_dx / t2,
                ruelle_over_t2=triple.ruelle / t2,
                hel_ref=hel_ref, rel_dev=rel, hel_stderr=hel.stderr))
        except Exception as exc:
            raise type(exc)(f"family member {field.name}: {exc}") from exc
    return rows


def experiment_csv_rows(rows: list[ExperimentRow]) -> list[list]:
    """Rows for the delimited report: p,q,t_n,genus,g_over_t2,hel_ref,rel_dev."""
    header = ["p", "q", "t_n", "genus", "g_over_t2", "hel_ref", "rel_dev"]
    out = [header]
    for r in rows:
        out.append([r.p, r.q, repr(r.t_n), r.genus, repr(r.g_over_t2),
                    repr(r.hel_ref), repr(r.rel_dev)])
    return out
