"""Vector fields on the 3-sphere, orbit integration, and the linearized flow.

Built-in fields are the one-parameter rotation families: ``seifert_field(p, q)``
is (z1, z2) -> (i p z1, i q z2) on the unit sphere of C^2 (gcd(p, q) = 1), and
``hopf_field()`` is the (1, 1) member, whose orbits are the fibers of the Hopf
fibration. The bundled transverse field is a second Hopf fibration orthogonal
to the first (left quaternion multiplication by j against multiplication
by i); orientations are fixed so that the self-linking of a Hopf fiber with
respect to this framing is -1, and any two Hopf fibers link +1.

All built-ins have analytic orbits (block rotations), which the periodic
orbit samplers use directly; integration is classical fixed-step RK4 with
per-step renormalization onto the sphere, for deterministic, reproducible
trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import (DegenerateFraming, InvalidCurve, MissingJacobian,
                     MissingTransverseField, NotPeriodic, StepCapExceeded,
                     TooFewVertices)
from .framing import FramingField, ambient_framing
from .geometry import (PolyCurve, curve_resample, random_sphere_points,
                       renormalize)

DEFAULT_STEP = 1e-2
STEP_CAP = 10_000_000
EPS_CLOSE = 1e-8

# left quaternion multiplication by i and j on (1, i, j, k) coordinates
L_I = np.array([[0., -1., 0., 0.],
                [1., 0., 0., 0.],
                [0., 0., 0., -1.],
                [0., 0., 1., 0.]])
L_J = np.array([[0., 0., -1., 0.],
                [0., 0., 0., 1.],
                [1., 0., 0., 0.],
                [0., -1., 0., 0.]])


def _rotation_generator(p: int, q: int) -> np.ndarray:
    return np.array([[0., -p, 0., 0.],
                     [p, 0., 0., 0.],
                     [0., 0., 0., -q],
                     [0., 0., q, 0.]])


@dataclass(frozen=True)
class FlowField:
    """Non-singular vector field on the unit 3-sphere.

    ``velocity`` maps points (n, 4) to tangent vectors (n, 4); ``transverse``
    (optional) is a field everywhere transverse to the flow; ``jacobian``
    (optional) gives the ambient differential used by the variational
    equation, either as a constant matrix or a per-point callable.
    """

    name: str
    velocity: Callable[[np.ndarray], np.ndarray]
    transverse: Callable[[np.ndarray], np.ndarray] | None = None
    jacobian_matrix: np.ndarray | None = None
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    analytic_flow: Callable[[np.ndarray, float], np.ndarray] | None = None
    period_fn: Callable[[np.ndarray], float] | None = None
    speed_scale: float = 1.0
    p: int | None = None
    q: int | None = None
    scale: float = 1.0

    def jacobian_at(self, x: np.ndarray) -> np.ndarray:
        if self.jacobian_matrix is not None:
            return self.jacobian_matrix
        if self.jacobian is not None:
            return np.asarray(self.jacobian(x), dtype=float)
        raise MissingJacobian(f"field {self.name!r} has no differential")

    @property
    def has_jacobian(self) -> bool:
        return self.jacobian_matrix is not None or self.jacobian is not None

    def zeta_framing(self) -> FramingField:
        """Framing induced by the bundled transverse field."""
        if self.transverse is None:
            raise MissingTransverseField(f"field {self.name!r} has no transverse field")
        return ambient_framing(self.transverse, name=f"zeta[{self.name}]")

    def rescaled(self, c: float) -> "FlowField":
        """The field divided by c (orbits unchanged, traversed c times slower)."""
        if self.p is not None and self.q is not None:
            return seifert_field(self.p, self.q, scale=self.scale * c)
        vel = self.velocity
        jac_m = None if self.jacobian_matrix is None else self.jacobian_matrix / c
        jac = None
        if self.jacobian is not None:
            jac = lambda x: np.asarray(self.jacobian(x), dtype=float) / c
        ana = None
        if self.analytic_flow is not None:
            ana = lambda pts, t: self.analytic_flow(pts, t / c)
        per = None
        if self.period_fn is not None:
            per = lambda x: self.period_fn(x) * c
        return replace(self, name=f"{self.name}/{c:g}",
                       velocity=lambda pts: vel(pts) / c,
                       jacobian_matrix=jac_m, jacobian=jac,
                       analytic_flow=ana, period_fn=per,
                       speed_scale=self.speed_scale / c,
                       scale=self.scale * c)


def validate_field(field: FlowField, n_sample: int = 1000, seed: int = 0) -> None:
    """Check tangency, non-vanishing, and transversality on a point sample."""
    pts = random_sphere_points(np.random.default_rng(seed), n_sample)
    vel = np.asarray(field.velocity(pts), dtype=float)
    radial = np.abs(np.einsum("ij,ij->i", vel, pts))
    if float(radial.max()) > 1e-10:
        raise InvalidCurve(f"field {field.name!r} is not tangent to the sphere")
    speeds = np.linalg.norm(vel, axis=1)
    if float(speeds.min()) < 1e-12:
        raise InvalidCurve(f"field {field.name!r} vanishes on the sample")
    if field.transverse is not None:
        zet = np.asarray(field.transverse(pts), dtype=float)
        znorm = np.linalg.norm(zet, axis=1)
        if float(znorm.min()) < 1e-12:
            raise InvalidCurve("transverse field vanishes on the sample")
        cosang = np.abs(np.einsum("ij,ij->i", vel, zet)) / (speeds * znorm)
        angle = np.arccos(np.clip(cosang, -1.0, 1.0))
        if float(angle.min()) <= 1e-3:
            raise InvalidCurve(
                f"transverse field within {angle.min():.2e} rad of the flow")


def seifert_field(p: int, q: int, scale: float = 1.0, validate: bool = False) -> FlowField:
    """The rotation field (i p z1, i q z2)/scale on the unit 3-sphere.

    Generic orbits are (p, q) torus knots of period 2*pi*scale; two generic
    orbits link p*q. Requires p, q coprime positive integers.
    """
    p, q = int(p), int(q)
    if p < 1 or q < 1 or math.gcd(p, q) != 1:
        raise InvalidCurve("seifert field needs coprime positive integers p, q")
    if not scale > 0:
        raise InvalidCurve("field scale must be positive")
    A = _rotation_generator(p, q) / scale

    def velocity(pts):
        return np.asarray(pts, dtype=float) @ A.T

    def transverse(pts):
        return np.asarray(pts, dtype=float) @ L_J.T

    def analytic_flow(pts, t):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        cp, sp = np.cos(p * t / scale), np.sin(p * t / scale)
        cq, sq = np.cos(q * t / scale), np.sin(q * t / scale)
        out = np.empty_like(pts)
        out[..., 0] = cp * pts[..., 0] - sp * pts[..., 1]
        out[..., 1] = sp * pts[..., 0] + cp * pts[..., 1]
        out[..., 2] = cq * pts[..., 2] - sq * pts[..., 3]
        out[..., 3] = sq * pts[..., 2] + cq * pts[..., 3]
        return out

    def period_fn(x):
        x = np.asarray(x, dtype=float)
        r1 = math.hypot(x[0], x[1])
        r2 = math.hypot(x[2], x[3])
        if r2 < 1e-9:
            return 2 * math.pi * scale / p
        if r1 < 1e-9:
            return 2 * math.pi * scale / q
        return 2 * math.pi * scale

    name = "hopf" if (p, q) == (1, 1) else f"seifert({p},{q})"
    if scale != 1.0:
        name += f"/{scale:g}"
    field = FlowField(name=name, velocity=velocity, transverse=transverse,
                      jacobian_matrix=A, analytic_flow=analytic_flow,
                      period_fn=period_fn, speed_scale=max(p, q) / scale,
                      p=p, q=q, scale=scale)
    if validate:
        validate_field(field)
    return field


def hopf_field(scale: float = 1.0) -> FlowField:
    """The Hopf field (i z1, i z2)/scale; every orbit is a great circle."""
    return seifert_field(1, 1, scale=scale)


# -- integration ---------------------------------------------------------------

@dataclass(frozen=True)
class OrbitArc:
    """Time-ordered flow samples phi^[0, T](p) on the sphere."""

    times: np.ndarray
    points: np.ndarray
    field_name: str = ""

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).copy()
        pts = np.asarray(self.points, dtype=float).copy()
        if len(t) != len(pts) or pts.ndim != 2 or pts.shape[1] != 4:
            raise InvalidCurve("arc times and points misaligned")
        if len(t) > 1 and np.any(np.diff(t) <= 0):
            raise InvalidCurve("arc times must be strictly increasing")
        t.flags.writeable = False
        pts.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "points", pts)

    @property
    def start(self) -> np.ndarray:
        return self.points[0]

    @property
    def end(self) -> np.ndarray:
        return self.points[-1]

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])


def _rk4_step(f, x, h):
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_orbit(field: FlowField, p, T: float, h: float = DEFAULT_STEP,
                    max_steps: int = STEP_CAP) -> OrbitArc:
    """Flow the point ``p`` for time ``T`` with fixed-step RK4.

    The sphere constraint is restored after every step. A final partial step
    lands exactly on T. T = 0 yields the single-sample arc at p.
    """
    x = renormalize(np.asarray(p, dtype=float))
    if T < 0:
        raise InvalidCurve("arc duration must be non-negative")
    if T == 0:
        return OrbitArc(np.array([0.0]), x[None, :], field_name=field.name)
    n_full = int(T / h)
    rem = T - n_full * h
    n_total = n_full + (1 if rem > 1e-14 else 0)
    if n_total > max_steps:
        raise StepCapExceeded(f"{n_total} steps exceed the cap {max_steps}")

    def f(state):
        return field.velocity(state[None, :])[0]

    times = np.empty(n_total + 1)
    pts = np.empty((n_total + 1, 4))
    times[0] = 0.0
    pts[0] = x
    for k in range(n_total):
        step = h if k < n_full else rem
        x = _rk4_step(f, x, step)
        x = x / np.linalg.norm(x)
        times[k + 1] = times[k] + step
        pts[k + 1] = x
    times[-1] = T
    return OrbitArc(times, pts, field_name=field.name)


def _slerp(a, b, fractions_):
    """Great-circle interpolation between unit 4-vectors a and b."""
    dot = float(np.clip(a @ b, -1.0, 1.0))
    ang = math.acos(dot)
    if ang < 1e-12:
        return np.repeat(a[None, :], len(fractions_), axis=0)
    if ang > math.pi - 1e-9:
        # nearly antipodal: route through an arbitrary orthogonal midpoint
        mid = np.zeros(4)
        mid[int(np.argmin(np.abs(a)))] = 1.0
        mid = mid - (mid @ a) * a
        mid /= np.linalg.norm(mid)
        first = _slerp(a, mid, fractions_ * 2.0)
        second = _slerp(mid, b, fractions_ * 2.0 - 1.0)
        return np.where((fractions_ <= 0.5)[:, None], first, second)
    s = math.sin(ang)
    u = np.asarray(fractions_)[:, None]
    return (np.sin((1.0 - u) * ang) * a + np.sin(u * ang) * b) / s


def close_arc(arc: OrbitArc, eps_close: float = EPS_CLOSE) -> PolyCurve:
    """Close an orbit arc into a polygonal loop.

    If the endpoint returns to the start within ``eps_close`` the closure is
    the trivial identification (and the arc duration is recorded as the
    curve's period); otherwise a geodesic closing segment is appended,
    subdivided to match the arc's median sample spacing.
    """
    pts = arc.points
    if len(pts) < 3:
        raise InvalidCurve("arc too short to close into a curve")
    gap = float(np.linalg.norm(pts[-1] - pts[0]))
    if gap <= eps_close:
        verts = pts[:-1]
        return PolyCurve(verts, ambient="s3", times=arc.times[:-1],
                         period=arc.duration, field_name=arc.field_name)
    spacing = float(np.median(np.linalg.norm(np.diff(pts, axis=0), axis=1)))
    ang = math.acos(float(np.clip(pts[-1] @ pts[0], -1.0, 1.0)))
    n_seg = max(1, int(math.ceil(ang / max(spacing, 1e-12))))
    if n_seg > 1:
        fracs = np.arange(1, n_seg) / n_seg
        bridge = _slerp(pts[-1], pts[0], fracs)
        verts = np.vstack([pts, bridge])
    else:
        verts = pts
    return PolyCurve(renormalize(verts), ambient="s3", field_name=arc.field_name)


# -- periodic orbits -----------------------------------------------------------

def periodic_orbit(field: FlowField, p, n_vertices: int = 128,
                   method: str = "auto", max_time: float = 200.0,
                   eps_close: float = EPS_CLOSE, h: float = 1e-3) -> PolyCurve:
    """Closed orbit through ``p`` sampled with ``n_vertices`` uniform vertices.

    Built-in fields use their analytic flow and exact period; otherwise the
    first return within ``eps_close`` is detected numerically (bracketed at
    the sample step, then refined by golden-section search).
    """
    if n_vertices < 3:
        raise TooFewVertices("a closed orbit curve needs at least 3 vertices")
    x0 = renormalize(np.asarray(p, dtype=float))
    if method not in ("auto", "analytic", "numeric"):
        raise InvalidCurve(f"unknown method {method!r}")
    analytic_available = (field.analytic_flow is not None
                          and field.period_fn is not None)
    use_analytic = (method in ("auto", "analytic")) and analytic_available
    if method == "analytic" and not analytic_available:
        raise NotPeriodic(f"field {field.name!r} has no analytic flow")
    if use_analytic:
        T = field.period_fn(x0)
        times = np.arange(n_vertices) * (T / n_vertices)
        verts = np.vstack([field.analytic_flow(x0, t)[0] for t in times])
        return PolyCurve(renormalize(verts), ambient="s3", times=times, period=T,
                         field_name=field.name, name=f"orbit[{field.name}]")
    T = _detect_period(field, x0, max_time=max_time, eps_close=eps_close, h=h)
    arc = integrate_orbit(field, x0, T, h=h)
    gap = float(np.linalg.norm(arc.end - arc.start))
    if gap > 1e-6:
        raise NotPeriodic(f"detected period does not close the orbit (gap {gap:.2e})")
    curve = close_arc(arc, eps_close=max(eps_close, 2 * gap))
    curve = curve_resample(curve, n_vertices)
    return PolyCurve(curve.vertices, ambient="s3", period=T,
                     field_name=field.name, name=f"orbit[{field.name}]")


def _detect_period(field: FlowField, x0, max_time: float,
                   eps_close: float, h: float) -> float:
    def f(state):
        return field.velocity(state[None, :])[0]

    def flow_from(x, tau):
        return renormalize(_rk4_step(f, x, tau))

    x = x0.copy()
    t = 0.0
    while t < max_time:
        x_prev = x
        x = flow_from(x, h)
        t += h
        d = float(np.linalg.norm(x - x0))
        travel = float(np.linalg.norm(x - x_prev))
        if d < 3.0 * travel and t > 5 * h:
            # bracket the closest approach over tau in [0, 2h] from x_prev
            gr = (math.sqrt(5.0) - 1.0) / 2.0
            a, b = 0.0, 2 * h
            c1 = b - gr * (b - a)
            c2 = a + gr * (b - a)
            for _ in range(80):
                d1 = float(np.linalg.norm(flow_from(x_prev, c1) - x0))
                d2 = float(np.linalg.norm(flow_from(x_prev, c2) - x0))
                if d1 < d2:
                    b = c2
                else:
                    a = c1
                c1 = b - gr * (b - a)
                c2 = a + gr * (b - a)
            tau = 0.5 * (a + b)
            if float(np.linalg.norm(flow_from(x_prev, tau) - x0)) < eps_close:
                return (t - h) + tau
    raise NotPeriodic(
        f"no return within {eps_close:g} of the start in time {max_time:g}")


# -- linearized flow -----------------------------------------------------------

def transport_with_positions(field: FlowField, x0, v0, duration: float,
                             h: float = 2e-3
                             ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Variational transport returning (times, positions, normal vectors)."""
    if not field.has_jacobian:
        raise MissingJacobian(f"field {field.name!r} has no differential")
    x = renormalize(np.asarray(x0, dtype=float))
    v = np.asarray(v0, dtype=float).copy()
    if abs(float(v @ x)) > 1e-8 * np.linalg.norm(v):
        raise DegenerateFraming("v0 is not tangent to the sphere at the start point")
    xdot = field.velocity(x[None, :])[0]
    xhat = xdot / np.linalg.norm(xdot)
    v_norm = v - (v @ x) * x - (v @ xhat) * xhat
    if np.linalg.norm(v_norm) < 1e-8 * max(np.linalg.norm(v), 1e-30):
        raise DegenerateFraming("v0 is tangent to the flow direction: not a normal vector")
    v = v_norm / np.linalg.norm(v_norm)
    if duration == 0:
        return np.array([0.0]), x[None, :], v[None, :]

    # effective step keeps the per-step rotation small for fast fields
    h_eff = h / max(1.0, field.speed_scale)
    n_full = int(duration / h_eff)
    rem = duration - n_full * h_eff
    n_total = n_full + (1 if rem > 1e-14 else 0)
    if n_total > STEP_CAP:
        raise StepCapExceeded(f"{n_total} variational steps exceed the cap")

    const_jac = field.jacobian_matrix

    def vel(xx):
        return field.velocity(xx[None, :])[0]

    def jac(xx):
        return const_jac if const_jac is not None else field.jacobian_at(xx)

    times = np.empty(n_total + 1)
    pts = np.empty((n_total + 1, 4))
    vecs = np.empty((n_total + 1, 4))
    times[0] = 0.0
    pts[0] = x
    vecs[0] = v
    for k in range(n_total):
        step = h_eff if k < n_full else rem
        k1x = vel(x)
        k1v = jac(x) @ v
        x2 = x + 0.5 * step * k1x
        k2x = vel(x2)
        k2v = jac(x2) @ (v + 0.5 * step * k1v)
        x3 = x + 0.5 * step * k2x
        k3x = vel(x3)
        k3v = jac(x3) @ (v + 0.5 * step * k2v)
        x4 = x + step * k3x
        k4x = vel(x4)
        k4v = jac(x4) @ (v + step * k3v)
        x = x + (step / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + (step / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        x = x / np.linalg.norm(x)
        xdot = vel(x)
        xhat = xdot / np.linalg.norm(xdot)
        v = v - (v @ x) * x - (v @ xhat) * xhat
        v = v / np.linalg.norm(v)
        times[k + 1] = times[k] + step
        pts[k + 1] = x
        vecs[k + 1] = v
    return times, pts, vecs


def linearized_transport(field: FlowField, orbit: PolyCurve, v0,
                         h: float = 2e-3, duration: float | None = None
                         ) -> tuple[np.ndarray, np.ndarray]:
    """Transport a normal vector along a periodic orbit by the flow differential.

    Integrates the variational equation dv/dt = DX(x) v together with the
    orbit, then projects v onto the plane normal to both the sphere radius
    and the flow direction after every step (the quotient by the flow
    direction is what carries the rotation), renormalizing as it goes.

    Returns (times, vectors): unit normal representatives at each sample.
    """
    if duration is None:
        if orbit.period is None:
            raise NotPeriodic("orbit has no recorded period")
        duration = float(orbit.period)
    times, _, vecs = transport_with_positions(field, orbit.vertices[0], v0,
                                              duration, h=h)
    return times, vecs


# -- convenience builders -------------------------------------------------------

def hopf_fibers(m: int, n_vertices: int = 256) -> list[PolyCurve]:
    """m pairwise disjoint Hopf fibers, deterministically spread in latitude."""
    field = hopf_field()
    fibers = []
    for k in range(m):
        theta = (k + 1) * (math.pi / 2) / (m + 1)
        p = np.array([math.cos(theta), 0.0, math.sin(theta), 0.0])
        fibers.append(periodic_orbit(field, p, n_vertices).with_name(f"fiber_{k}"))
    return fibers
