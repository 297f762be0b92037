"""Framings of closed curves, push-offs, and self-linking numbers.

A framing assigns to every curve vertex a direction transverse to the curve;
after projecting out the tangential (and, on the sphere, radial) component it
becomes a unit normal field. Pushing the curve off along the framing and
linking with the original gives the self-linking number. A rational framing
traverses the curve ``k_f`` times before closing; its self-linking is the
linking number of the base with the k_f-fold push-off divided by ``k_f``,
always an exact rational.

The zero-framing (the one induced by any spanning surface) is never
constructed: every self-linking is computed directly as a linking number of
an explicit push-off.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import DegenerateFraming, EpsilonTooLarge, UnstableSelfLinking
from .geometry import PolyCurve, min_curve_distance, reach_proxy, renormalize
from .linking import linking_number

EPS_ANG = 1e-6   # minimum angle between framing vector and tangent (rad)


@dataclass(frozen=True)
class FramingField:
    """Source of framing directions along a curve.

    kind "ambient": ``evaluator`` maps vertex positions (n, d) to vectors
    (n, d); typically the restriction of a vector field transverse to the
    flow. kind "explicit": per-vertex normal rows supplied directly.
    """

    kind: str
    evaluator: Callable[[np.ndarray], np.ndarray] | None = None
    normals: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("ambient", "explicit"):
            raise DegenerateFraming(f"unknown framing kind {self.kind!r}")
        if self.kind == "ambient" and self.evaluator is None:
            raise DegenerateFraming("ambient framing needs an evaluator")
        if self.kind == "explicit":
            if self.normals is None:
                raise DegenerateFraming("explicit framing needs normal vectors")
            arr = np.asarray(self.normals, dtype=float).copy()
            arr.flags.writeable = False
            object.__setattr__(self, "normals", arr)

    def raw_vectors(self, curve: PolyCurve) -> np.ndarray:
        if self.kind == "ambient":
            out = np.asarray(self.evaluator(curve.vertices), dtype=float)
            if out.shape != curve.vertices.shape:
                raise DegenerateFraming("ambient evaluator returned a bad shape")
            return out
        if self.normals.shape != curve.vertices.shape:
            raise DegenerateFraming(
                f"explicit normals shape {self.normals.shape} does not match "
                f"curve with {curve.n} vertices")
        return np.asarray(self.normals, dtype=float)


def ambient_framing(evaluator, name: str = "") -> FramingField:
    return FramingField(kind="ambient", evaluator=evaluator, name=name)


def explicit_framing(normals, name: str = "") -> FramingField:
    return FramingField(kind="explicit", normals=normals, name=name)


@dataclass(frozen=True)
class RationalFraming:
    """Framing together with its longitudinal winding k_f >= 1."""

    base: FramingField
    k_f: int = 1

    def __post_init__(self):
        if int(self.k_f) < 1:
            raise DegenerateFraming("k_f must be a positive integer")
        object.__setattr__(self, "k_f", int(self.k_f))


def _as_rational(framing) -> RationalFraming:
    if isinstance(framing, RationalFraming):
        return framing
    if isinstance(framing, FramingField):
        return RationalFraming(framing, 1)
    raise DegenerateFraming(f"not a framing: {framing!r}")


def curve_tangents(curve: PolyCurve) -> np.ndarray:
    """Unit tangents at vertices (central differences of the closed polygon)."""
    v = curve.vertices
    t = np.roll(v, -1, axis=0) - np.roll(v, 1, axis=0)
    if curve.is_spherical:
        t = t - np.einsum("ij,ij->i", t, v)[:, None] * v
    norms = np.linalg.norm(t, axis=1)
    if np.any(norms < 1e-14):
        raise DegenerateFraming("degenerate tangent (hairpin vertex)")
    return t / norms[:, None]


def unit_normals(curve: PolyCurve, framing, eps_ang: float = EPS_ANG) -> np.ndarray:
    """Unit normal field of the framing along the curve.

    Projects the raw framing vectors off the tangent direction (and, for
    spherical curves, off the radial direction) and normalizes.

    Raises
    ------
    DegenerateFraming
        If a raw vector is within ``eps_ang`` of the tangent line, or its
        normal part is shorter than ``eps_ang``.
    """
    rf = _as_rational(framing)
    raw = rf.base.raw_vectors(curve)
    v = curve.vertices
    t = curve_tangents(curve)
    work = raw.copy()
    if curve.is_spherical:
        work = work - np.einsum("ij,ij->i", work, v)[:, None] * v
    raw_norm = np.linalg.norm(work, axis=1)
    if np.any(raw_norm < eps_ang):
        raise DegenerateFraming("framing vector (tangential to the sphere) vanishes")
    perp = work - np.einsum("ij,ij->i", work, t)[:, None] * t
    perp_norm = np.linalg.norm(perp, axis=1)
    sin_angle = perp_norm / raw_norm
    if np.any(sin_angle <= eps_ang):
        raise DegenerateFraming(
            f"framing within {eps_ang} rad of the tangent at some vertex")
    if np.any(perp_norm <= eps_ang):
        raise DegenerateFraming("normal part of the framing too short")
    return perp / perp_norm[:, None]


def pushoff(curve: PolyCurve, framing, epsilon: float) -> PolyCurve:
    """Push the curve off itself along the framing.

    The result traverses the base curve ``k_f`` times, each vertex displaced
    by ``epsilon`` along the unit normal framing vector (an angle for
    spherical curves, a length in 3-space).

    Raises
    ------
    EpsilonTooLarge
        If ``epsilon`` is not below the curve's reach proxy, or the push-off
        fails to stay disjoint from the base.
    DegenerateFraming
        Propagated from the framing validity checks.
    """
    rf = _as_rational(framing)
    if epsilon <= 0:
        raise EpsilonTooLarge("epsilon must be positive")
    reach = reach_proxy(curve)
    if epsilon >= reach:
        raise EpsilonTooLarge(
            f"epsilon {epsilon:.3e} >= reach proxy {reach:.3e}")
    normals = unit_normals(curve, rf)
    if curve.is_spherical:
        pts = np.cos(epsilon) * curve.vertices + np.sin(epsilon) * normals
        pts = renormalize(pts)
    else:
        pts = curve.vertices + epsilon * normals
    if rf.k_f > 1:
        pts = np.tile(pts, (rf.k_f, 1))
    off = PolyCurve(pts, ambient=curve.ambient,
                    name=(curve.name + "+pushoff") if curve.name else "pushoff")
    if min_curve_distance(curve, off) <= 0.2 * epsilon:
        raise EpsilonTooLarge("push-off touches the base curve")
    return off


def self_linking(curve: PolyCurve, framing, epsilon: float | None = None) -> Fraction:
    """Self-linking number: Lk(curve, push-off)/k_f as an exact rational.

    Evaluated at two push-off offsets (``epsilon`` and ``epsilon/2``); the two
    results must agree exactly, otherwise the offset was not below the
    curve's true reach and ``UnstableSelfLinking`` is raised.
    """
    rf = _as_rational(framing)
    if epsilon is None:
        epsilon = 0.5 * reach_proxy(curve)
    values = []
    for eps in (epsilon, 0.5 * epsilon):
        off = pushoff(curve, rf, eps)
        values.append(Fraction(linking_number(curve, off), rf.k_f))
    if values[0] != values[1]:
        raise UnstableSelfLinking(
            f"self-linking changed from {values[0]} to {values[1]} when the "
            f"offset was halved; retry with a smaller epsilon")
    return values[0]
