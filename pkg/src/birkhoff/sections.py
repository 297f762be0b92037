"""Topology of a transverse surface from boundary data alone.

For a non-singular field on the 3-sphere with a surface S transverse to the
flow and oriented boundary sum_i n_i gamma_i, the Euler characteristic is

    chi(S) = - sum_{i<j} (n_i + n_j) Lk(gamma_i, gamma_j)
             - sum_i n_i Slk^zeta(gamma_i),

where zeta is any field everywhere transverse to the flow. Capping the
boundary circles with discs gives the genus

    g(S) = 1 + (1/2) [ sum_{i<j} (n_i + n_j) Lk
                       + sum_i ( n_i Slk^zeta(gamma_i)
                                 - gcd(n_i, sum_{j!=i} n_j Lk(gamma_i, gamma_j)) ) ],

because the surface meets the boundary torus around gamma_i in
gcd(n_i, |meridian|) circles of slope

    (meridian, longitude) = ( -sum_{j!=i} n_j Lk(gamma_i, gamma_j),  n_i ).

Everything here is exact integer/rational arithmetic; floating point never
enters this module. Whether a transverse surface actually exists is not
checked: these are the values its topology must have if it does. When the
formula yields a negative (or non-integer) genus the boundary data cannot
bound a connected transverse surface; chi is still valid for disconnected
ones, so chi is reported and the genus is omitted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import NonIntegerChi, ZeroBoundary
from .framing import RationalFraming, FramingField
from .geometry import WeightedLink
from .linking import LinkingMatrix, linking_matrix


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    raise NonIntegerChi(f"expected an exact rational, got {type(x).__name__}")


def _lk_entries(lk, m: int) -> list[list[Fraction]]:
    if isinstance(lk, LinkingMatrix):
        arr = lk.entries
    else:
        arr = lk
    rows = [[_as_fraction(arr[i][j]) if i != j else Fraction(0)
             for j in range(m)] for i in range(m)]
    for i in range(m):
        for j in range(m):
            if rows[i][j] != rows[j][i]:
                raise NonIntegerChi("linking matrix must be symmetric")
    return rows


def _int_lk_entries(lk, m: int) -> list[list[int]]:
    rows = _lk_entries(lk, m)
    out = []
    for i in range(m):
        row = []
        for j in range(m):
            if rows[i][j].denominator != 1:
                raise NonIntegerChi("boundary operations need integer linking numbers")
            row.append(int(rows[i][j]))
        out.append(row)
    return out


def euler_characteristic(multiplicities: Sequence[int], lk, slk) -> int:
    """Euler characteristic of the transverse surface, exactly.

    Raises
    ------
    NonIntegerChi
        If the rational inputs do not combine to an integer.
    """
    n = [int(x) for x in multiplicities]
    m = len(n)
    slk = [_as_fraction(s) for s in slk]
    if len(slk) != m:
        raise NonIntegerChi("multiplicities and self-linkings misaligned")
    rows = _lk_entries(lk, m)
    total = Fraction(0)
    for i in range(m):
        for j in range(i + 1, m):
            total -= (n[i] + n[j]) * rows[i][j]
    for i in range(m):
        total -= n[i] * slk[i]
    if total.denominator != 1:
        raise NonIntegerChi(f"chi = {total} is not an integer")
    return int(total)


def boundary_slope(i: int, multiplicities: Sequence[int], lk) -> tuple[int, int]:
    """(meridian, longitude) coordinates of the surface along component i.

    The surface winds n_i times longitudinally and
    -sum_{j != i} n_j Lk(gamma_i, gamma_j) times meridionally.
    """
    n = [int(x) for x in multiplicities]
    m = len(n)
    if not (0 <= i < m):
        raise IndexError(f"component index {i} out of range for m={m}")
    rows = _int_lk_entries(lk, m)
    meridian = -sum(n[j] * rows[i][j] for j in range(m) if j != i)
    return meridian, n[i]


def boundary_circles(i: int, multiplicities: Sequence[int], lk) -> int:
    """Number of boundary circles of the surface along component i.

    gcd(n_i, sum_{j != i} n_j Lk(gamma_i, gamma_j)), with gcd(a, 0) = |a|.

    Raises
    ------
    ZeroBoundary
        If both arguments vanish (the component is not in the boundary).
    """
    meridian, longitude = boundary_slope(i, multiplicities, lk)
    if meridian == 0 and longitude == 0:
        raise ZeroBoundary(f"component {i} has zero slope: not a boundary component")
    return math.gcd(longitude, meridian)


@dataclass(frozen=True)
class SectionTopology:
    """Topology of a transverse surface, reconstructed from its boundary.

    ``genus`` is present only when the data is consistent with a connected
    surface (``connected_assumed``); chi is valid regardless. For data coming
    from an actual configuration on the 3-sphere, chi plus the total number
    of boundary circles is even.
    """

    chi: int
    genus: int | None
    connected_assumed: bool
    boundary_slopes: tuple[tuple[int, int], ...]
    boundary_circles: tuple[int, ...]
    multiplicities: tuple[int, ...]
    component_names: tuple[str, ...] = ()
    lk: LinkingMatrix | None = None
    slk: tuple[Fraction, ...] | None = None

    @property
    def total_boundary_circles(self) -> int:
        return sum(self.boundary_circles)

    def to_json(self) -> dict:
        from .curve_io import fraction_to_json
        doc: dict = {"chi": self.chi}
        if self.connected_assumed:
            doc["genus"] = self.genus
        doc["connected_assumed"] = self.connected_assumed
        doc["slopes"] = [list(s) for s in self.boundary_slopes]
        doc["circles"] = list(self.boundary_circles)
        doc["multiplicities"] = list(self.multiplicities)
        if self.component_names:
            doc["names"] = list(self.component_names)
        if self.lk is not None:
            doc["lk"] = self.lk.to_json()["lk"]
        if self.slk is not None:
            doc["slk"] = [fraction_to_json(s) for s in self.slk]
        return doc


def genus(multiplicities: Sequence[int], lk, slk,
          component_names: Sequence[str] = (),
          lk_matrix: LinkingMatrix | None = None) -> SectionTopology:
    """Full surface topology from multiplicities, linking matrix, self-linkings.

    The genus formula presumes a connected surface; when it returns a
    negative or non-integer value the transverse surface cannot be connected
    (for example several parallel discs), so ``genus`` is omitted and only
    chi, slopes, and circle counts are reported.
    """
    n = [int(x) for x in multiplicities]
    m = len(n)
    slk_fr = tuple(_as_fraction(s) for s in slk)
    chi = euler_characteristic(n, lk, slk_fr)
    slopes = tuple(boundary_slope(i, n, lk) for i in range(m))
    circles = tuple(boundary_circles(i, n, lk) for i in range(m))
    g = Fraction(1) - Fraction(chi + sum(circles), 2)
    connected = g.denominator == 1 and g >= 0
    return SectionTopology(
        chi=chi,
        genus=int(g) if connected else None,
        connected_assumed=connected,
        boundary_slopes=slopes,
        boundary_circles=circles,
        multiplicities=tuple(n),
        component_names=tuple(component_names),
        lk=lk_matrix if lk_matrix is not None else (lk if isinstance(lk, LinkingMatrix) else None),
        slk=slk_fr,
    )


def section_topology(link: WeightedLink, framings,
                     eps_int: float = 1e-6,
                     delta_pole: float | None = None) -> SectionTopology:
    """End-to-end topology of a transverse surface bounded by a weighted link.

    Computes the pairwise linking matrix and per-component self-linkings from
    the curves, then evaluates the formulas. ``framings`` is one framing
    applied to all components or a sequence aligned with them. All
    intermediate data is kept on the result for audit.
    """
    from .framing import self_linking
    m = link.m
    if isinstance(framings, (RationalFraming, FramingField)):
        framings = [framings] * m
    framings = list(framings)
    if len(framings) != m:
        raise ValueError("framings must align with link components")
    if delta_pole is None:
        lk = linking_matrix(link, eps_int=eps_int)
    else:
        lk = linking_matrix(link, eps_int=eps_int, delta_pole=delta_pole)
    slk = []
    for k, (curve, framing) in enumerate(zip(link.components, framings)):
        try:
            slk.append(self_linking(curve, framing))
        except Exception as exc:
            name = link.names()[k]
            raise type(exc)(f"component {name}: {exc}") from exc
    return genus(link.multiplicities, lk, slk,
                 component_names=link.names(), lk_matrix=lk)
