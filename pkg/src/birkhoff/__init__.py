"""Topology of flow-transverse surfaces in the 3-sphere from boundary data.

The library computes, for a surface transverse to a non-singular flow and
bounded by weighted periodic orbits, its Euler characteristic, genus, and
boundary slopes purely from linking and self-linking numbers of the boundary;
and it estimates the helicity of the built-in volume-preserving fields as an
average asymptotic linking number, relating genus growth along families of
torus-knot orbits to half the helicity.

Curves are closed polygons, either in 3-space or on the unit 3-sphere;
linking numbers are exact integers obtained from the closed-form Gauss
segment-pair sum and independently from signed crossing counts.
"""

from .errors import (BirkhoffError, CurvesTooClose, DegenerateFraming,
                     DegenerateProjection, EpsilonTooLarge,
                     FramingEquationViolated, InputError, InvalidCurve,
                     MissingJacobian, MissingTransverseField, NoValidPole,
                     NonIntegerChi, NonIntegerResult, NotPeriodic,
                     PoleTooClose, StepCapExceeded, TooFewVertices,
                     TooManyRejections, UnstableSelfLinking, ZeroBoundary)
from .geometry import (PolyCurve, WeightedLink, choose_pole, curve_resample,
                       great_circle, min_curve_distance, reach_proxy,
                       renormalize, round_circle, spherical_distance,
                       stereographic_project)
from .curve_io import load_curves, load_curves_with_normals, save_curves
from .linking import (LinkingMatrix, gauss_linking_sum, linking_matrix,
                      linking_number, linking_number_crossings,
                      linking_number_crossings_robust)
from .framing import (FramingField, RationalFraming, ambient_framing,
                      explicit_framing, pushoff, self_linking, unit_normals)
from .flows import (FlowField, OrbitArc, close_arc, hopf_fibers, hopf_field,
                    integrate_orbit, linearized_transport, periodic_orbit,
                    seifert_field, validate_field)
from .sections import (SectionTopology, boundary_circles, boundary_slope,
                       euler_characteristic, genus, section_topology)
from .asymptotics import (ExperimentRow, FramingTriple, HelicityEstimate,
                          asymptotic_genus_experiment, estimate_helicity,
                          framing_triple, ruelle_invariant,
                          seifert_fibonacci_family, slk_flow_framing)

__version__ = "0.1.0"

__all__ = [
    "BirkhoffError", "CurvesTooClose", "DegenerateFraming",
    "DegenerateProjection", "EpsilonTooLarge", "FramingEquationViolated",
    "InputError", "InvalidCurve", "MissingJacobian", "MissingTransverseField",
    "NoValidPole", "NonIntegerChi", "NonIntegerResult", "NotPeriodic",
    "PoleTooClose", "StepCapExceeded", "TooFewVertices", "TooManyRejections",
    "UnstableSelfLinking", "ZeroBoundary",
    "PolyCurve", "WeightedLink", "choose_pole", "curve_resample",
    "great_circle", "min_curve_distance", "reach_proxy", "renormalize",
    "round_circle", "spherical_distance", "stereographic_project",
    "load_curves", "load_curves_with_normals", "save_curves",
    "LinkingMatrix", "gauss_linking_sum", "linking_matrix", "linking_number",
    "linking_number_crossings", "linking_number_crossings_robust",
    "FramingField", "RationalFraming", "ambient_framing", "explicit_framing",
    "pushoff", "self_linking", "unit_normals",
    "FlowField", "OrbitArc", "close_arc", "hopf_fibers", "hopf_field",
    "integrate_orbit", "linearized_transport", "periodic_orbit",
    "seifert_field", "validate_field",
    "SectionTopology", "boundary_circles", "boundary_slope",
    "euler_characteristic", "genus", "section_topology",
    "ExperimentRow", "FramingTriple", "HelicityEstimate",
    "asymptotic_genus_experiment", "estimate_helicity", "framing_triple",
    "ruelle_invariant", "seifert_fibonacci_family", "slk_flow_framing",
]
