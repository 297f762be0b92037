"""Exception hierarchy.

All domain errors derive from :class:`BirkhoffError`; the CLI maps them to
exit status 2. Input/usage problems (bad files, bad flags) are
:class:`InputError` and map to exit status 1.
"""


class BirkhoffError(Exception):
    """Base class for domain errors."""


class InputError(Exception):
    """Malformed input file or configuration (CLI exit status 1)."""


# -- geometry ----------------------------------------------------------------

class TooFewVertices(BirkhoffError):
    """A closed polygonal curve needs at least 3 vertices."""


class InvalidCurve(BirkhoffError):
    """Curve violates a structural invariant (tiny edge, hairpin, norm)."""


class PoleTooClose(BirkhoffError):
    """Stereographic pole within the exclusion radius of a curve vertex."""


class NoValidPole(BirkhoffError):
    """Every candidate pole is too close to some vertex."""


# -- linking -----------------------------------------------------------------

class CurvesTooClose(BirkhoffError):
    """Curve pair separation below the disjointness tolerance."""


class NonIntegerResult(BirkhoffError):
    """Gauss sum did not settle on an integer after refinement."""


class DegenerateProjection(BirkhoffError):
    """Planar projection direction not generic for crossing counting."""


# -- framing -----------------------------------------------------------------

class DegenerateFraming(BirkhoffError):
    """Framing vector parallel to the curve tangent (or vanishing)."""


class EpsilonTooLarge(BirkhoffError):
    """Push-off offset exceeds the curve's reach proxy."""


class UnstableSelfLinking(BirkhoffError):
    """Self-linking changed when the push-off offset was halved."""


# -- flows -------------------------------------------------------------------

class StepCapExceeded(BirkhoffError):
    """Requested integration exceeds the configured step budget."""


class NotPeriodic(BirkhoffError):
    """No return to the start point within the allowed flow time."""


class MissingJacobian(BirkhoffError):
    """Operation needs the field's differential, which is not available."""


class MissingTransverseField(BirkhoffError):
    """Operation needs the bundled transverse field, which is absent."""


# -- sections ----------------------------------------------------------------

class NonIntegerChi(BirkhoffError):
    """Rational inputs produced a non-integer Euler characteristic."""


class ZeroBoundary(BirkhoffError):
    """Component has zero longitude and zero meridian: not in the boundary."""


# -- asymptotics -------------------------------------------------------------

class TooManyRejections(BirkhoffError):
    """Over half of the sampled orbit pairs violated the separation bound."""


class FramingEquationViolated(BirkhoffError):
    """The three framing invariants are mutually inconsistent."""
