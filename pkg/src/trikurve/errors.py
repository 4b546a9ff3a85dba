"""Exception taxonomy shared by all trikurve modules."""


class TrikurveError(Exception):
    """Base class for all library errors."""


class OutOfChart(TrikurveError):
    """Point lies outside the declared coordinate chart of the manifold."""


class Unsupported(TrikurveError):
    """Operation not defined for this manifold kind."""


class SpaceFormDegenerate(TrikurveError):
    """BCV parameters satisfy 4a = b^2, i.e. the space is a space form."""


class CurvatureVanishes(TrikurveError):
    """Curvature hits zero where a Frenet frame is required."""


class TooFewSamples(TrikurveError):
    """Not enough samples for the requested finite-difference order."""


class NotAHelix(TrikurveError):
    """Constant-curvature evaluation requested with kappa0 = 0."""


class NegativeRadicand(TrikurveError):
    """First-integral right-hand side is negative at the initial value."""


class StalledAtDoubleRoot(TrikurveError):
    """kappa' = kappa'' = 0: the curvature is constant, not integrable."""


class DegenerateDenominator(TrikurveError):
    """kappa'' - 2 kappa^3 vanishes; the induced torsion is undefined."""


class NegativeTorsionSquare(TrikurveError):
    """No real torsion exists for this curvature profile."""


class ResidualTooLarge(TrikurveError):
    """A claimed root does not satisfy its defining equation."""


class GeodesicInput(TrikurveError):
    """Operation requires a non-geodesic curve."""


class ConstraintViolated(TrikurveError):
    """Parametrization constants do not satisfy their coupling constraint."""


class NonUnitSpeed(TrikurveError):
    """Emitted samples fail the arc-length parametrization check."""


class BlowUp(TrikurveError):
    """Solution escapes the chart (or to infinity) in finite arc length.

    Carries the truncated escape parameter in ``escape_s`` when known.
    """

    def __init__(self, msg, escape_s=None):
        super().__init__(msg)
        self.escape_s = escape_s


class DegenerateParameter(TrikurveError):
    """Parameter combination makes a closed-form expression divide by zero."""


class TooFewVertices(TrikurveError):
    """Discrete curve has too few vertices for the energy stencils."""


class NonUniform(TrikurveError):
    """Polyline spacing is too non-uniform for the discrete energy."""


class LineSearchFailed(TrikurveError):
    """Backtracking line search underflowed without an energy decrease."""
