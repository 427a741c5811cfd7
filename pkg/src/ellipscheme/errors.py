"""Exception hierarchy shared by all modules."""


class EllipschemeError(Exception):
    """Base class for all domain errors raised by this package."""


class NotSquarefree(EllipschemeError):
    """A polynomial required to be squarefree has a repeated root."""


class SignAmbiguous(EllipschemeError):
    """A polynomial vanished at a sample point of a claimed root-free interval.

    This always signals a caller bug, never a numerical problem.
    """


class BadNewtonPolygon(EllipschemeError):
    """The cubic-in-x coefficient of a bivariate input is zero or non-constant."""


class DegreeOverflow(EllipschemeError):
    """A depressed curve exceeds the degree bounds for its Hirzebruch parameter."""


class NonGeneric(EllipschemeError):
    """A curve failed the genericity check required by the requested analysis."""


class DegenerateEndpoint(EllipschemeError):
    """The cubic at an interval endpoint is not a double root plus a simple root."""


class PerturbationFailed(EllipschemeError):
    """The perturbation search exhausted its halving budget."""


class NotRefinementShaped(EllipschemeError):
    """A refinement history does not reproduce the given triangulation."""


class CertificationFailed(EllipschemeError):
    """The exact convexity check rejected a candidate lifting."""


class UnclassifiableOval(EllipschemeError):
    """An oval surrounds vertices of both signs, or none."""


class NotIsolated(EllipschemeError):
    """A collapse target oval does not surround exactly one vertex."""


class NoStabilization(EllipschemeError):
    """The parameter sweep ran out of halvings before three consecutive agreements."""


class NotAllowed(EllipschemeError):
    """A diagram point is outside the allowed set for the given invariant."""


class NotInFamily(EllipschemeError):
    """A topological type is outside the family under consideration."""


class OutOfRange(EllipschemeError):
    """A construction parameter is outside its valid range."""
