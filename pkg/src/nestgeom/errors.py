"""Exception hierarchy for the nestgeom engine."""


class NestgeomError(Exception):
    """Base class for all engine errors."""


class ParseError(NestgeomError):
    """Malformed decimal-string input."""


class ParameterOutOfRange(NestgeomError):
    """Family parameter outside the admissible range (3/2, 2]."""


class DomainError(NestgeomError):
    """Point outside the domain of the map beyond rounding slack."""


class NoPreimage(NestgeomError):
    """Requested preimage lies below the critical value."""


class SingularAtCritical(NestgeomError):
    """Schwarzian derivative requested too close to the critical point."""


class PrecisionExhausted(NestgeomError):
    """Precision-doubling verification failed at the configured ceiling."""


class PullbackEscapes(NestgeomError):
    """Base orbit point left the preimage component during a pullback."""


class CapExceeded(NestgeomError):
    """An orbit or itinerary scan exceeded its configured cap."""


class NotInDomain(NestgeomError):
    """Point lies in a gap between landing intervals."""


class NoFixedPoint(NestgeomError):
    """Sign test found no fixed point on the scanned lap."""


class NotRealized(NestgeomError):
    """Parameter search bracket collapsed without matching the target."""

    def __init__(self, message, matched_depth=0):
        super().__init__(message)
        self.matched_depth = matched_depth


class AdmissibilityError(NestgeomError):
    """Search target fails the admissibility checks."""
