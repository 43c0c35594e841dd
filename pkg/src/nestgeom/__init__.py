"""nestgeom: principal nests, return-map combinatorics and scaling-factor
geometry of real quadratic unimodal maps at arbitrary precision."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    AdmissibilityError,
    CapExceeded,
    DomainError,
    NestgeomError,
    NoFixedPoint,
    NoPreimage,
    NotInDomain,
    NotRealized,
    ParameterOutOfRange,
    ParseError,
    PrecisionExhausted,
    PullbackEscapes,
    SingularAtCritical,
)
from .maps import RInterval, UnimodalMap, make_map  # noqa: F401
from .precision import BigScalar, Precision  # noqa: F401
