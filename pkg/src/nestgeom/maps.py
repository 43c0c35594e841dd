"""The normalized even quadratic family and real intervals.

The family is f_a(x) = 1 - a + a*x^2 on [-1, 1], so f(1) = 1 exactly, the
critical point sits at 0 with critical value 1 - a, and the fixed point
alpha = (1 - a)/a in (-1, 0) is repelling precisely when a > 3/2.  The
Schwarzian derivative is -3/(2 x^2), negative away from the critical point.
Closed-form monotone-branch inverses make high-precision pullbacks cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mpf

from .errors import DomainError, NoPreimage, ParameterOutOfRange, SingularAtCritical
from .precision import Precision, parse_decimal, safe_prec, ulp_tol, workprec

Side = str  # "left" | "right"
LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class RInterval:
    """Closed real interval [lo, hi] with exact dyadic endpoints.

    Comparisons between mpf values are exact; arithmetic combining the
    endpoints runs at a precision wide enough for their mantissas, so the
    methods stay accurate regardless of the ambient mpmath precision.
    """

    lo: mpf
    hi: mpf

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise ValueError(f"degenerate interval [{self.lo}, {self.hi}]")

    @classmethod
    def symmetric(cls, half_width: mpf) -> "RInterval":
        with workprec(safe_prec(half_width)):
            return cls(-half_width, half_width)

    def length(self) -> mpf:
        with workprec(safe_prec(self.lo, self.hi)):
            return self.hi - self.lo

    def midpoint(self) -> mpf:
        with workprec(safe_prec(self.lo, self.hi)):
            return (self.lo + self.hi) / 2

    def contains(self, x: mpf) -> bool:
        return self.lo <= x <= self.hi

    def strictly_inside(self, other: "RInterval") -> bool:
        """True when self is contained in the interior of ``other``."""
        return other.lo < self.lo and self.hi < other.hi

    def boundary_distance(self, x: mpf) -> mpf:
        """Distance from x to the nearer endpoint (signed: >0 inside)."""
        with workprec(safe_prec(self.lo, self.hi, x)):
            d_lo = x - self.lo
            d_hi = self.hi - x
            return d_lo if d_lo < d_hi else d_hi

    def asymmetry(self) -> mpf:
        """|lo + hi|; zero for an exactly 0-symmetric interval."""
        with workprec(safe_prec(self.lo, self.hi)):
            return abs(self.lo + self.hi)

    def overlaps(self, other: "RInterval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi


@dataclass(frozen=True)
class UnimodalMap:
    """One member of the normalized quadratic family, at a fixed parameter.

    The parameter is the exact dyadic value obtained by rounding the decimal
    input at construction precision; re-evaluations at any higher working
    precision use that same dyadic number, so the map itself never drifts.
    """

    a: mpf
    a_text: str
    prec: Precision

    def eval(self, x: mpf, order: int = 0, bits: int | None = None) -> mpf:
        """f(x), f'(x) = 2ax or f''(x) = 2a at the working precision."""
        bits = bits or self.prec.bits
        if abs(x) > 1 + ulp_tol(bits, 8):
            raise DomainError(f"|x| = {mpmath.nstr(abs(x), 8)} exceeds 1 beyond slack")
        with workprec(bits):
            if order == 0:
                return 1 - self.a + self.a * x * x
            if order == 1:
                return 2 * self.a * x
            if order == 2:
                return 2 * self.a
        raise ValueError(f"derivative order must be 0, 1 or 2, got {order}")

    def __call__(self, x: mpf, bits: int | None = None) -> mpf:
        return self.eval(x, 0, bits)

    def critical_value(self, bits: int | None = None) -> mpf:
        with workprec(bits or self.prec.bits):
            return 1 - self.a

    def alpha_fixed_point(self, bits: int | None = None) -> mpf:
        """The orientation-reversing fixed point (1 - a)/a in (-1, 0)."""
        with workprec(bits or self.prec.bits):
            return (1 - self.a) / self.a

    def base_interval(self, bits: int | None = None) -> RInterval:
        """[alpha, -alpha], the 0-symmetric interval bounded by the fixed point."""
        alpha = self.alpha_fixed_point(bits)
        with workprec(safe_prec(alpha)):
            return RInterval(alpha, -alpha)

    def branch_inverse(self, y: mpf, side: Side, bits: int | None = None) -> mpf:
        """Preimage of y on the requested monotone lap, x = +-sqrt((y-1+a)/a).

        Radicands within one rounding slack below zero clamp to the critical
        point; anything lower has no preimage.
        """
        bits = bits or self.prec.bits
        slack = ulp_tol(bits, 8)
        with workprec(bits):
            crit = 1 - self.a
            if y < crit - slack * self.a:
                raise NoPreimage(f"y = {mpmath.nstr(y, 8)} below critical value {mpmath.nstr(crit, 8)}")
            if y > 1 + slack:
                raise DomainError(f"y = {mpmath.nstr(y, 8)} above the fixed endpoint value 1")
            rad = (y - crit) / self.a
            if rad < 0:
                rad = mpf(0)
            if rad > 1:
                rad = mpf(1)
            root = mpmath.sqrt(rad)
            return root if side == RIGHT else -root

    def schwarzian(self, x: mpf, bits: int | None = None) -> mpf:
        """Sf(x) = -3/(2 x^2); exact for this family, singular at 0."""
        bits = bits or self.prec.bits
        if abs(x) < mpf(2) ** (-(bits // 2)):
            raise SingularAtCritical(f"x = {mpmath.nstr(x, 8)} too close to the critical point")
        with workprec(bits):
            return mpf(-3) / (2 * x * x)


def make_map(a_text: str, prec: Precision | int = Precision(128)) -> UnimodalMap:
    """Build a family member from a decimal parameter string.

    The parameter must lie in (3/2, 2] so the fixed point is repelling.
    """
    if isinstance(prec, int):
        prec = Precision(prec)
    a = parse_decimal(a_text, prec.bits)
    if not (mpf(3) / 2 < a <= 2):
        raise ParameterOutOfRange(f"parameter {a_text} outside (3/2, 2]")
    return UnimodalMap(a=a, a_text=a_text.strip(), prec=prec)


def make_map_from_value(a: mpf, prec: Precision | int = Precision(128),
                        a_text: str | None = None) -> UnimodalMap:
    """Build a family member directly from an exact dyadic parameter."""
    if isinstance(prec, int):
        prec = Precision(prec)
    if not (mpf(3) / 2 < a <= 2):
        raise ParameterOutOfRange(f"parameter {mpmath.nstr(a, 12)} outside (3/2, 2]")
    return UnimodalMap(a=a, a_text=a_text or mpmath.nstr(a, 30), prec=prec)
