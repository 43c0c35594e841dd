"""Precision plumbing: binary working precisions and exact dyadic scalars.

Scalars throughout the engine are mpmath floats.  An mpf is an exact dyadic
rational; rounding happens only while an operation runs under an explicit
binary precision (``workprec``).  Whenever values produced at two different
precisions meet, the computation runs at the larger of the two.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf

MIN_BITS = 64
DEFAULT_BITS = 128
DEFAULT_MAX_BITS = 4096

# Exact dyadic value; alias kept so signatures read as the domain intends.
BigScalar = mpf


@dataclass(frozen=True, order=True)
class Precision:
    """Binary precision (bits of mantissa) for scalar arithmetic."""

    bits: int

    def __post_init__(self):
        if not isinstance(self.bits, int) or self.bits < MIN_BITS:
            raise ValueError(f"precision must be an integer >= {MIN_BITS} bits, got {self.bits!r}")

    def doubled(self) -> "Precision":
        return Precision(2 * self.bits)


def workprec(bits: int):
    """Context manager running mpmath arithmetic at ``bits`` binary digits."""
    return mpmath.workprec(bits)


def combine(p: Precision, q: Precision) -> Precision:
    """Precision governing arithmetic between values carried at p and q."""
    return p if p.bits >= q.bits else q


def ulp_tol(bits: int, slack: int) -> mpf:
    """The tolerance 2^-(bits - slack); exact at any working precision."""
    return mpf(2) ** (slack - bits)


def scalar_bits(x: mpf) -> int:
    """Mantissa width of an mpf (0 for zero and specials)."""
    try:
        return int(x._mpf_[3])
    except (AttributeError, TypeError):
        return 0


def safe_prec(*vals: mpf) -> int:
    """A working precision that keeps arithmetic on these exact dyadics
    relatively accurate.  mpmath rounds every operation, including unary
    negation, to the active precision, so any expression evaluated outside
    a workprec block silently truncates to the 53-bit default."""
    width = max((scalar_bits(v) for v in vals), default=0)
    return max(MIN_BITS, width + 64)


def parse_decimal(text: str, bits: int) -> mpf:
    """Parse a decimal string, correctly rounded to ``bits`` bits."""
    from .errors import ParseError

    if not isinstance(text, str) or not text.strip():
        raise ParseError(f"empty or non-string decimal input: {text!r}")
    try:
        with workprec(bits):
            return mpf(text.strip())
    except (ValueError, TypeError) as exc:
        raise ParseError(f"cannot parse decimal string {text!r}") from exc


def round_to(x: mpf, bits: int) -> mpf:
    """Correctly rounded copy of x at ``bits`` bits."""
    with workprec(bits):
        return +x


def to_decimal(x: mpf) -> str:
    """Exact decimal representation of a finite dyadic scalar.

    The returned string parses back (``from_decimal``) to the identical mpf,
    so serialization round-trips bit for bit.
    """
    import sys

    if not mpmath.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    sign, man, exp, _ = x._mpf_
    man = int(man)
    exp = int(exp)
    if man == 0:
        return "0"
    if hasattr(sys, "set_int_max_str_digits"):
        needed = abs(exp) + man.bit_length() + 16
        if needed > sys.get_int_max_str_digits():
            sys.set_int_max_str_digits(needed)
    prefix = "-" if sign else ""
    if exp >= 0:
        return prefix + str(man << exp)
    k = -exp
    digits = str(man * 5**k)
    if len(digits) <= k:
        digits = "0" * (k - len(digits) + 1) + digits
    whole, frac = digits[:-k], digits[-k:]
    frac = frac.rstrip("0")
    return prefix + (whole + "." + frac if frac else whole)


def from_decimal(text: str) -> mpf:
    """Parse a decimal string that denotes an exact dyadic value."""
    fr = Fraction(text)
    num, den = fr.numerator, fr.denominator
    if den & (den - 1):
        raise ValueError(f"decimal string {text!r} is not a dyadic rational")
    shift = den.bit_length() - 1
    with workprec(max(abs(num).bit_length(), 1) + 16):
        return mpf(num) / (mpf(2) ** shift)
