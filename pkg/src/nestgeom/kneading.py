"""Kneading sequences of the critical value and their signed order.

The itinerary of the critical value against the two monotone laps gives the
classical symbolic invariant; it is totally ordered by the signed
lexicographic order (the orientation-reversing left lap flips comparisons)
and varies monotonically with the family parameter.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mpf

from .errors import PrecisionExhausted
from .orbits import _INF, OrbitCache
from .precision import safe_prec, workprec

L, R, C = "L", "R", "C"
_LAP_SIGN = {L: -1, R: 1}
_RANK = {L: 0, C: 1, R: 2}


@dataclass(frozen=True)
class KneadingSequence:
    """Itinerary of the critical value; C, if present, terminates it."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        for i, s in enumerate(self.symbols):
            if s not in (L, R, C):
                raise ValueError(f"bad kneading symbol {s!r}")
            if s == C and i != len(self.symbols) - 1:
                raise ValueError("C may appear only as the final symbol")

    def __len__(self):
        return len(self.symbols)

    def __str__(self):
        return "".join(self.symbols)

    @classmethod
    def from_text(cls, text: str) -> "KneadingSequence":
        return cls(tuple(text.replace(" ", "").upper()))


def kneading_sequence(cache: OrbitCache, length: int,
                      guard_bits: int | None = None) -> KneadingSequence:
    """First ``length`` symbols of the critical value's itinerary.

    Symbol k is the certified side of f^k(critical value) = f^(k+1)(0)
    relative to 0.  An exact dyadic zero emits C and stops; with
    ``guard_bits`` set, any point within 2^-guard_bits of 0 is also treated
    as a critical hit (useful at numerically solved superstable parameters).
    Unresolvable near-zero points escalate and may raise PrecisionExhausted.
    """
    if length < 1:
        raise ValueError("length must be at least 1")
    guard = mpf(2) ** (-guard_bits) if guard_bits else None
    symbols: list[str] = []
    for k in range(length):
        x, err = cache.point(k + 1, err_goal=_INF)
        if x == 0 and err == 0:
            symbols.append(C)
            break
        with workprec(safe_prec(x, err)):
            near_hit = guard is not None and abs(x) + err < guard
            unresolved = abs(x) <= 2 * err
        if near_hit:
            symbols.append(C)
            break
        while unresolved:
            cache.escalate()
            x, err = cache.point(k + 1, err_goal=_INF)
            with workprec(safe_prec(x, err)):
                unresolved = abs(x) <= 2 * err
        symbols.append(L if x < 0 else R)
    return KneadingSequence(tuple(symbols))


def compare(k1: KneadingSequence, k2: KneadingSequence) -> int:
    """Signed lexicographic comparison: -1, 0 or +1.

    Symbols rank L < C < R at spatial positions; each traversed L flips the
    orientation of later comparisons.  Sequences equal through the shorter
    length compare equal (decidable only as far as computed).
    """
    twist = 1
    for s1, s2 in zip(k1.symbols, k2.symbols):
        if s1 != s2:
            raw = -1 if _RANK[s1] < _RANK[s2] else 1
            return raw * twist
        if s1 == C:
            return 0
        twist *= _LAP_SIGN[s1]
    return 0


def has_prefix(seq: KneadingSequence, prefix: KneadingSequence) -> bool:
    """True when ``seq`` realizes every symbol of ``prefix``."""
    if len(seq) < len(prefix):
        return False
    return seq.symbols[: len(prefix)] == prefix.symbols
