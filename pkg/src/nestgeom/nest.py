"""Principal-nest construction: nested 0-symmetric intervals and return data.

Level 0 is the interval between the repelling fixed point and its mirror.
Each deeper level pulls the previous one back along the critical orbit's
first landing.  A level's ``central`` flag records whether the landing point
falls back inside the new level's own interval; runs of central levels are
cascades, and endless trapping is flagged as renormalizability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
from mpmath import mpf

from .errors import PrecisionExhausted
from .maps import RInterval, UnimodalMap
from .orbits import (
    AMBIGUOUS,
    INSIDE,
    NONRECURRENT,
    OrbitCache,
    OUTSIDE,
    first_landing_time,
    pullback_component,
)
from .precision import DEFAULT_MAX_BITS, Precision, safe_prec, workprec

TERM_NONRECURRENT = "nonrecurrent"
TERM_RENORMALIZABLE = "renormalizable"
TERM_PRECISION = "precision_exhausted"

CENTRAL = "central"
NONCENTRAL = "noncentral"

DEFAULT_MAX_LEVELS = 16
DEFAULT_ORBIT_CAP = 10**6
DEFAULT_RENORM_HORIZON = 64


@dataclass(frozen=True)
class NestLevel:
    """One level of the principal nest.

    ``r`` is the first landing time of the critical point in the previous
    level's interval (0 at the base level).  ``central`` records whether
    that landing falls inside this level's own interval.
    """

    index: int
    interval: RInterval
    r: int
    central: bool | None
    terminated_by: str | None = None


@dataclass
class Nest:
    """A built principal nest; immutable once construction returns."""

    fmap: UnimodalMap
    alpha: mpf
    prec: Precision
    levels: list[NestLevel] = field(default_factory=list)
    termination: str | None = None
    cache: OrbitCache | None = None

    @property
    def depth(self) -> int:
        """Index of the deepest built level."""
        return len(self.levels) - 1

    def interval(self, n: int) -> RInterval:
        return self.levels[n].interval

    def return_time(self, n: int) -> int:
        return self.levels[n].r

    def central_flags(self) -> list[bool | None]:
        return [lv.central for lv in self.levels]


def _required_bits(prec: Precision, interval: RInterval) -> int:
    """Working-precision floor resolving pullbacks of ``interval``."""
    scale = -mpmath.log(interval.length(), 2)
    return prec.bits + max(0, int(math.ceil(float(scale)))) + 64


def _trapped_in_cascade(cache: OrbitCache, level: NestLevel, horizon: int) -> bool:
    """True when the return-map orbit of 0 stays in the level's interval
    for ``horizon`` return iterates (the operational renormalizability test)."""
    r = level.r
    for t in range(1, horizon + 1):
        if cache.locate(t * r, level.interval) == OUTSIDE:
            return False
    return True


def build_nest(fmap: UnimodalMap, max_levels: int = DEFAULT_MAX_LEVELS,
               orbit_cap: int = DEFAULT_ORBIT_CAP, prec: Precision | None = None,
               max_bits: int = DEFAULT_MAX_BITS,
               renorm_horizon: int | None = DEFAULT_RENORM_HORIZON,
               level_hook=None) -> Nest:
    """Construct the principal nest down to ``max_levels`` or termination.

    Termination is recorded, never raised: a non-recurrent critical orbit,
    an apparent renormalization (orbit of the return map trapped for
    ``renorm_horizon`` iterates; None disables the test), or precision
    exhaustion at the configured ceiling.  ``level_hook(nest, level)`` runs
    after each level; returning False stops construction early.
    """
    if max_levels < 1:
        raise ValueError("max_levels must be at least 1")
    prec = prec or fmap.prec
    cache = OrbitCache(fmap, prec, max_bits=max_bits)
    alpha = fmap.alpha_fixed_point(bits=2 * prec.bits)
    with workprec(safe_prec(alpha)):
        base = RInterval(alpha, -alpha)
    levels = [NestLevel(0, base, 0, None)]
    nest = Nest(fmap=fmap, alpha=alpha, prec=prec, levels=levels, cache=cache)

    for n in range(1, max_levels + 1):
        prev = levels[-1].interval
        cache.ensure_bits(_required_bits(prec, prev))
        landing = first_landing_time(cache, prev, orbit_cap)
        if landing.kind == NONRECURRENT:
            nest.termination = TERM_NONRECURRENT
            break
        if landing.kind == AMBIGUOUS:
            nest.termination = TERM_PRECISION
            break
        r = landing.time
        try:
            result = pullback_component(fmap, r, prev, cache)
            level_iv = result.interval
        except PrecisionExhausted:
            nest.termination = TERM_PRECISION
            break
        with workprec(safe_prec(level_iv.lo, prev.lo)):
            ratio = level_iv.length() / prev.length()
        if not level_iv.strictly_inside(prev) or ratio > 1 - mpf(2) ** -64:
            # degenerate pullback (the level reproduces its parent up to
            # rounding): the return map traps its own domain, the structural
            # signature of a renormalizable restriction
            nest.termination = TERM_RENORMALIZABLE
            break
        try:
            side = cache.locate(r, level_iv)
        except PrecisionExhausted:
            nest.termination = TERM_PRECISION
            break
        central = side == INSIDE
        level = NestLevel(n, level_iv, r, central)
        levels.append(level)
        if level_hook is not None and not level_hook(nest, level):
            break
        if central and renorm_horizon and levels[n - 1].central is not True:
            # first central level of a cascade: probe for endless trapping
            try:
                if _trapped_in_cascade(cache, level, renorm_horizon):
                    nest.termination = TERM_RENORMALIZABLE
                    break
            except PrecisionExhausted:
                nest.termination = TERM_PRECISION
                break

    if nest.termination is not None and levels:
        last = levels[-1]
        levels[-1] = NestLevel(last.index, last.interval, last.r, last.central,
                               terminated_by=nest.termination)
    return nest


def classify_level(nest: Nest, n: int) -> str:
    """Central/non-central classification of level ``n`` (n >= 1)."""
    if n < 1 or n > nest.depth:
        raise ValueError(f"level {n} not built (depth {nest.depth})")
    flag = nest.levels[n].central
    if flag is None:
        raise ValueError(f"level {n} was never classified")
    return CENTRAL if flag else NONCENTRAL


def scaling_factors(nest: Nest) -> list[mpf]:
    """Ratios |I^n| / |I^(n-1)| for every built pair of levels."""
    if nest.depth < 1:
        return []
    out = []
    with workprec(2 * nest.prec.bits):
        for n in range(1, nest.depth + 1):
            out.append(nest.interval(n).length() / nest.interval(n - 1).length())
    return out


def noncentral_levels(nest: Nest) -> list[int]:
    """Indices of the non-central levels, in increasing order."""
    return [lv.index for lv in nest.levels[1:] if lv.central is False]


def central_runs(nest: Nest) -> list[tuple[int, int]]:
    """Maximal runs of consecutive central levels as (start, length)."""
    runs = []
    start = None
    for lv in nest.levels[1:]:
        if lv.central:
            if start is None:
                start = lv.index
        elif start is not None:
            runs.append((start, lv.index - start))
            start = None
    if start is not None:
        runs.append((start, nest.depth - start + 1))
    return runs
