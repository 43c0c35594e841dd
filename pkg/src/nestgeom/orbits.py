"""Critical-orbit iteration, first landings, and interval pullbacks.

Orbit values are certified by precision doubling: the cache keeps the orbit
at a working precision w and at 2w, and the observed disagreement between
the two is the error estimate for the (returned) 2w value.  Any decision
that comes too close to call at the current w doubles it, up to a ceiling;
exhausting the ceiling fails loudly instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mpf

from .errors import PrecisionExhausted, PullbackEscapes
from .maps import RInterval, UnimodalMap
from .precision import DEFAULT_MAX_BITS, Precision, safe_prec, ulp_tol, workprec

INSIDE = 1
OUTSIDE = -1

_INF = mpf("inf")
_ONE = mpf(1)

LANDED = "landed"
NONRECURRENT = "nonrecurrent"
AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class LandingResult:
    """Outcome of a first-landing scan."""

    kind: str
    time: int | None = None

    @property
    def landed(self) -> bool:
        return self.kind == LANDED


class _OrbitArray:
    """Forward orbit of 0 at one fixed working precision, append-only."""

    def __init__(self, fmap: UnimodalMap, bits: int):
        self.fmap = fmap
        self.bits = bits
        self.points: list[mpf] = [mpf(0)]
        self.fixed_from: int | None = None  # orbit exactly constant beyond this index

    def value(self, k: int) -> mpf:
        if self.fixed_from is not None and k >= self.fixed_from:
            return self.points[self.fixed_from]
        self._extend(k)
        if self.fixed_from is not None and k >= self.fixed_from:
            return self.points[self.fixed_from]
        return self.points[k]

    def _extend(self, k: int) -> None:
        a = self.fmap.a
        with workprec(self.bits):
            x = self.points[-1]
            while len(self.points) <= k and self.fixed_from is None:
                nxt = 1 - a + a * x * x
                if nxt == x:
                    self.fixed_from = len(self.points) - 1
                    return
                self.points.append(nxt)
                x = nxt


class OrbitCache:
    """Certified critical orbit of one map.

    Single writer; value queries extend and may escalate the working
    precision.  A completed prefix is safe to read concurrently.
    """

    def __init__(self, fmap: UnimodalMap, prec: Precision | None = None,
                 max_bits: int = DEFAULT_MAX_BITS):
        self.fmap = fmap
        self.prec = prec or fmap.prec
        self.max_bits = max(max_bits, self.prec.bits)
        self._lo = _OrbitArray(fmap, self.prec.bits)
        self._hi = _OrbitArray(fmap, 2 * self.prec.bits)

    @property
    def working_bits(self) -> int:
        return self._lo.bits

    @property
    def fixed_from(self) -> int | None:
        lo, hi = self._lo.fixed_from, self._hi.fixed_from
        return lo if lo is not None and lo == hi else None

    def escalate(self) -> None:
        """Double the working precision, reusing the finer array."""
        new_bits = 2 * self._lo.bits
        if new_bits > self.max_bits:
            raise PrecisionExhausted(
                f"needed more than the {self.max_bits}-bit ceiling for map a={self.fmap.a_text}")
        self._lo = self._hi
        self._hi = _OrbitArray(self.fmap, 2 * new_bits)

    def ensure_bits(self, bits: int) -> None:
        while self._lo.bits < min(bits, self.max_bits):
            self.escalate()

    def point(self, k: int, err_goal: mpf | None = None) -> tuple[mpf, mpf]:
        """f^k(0) from the finer array, with observed error bound.

        Escalates until the coarse/fine disagreement is below ``err_goal``
        (default 2^-(prec-8)).
        """
        if k < 0:
            raise ValueError("orbit index must be nonnegative")
        goal = err_goal if err_goal is not None else ulp_tol(self.prec.bits, 8)
        while True:
            with workprec(2 * self._hi.bits):
                err = abs(self._lo.value(k) - self._hi.value(k))
            if err <= goal:
                return self._hi.value(k), err
            self.escalate()

    def value(self, k: int) -> mpf:
        return self.point(k)[0]

    def locate(self, k: int, iv: RInterval) -> int:
        """Certified side of f^k(0) relative to iv (interior counts as inside).

        The decision only demands accuracy proportional to the point's
        distance from the boundary; grazes force precision doubling and at
        the ceiling raise PrecisionExhausted.
        """
        while True:
            x, err = self.point(k, err_goal=_INF)
            with workprec(safe_prec(x, iv.lo, iv.hi)):
                margin = err + iv.length() * ulp_tol(self.working_bits, 16)
                if iv.lo + margin < x < iv.hi - margin:
                    return INSIDE
                if x < iv.lo - margin or x > iv.hi + margin:
                    return OUTSIDE
            self.escalate()


def iterate(cache: OrbitCache, k: int) -> mpf:
    """f^k(0), certified to 2^-(prec-8) by precision doubling."""
    return cache.value(k)


def first_landing_time(cache: OrbitCache, iv: RInterval, cap: int) -> LandingResult:
    """Minimal r in [1, cap] with f^r(0) in the interior of iv.

    Returns NonRecurrent when the orbit provably misses iv through the cap
    (or forever, when it reaches an exact fixed point outside iv), and
    Ambiguous when a boundary graze survives the precision ceiling.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    k = 1
    while k <= cap:
        fixed = cache.fixed_from
        if fixed is not None and k >= fixed:
            try:
                side = cache.locate(fixed, iv)
            except PrecisionExhausted:
                return LandingResult(AMBIGUOUS)
            if side == INSIDE:
                return LandingResult(LANDED, k)
            return LandingResult(NONRECURRENT)
        try:
            side = cache.locate(k, iv)
        except PrecisionExhausted:
            return LandingResult(AMBIGUOUS)
        if side == INSIDE:
            return LandingResult(LANDED, k)
        k += 1
    return LandingResult(NONRECURRENT)


SYM = "sym"
LAP_LEFT = "left"
LAP_RIGHT = "right"


class _NeedsEscalation(Exception):
    """Internal: component too small for the base error at this precision."""


def _preimage_component(fmap: UnimodalMap, target: RInterval, base: mpf,
                        base_err: mpf, bits: int) -> tuple[RInterval, str]:
    """Component of f^-1(target) containing ``base``, with its lap tag."""
    chain, laps = _chain_once(fmap, target, [(base, base_err)], bits)
    return chain[0], laps[0]


def _chain_once(fmap: UnimodalMap, target: RInterval, bases: list[tuple[mpf, mpf]],
                bits: int) -> tuple[list[RInterval], list[str]]:
    """Pull ``target`` back one step per base point, last base first applied.

    One tight arithmetic block: the per-step work is two divisions, one or
    two square roots and the component-selection comparisons.
    """
    laps: list[str] = []
    ends: list[tuple[mpf, mpf]] = [(target.lo, target.hi)]
    with workprec(bits):
        a = fmap.a
        crit = 1 - a
        base_slack = ulp_tol(bits, 32)
        lo, hi = target.lo, target.hi
        for base, err in reversed(bases):
            slack = err + base_slack
            u = (lo - crit) / a
            v = (hi - crit) / a
            if v < 0:
                raise PullbackEscapes("target interval lies below the critical value")
            if v > 1:
                v = _ONE
            sv = mpmath.sqrt(v)
            if u <= 0:
                if 4 * slack > sv:
                    raise _NeedsEscalation
                if abs(base) > sv + slack:
                    raise PullbackEscapes("base point outside the symmetric preimage component")
                lo, hi = -sv, sv
                laps.append(SYM)
            else:
                su = mpmath.sqrt(u)
                if 4 * slack > sv - su:
                    raise _NeedsEscalation
                mag = abs(base)
                if not (su - slack <= mag <= sv + slack):
                    raise PullbackEscapes("base point falls in the gap between preimage components")
                if base >= 0:
                    lo, hi = su, sv
                    laps.append(LAP_RIGHT)
                else:
                    lo, hi = -sv, -su
                    laps.append(LAP_LEFT)
            ends.append((lo, hi))
    chain = [RInterval(e0, e1) for e0, e1 in reversed(ends)]
    laps.reverse()
    return chain, laps


class PullbackResult:
    """A pullback component plus the audit trail of intermediate steps."""

    def __init__(self, interval: RInterval, chain: list[RInterval], laps: list[str]):
        self.interval = interval
        self.chain = chain  # chain[0] = result, chain[-1] = target
        self.laps = laps  # lap of step k (chain[k] inside one lap, or symmetric)


def _certified_pullback(cache: OrbitCache, target: RInterval, get_bases) -> PullbackResult:
    """Run the pullback at w and 2w until the two runs agree.

    Agreement means identical lap decisions and endpoint differences below
    2^-(prec-16) relative to the resulting component.  ``get_bases`` is
    re-invoked after every escalation so base points track the precision.
    """
    fmap = cache.fmap
    rel = ulp_tol(cache.prec.bits, 16)
    while True:
        b = cache.working_bits
        bases = get_bases()
        try:
            chain_lo, laps_lo = _chain_once(fmap, target, bases, b)
            chain_hi, laps_hi = _chain_once(fmap, target, bases, 2 * b)
        except (ValueError, _NeedsEscalation):
            # endpoints collapsed or base error too coarse at this precision
            cache.escalate()
            continue
        if laps_lo == laps_hi:
            out_lo, out_hi = chain_lo[0], chain_hi[0]
            with workprec(safe_prec(out_lo.lo, out_hi.lo, out_lo.hi, out_hi.hi)):
                tol = rel * out_hi.length()
                agreed = (abs(out_lo.lo - out_hi.lo) <= tol
                          and abs(out_lo.hi - out_hi.hi) <= tol)
            if agreed:
                return PullbackResult(out_hi, chain_hi, laps_hi)
        cache.escalate()


def pullback_component(fmap: UnimodalMap, r: int, target: RInterval,
                       cache: OrbitCache) -> PullbackResult:
    """Component of f^-r(target) containing 0, along the critical orbit.

    Backward induction: J_r = target and J_{k-1} is the component of
    f^-1(J_k) containing f^{k-1}(0).  The final step crosses the critical
    point, so the result is exactly 0-symmetric.
    """
    if r < 0:
        raise ValueError("pullback length must be nonnegative")
    if r == 0:
        return PullbackResult(target, [target], [])
    result = _certified_pullback(cache, target,
                                 lambda: [cache.point(k) for k in range(r)])
    if result.laps[0] != SYM:
        raise PullbackEscapes("pullback to the critical point did not cross it")
    return result


def pullback_along_segment(fmap: UnimodalMap, steps: int, target: RInterval,
                           base: mpf, cache: OrbitCache,
                           base_index: int | None = None) -> PullbackResult:
    """Component of f^-steps(target) containing ``base``.

    When ``base_index`` is given the base orbit comes from the cache
    (certified); otherwise the forward orbit of ``base`` is recomputed at the
    current working precision and verified one doubling up.
    """
    if steps < 0:
        raise ValueError("pullback length must be nonnegative")
    if steps == 0:
        return PullbackResult(target, [target], [])
    if base_index is not None:
        return _certified_pullback(
            cache, target,
            lambda: [cache.point(base_index + j) for j in range(steps)])

    def bases_from_point():
        while True:
            b = cache.working_bits
            lo_orbit = _forward_orbit(cache.fmap, base, steps, b)
            hi_orbit = _forward_orbit(cache.fmap, base, steps, 2 * b)
            errs = [abs(x - y) for x, y in zip(lo_orbit, hi_orbit)]
            if max(errs) <= ulp_tol(cache.prec.bits, 8):
                return list(zip(hi_orbit, errs))
            cache.escalate()

    return _certified_pullback(cache, target, bases_from_point)


def _forward_orbit(fmap: UnimodalMap, x0: mpf, steps: int, bits: int) -> list[mpf]:
    out = [x0]
    a = fmap.a
    with workprec(bits):
        x = x0
        for _ in range(steps - 1):
            x = 1 - a + a * x * x
            out.append(x)
    return out
