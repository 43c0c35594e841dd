"""Scaling-factor decay, commensurability and parabolic proximity.

The quantities here put numbers on the geometry of a built nest: how fast
the levels shrink (and whether the log-linear decay fit accepts), how
commensurable the return branches and their gaps are with the level
interval, how much room the branch family leaves to the boundary, and how
close a cascade's central branch is to a map with a neutral fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
from mpmath import mpf

from .errors import NoFixedPoint
from .maps import RInterval
from .nest import Nest, noncentral_levels, scaling_factors
from .precision import safe_prec, ulp_tol, workprec
from .renorm import Branch, LevelMaps

DEFAULT_DELTA = 0.01
DECAY_MIN_POINTS = 4
DECAY_MAX_RESIDUAL = 0.5


@dataclass(frozen=True)
class DecayFit:
    """Least-squares exponential fit lambda_k ~ C * rho^k."""

    C: float
    rho: float
    residual: float
    accepted: bool
    points: int


@dataclass(frozen=True)
class ParabolicProximity:
    """How close a central cascade's return branch is to a neutral map."""

    level: int
    cascade_levels: int
    fixed_point: mpf
    multiplier: mpf
    multiplier_fd: mpf
    low_return: bool


@dataclass
class GeometryReport:
    """Per-nest geometry summary; scalars carried exactly plus as floats."""

    lambdas: list[mpf]
    central_flags: list[bool | None]
    noncentral: list[int]
    noncentral_lambdas: list[mpf]
    commensurability: list[tuple[int, float]]
    extension_margin: list[tuple[int, float]]
    decay: DecayFit | None
    trigger: tuple[int, float] | None
    tower_lambdas: list[mpf] = field(default_factory=list)
    # offset convention: noncentral holds the level indices n with a
    # non-central return; the decay sequence pairs entry k (1-based) with
    # lambda at level n_k + 1.
    indexing: str = "decay uses lambda[n_k + 1] over noncentral levels n_k"


def fit_log_linear(ks: list[float], ys: list[float]) -> tuple[float, float, float]:
    """Plain least squares on (k, log y): returns (intercept, slope, max|dev|)."""
    n = len(ks)
    logs = [math.log(y) for y in ys]
    kbar = sum(ks) / n
    lbar = sum(logs) / n
    den = sum((k - kbar) ** 2 for k in ks)
    if den == 0:
        raise ValueError("degenerate abscissae")
    slope = sum((k - kbar) * (l - lbar) for k, l in zip(ks, logs)) / den
    intercept = lbar - slope * kbar
    residual = max(abs(l - (intercept + slope * k)) for k, l in zip(ks, logs))
    return intercept, slope, residual


def decay_fit(lambdas: list, ks: list[int] | None = None) -> DecayFit | None:
    """Fit lambda_k <= C rho^k through the points (k, log lambda_k).

    Returns None (insufficient data) below four points.  The fit is
    accepted when the worst log-scale deviation is at most 0.5 and rho < 1.
    """
    vals = [float(x) for x in lambdas]
    if len(vals) < DECAY_MIN_POINTS or any(v <= 0 for v in vals):
        return None
    ks = list(ks) if ks is not None else list(range(1, len(vals) + 1))
    intercept, slope, residual = fit_log_linear([float(k) for k in ks], vals)
    rho = math.exp(slope)
    C = math.exp(intercept)
    accepted = residual <= DECAY_MAX_RESIDUAL and rho < 1
    return DecayFit(C=C, rho=rho, residual=residual, accepted=accepted, points=len(vals))


def small_factor_trigger(lambdas: list, delta: float = DEFAULT_DELTA) -> tuple[int, float] | None:
    """Smallest 1-based N with lambda_N < delta, or None."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    for i, lam in enumerate(lambdas, start=1):
        if float(lam) < delta:
            return i, delta
    return None


def _pieces(prev: RInterval, domains: list[RInterval], bits: int) -> list[mpf]:
    """Branch domains and the positive gaps of the level interval."""
    tol = ulp_tol(bits, 16) * prev.length()
    spans = sorted(domains, key=lambda d: d.lo)
    pieces: list[mpf] = []
    with workprec(safe_prec(prev.lo, prev.hi, *(d.lo for d in spans))):
        cursor = prev.lo
        for dom in spans:
            gap = dom.lo - cursor
            if gap > tol:
                pieces.append(gap)
            pieces.append(dom.length())
            cursor = dom.hi if dom.hi > cursor else cursor
        tail = prev.hi - cursor
        if tail > tol:
            pieces.append(tail)
    return pieces


def commensurability(prev: RInterval, branches: list[Branch], bits: int) -> float:
    """max over branch domains and gaps of |T| / |piece| (>= 2 always)."""
    pieces = _pieces(prev, [b.domain for b in branches], bits)
    with workprec(safe_prec(prev.lo, prev.hi)):
        return float(max(prev.length() / p for p in pieces))


def extension_margin(prev: RInterval, branches: list[Branch], bits: int) -> float:
    """Distance from the branch family to the level boundary, relative."""
    with workprec(safe_prec(prev.lo, prev.hi)):
        lo_gap = min(b.domain.lo for b in branches) - prev.lo
        hi_gap = prev.hi - max(b.domain.hi for b in branches)
        margin = lo_gap if lo_gap < hi_gap else hi_gap
        if margin < 0:
            margin = mpf(0)
        return float(margin / prev.length())


def tower_intervals(nest: Nest, resolved: dict[int, LevelMaps] | None = None) -> list[RInterval]:
    """Bases of the renormalization tower: each non-central level contributes
    its interval; a central run contributes the resolved next tower base and
    ends the chain (deeper post-cascade tower levels are out of scope)."""
    resolved = resolved or {}
    chain = [nest.interval(0)]
    n = 1
    while n <= nest.depth:
        flag = nest.levels[n].central
        if flag is False:
            chain.append(nest.interval(n))
            n += 1
            continue
        if flag and n in resolved and resolved[n].escaped:
            chain.append(resolved[n].t_next)
        break
    return chain


def geometry_report(nest: Nest, branches_by_level: dict[int, list[Branch]],
                    delta: float = DEFAULT_DELTA,
                    resolved: dict[int, LevelMaps] | None = None) -> GeometryReport:
    """Assemble the full geometry summary of a built nest."""
    lams = scaling_factors(nest)
    flags = nest.central_flags()
    nc = noncentral_levels(nest)
    nc_lams = [lams[n_k] for n_k in nc if n_k < len(lams)]

    commens = []
    margins = []
    bits = nest.prec.bits
    for n, branches in sorted(branches_by_level.items()):
        prev = nest.interval(n - 1)
        commens.append((n, commensurability(prev, branches, bits)))
        margins.append((n, extension_margin(prev, branches, bits)))

    chain = tower_intervals(nest, resolved)
    tower_lams = []
    with workprec(2 * nest.prec.bits):
        for a, b in zip(chain, chain[1:]):
            tower_lams.append(b.length() / a.length())

    return GeometryReport(
        lambdas=lams,
        central_flags=flags,
        noncentral=nc,
        noncentral_lambdas=nc_lams,
        commensurability=commens,
        extension_margin=margins,
        decay=decay_fit(nc_lams),
        trigger=small_factor_trigger(lams, delta),
        tower_lambdas=tower_lams,
    )


def _certified_sign(nest: Nest, k: int) -> int:
    """Sign of orbit point k, escalating until it resolves."""
    cache = nest.cache
    while True:
        x, err = cache.point(k)
        with workprec(safe_prec(x, err)):
            if abs(x) > 2 * err:
                return 1 if x > 0 else -1
        cache.escalate()


def parabolic_proximity(nest: Nest, n: int, samples: int = 64) -> ParabolicProximity:
    """Fixed point and multiplier of the central branch at a cascade level.

    The branch is even, so one lap increases; the fixed points of interest
    (the near-neutral pair) sit on that lap.  The first diagonal crossing
    scanning from the critical point is located by bisection; its derivative
    comes from the chain rule and is cross-checked by a central difference.
    ``low_return`` records whether the branch image omits the critical point.
    """
    if n < 1 or n > nest.depth or nest.levels[n].central is not True:
        raise ValueError(f"level {n} is not a central level")
    fmap = nest.fmap
    cache = nest.cache
    r = nest.return_time(n)
    iv = nest.interval(n)
    bits = cache.working_bits
    p = nest.prec.bits

    v_sign = _certified_sign(nest, r)
    v = cache.value(r)
    with workprec(bits):
        e = _iterate(fmap, iv.hi, r, bits)
        valley = e > v
    low_return = (v_sign > 0) if valley else (v_sign < 0)
    lap_hi = iv.hi if valley else iv.lo  # increasing lap runs from 0 to lap_hi

    def phi(x: mpf) -> mpf:
        with workprec(bits):
            return _iterate(fmap, x, r, bits) - x

    with workprec(bits):
        grid = [lap_hi * mpf(i) / samples for i in range(1, samples + 1)]
        extra = []
        t = 1
        while t * r <= 64 * r:
            pt = cache.value(t * r)
            if not iv.contains(pt):
                break
            extra.append(pt)
            t += 1
        pts = sorted(set(grid + extra), key=lambda q: abs(q))
        bracket = None
        prev_x, prev_s = mpf(0), phi(mpf(0))
        for x in pts:
            s = phi(x)
            if (s < 0) != (prev_s < 0):
                bracket = (prev_x, x)
                break
            prev_x, prev_s = x, s
        if bracket is None:
            raise NoFixedPoint(f"no diagonal crossing on the lap at level {n}")
        lo, hi = bracket
        target = ulp_tol(p, 0) ** mpf("0.5") * abs(lap_hi)
        while abs(hi - lo) > target:
            mid = (lo + hi) / 2
            if (phi(mid) < 0) == (phi(lo) < 0):
                lo = mid
            else:
                hi = mid
        x_star = (lo + hi) / 2

        mult = mpf(1)
        z = x_star
        for _ in range(r):
            mult *= 2 * fmap.a * z
            z = 1 - fmap.a + fmap.a * z * z

        h = ulp_tol(p, 0) ** mpf("0.5")
        g_plus = _iterate(fmap, x_star + h, r, bits)
        g_minus = _iterate(fmap, x_star - h, r, bits)
        mult_fd = (g_plus - g_minus) / (2 * h)

    return ParabolicProximity(level=n, cascade_levels=_run_length(nest, n),
                              fixed_point=x_star, multiplier=mult,
                              multiplier_fd=mult_fd, low_return=low_return)


def _run_length(nest: Nest, n: int) -> int:
    count = 0
    for lv in nest.levels[n:]:
        if lv.central:
            count += 1
        else:
            break
    return count


def _iterate(fmap, x: mpf, steps: int, bits: int) -> mpf:
    a = fmap.a
    with workprec(bits):
        for _ in range(steps):
            x = 1 - a + a * x * x
    return x
