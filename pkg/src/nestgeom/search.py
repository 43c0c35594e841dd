"""Parameter search: realizing target combinatorics inside the family.

Finite combinatorial targets are realized on parameter windows, nested as
the target deepens, and ordered along the parameter axis the same way the
kneading order is.  The search descends through those windows on a
deterministic grid, then pins the deepest window's left edge by bisection
to the requested number of digits.  A returned parameter always passes an
independent re-verification from its printed decimal form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
from mpmath import mpf

from .errors import AdmissibilityError, NestgeomError, NotRealized
from .kneading import KneadingSequence, compare, has_prefix, kneading_sequence
from .maps import UnimodalMap, make_map, make_map_from_value
from .nest import Nest, build_nest, central_runs
from .orbits import OrbitCache
from .precision import Precision, workprec
from .renorm import (
    CombinatoricsRecord,
    cascade_structure,
    combinatorics,
    essentially_equivalent,
    return_map_domains,
)

FIBONACCI = "fibonacci"
KNEADING = "kneading"
RECORDS = "records"
NEAR_PARABOLIC = "near-parabolic"
INTERMITTENT = "intermittent-cascade"

_PROBE_ORBIT_CAP = 200_000
_PROBE_MAX_BITS = 1 << 15


@dataclass(frozen=True)
class SearchTarget:
    """What to realize: a named combinatorics, a kneading prefix, or
    explicit per-level records."""

    kind: str
    depth: int = 8
    prefix: KneadingSequence | None = None
    records: tuple[CombinatoricsRecord, ...] | None = None
    multiplier: str = "0.9"  # near-parabolic: target central fixed-point multiplier
    cascade_length: tuple[int, int] = (12, 48)  # intermittent: admissible run lengths
    period: int = 3

    @classmethod
    def named(cls, name: str, depth: int = 8) -> "SearchTarget":
        name = name.strip().lower()
        if name == FIBONACCI:
            return cls(kind=FIBONACCI, depth=depth)
        if name == NEAR_PARABOLIC:
            return cls(kind=NEAR_PARABOLIC, depth=depth)
        if name == INTERMITTENT:
            return cls(kind=INTERMITTENT, depth=depth)
        if name.startswith("kneading:"):
            return cls(kind=KNEADING,
                       prefix=KneadingSequence.from_text(name.split(":", 1)[1]))
        raise AdmissibilityError(f"unknown named target {name!r}")

    @classmethod
    def from_records(cls, records: list[CombinatoricsRecord]) -> "SearchTarget":
        if not records:
            raise AdmissibilityError("empty record list")
        levels = [r.level for r in records]
        if levels != sorted(levels) or len(set(levels)) != len(levels):
            raise AdmissibilityError("record levels must be strictly increasing")
        for rec in records:
            labels = set(rec.ordering)
            if sorted(rec.ordering) != sorted(set(rec.ordering)):
                raise AdmissibilityError(f"duplicate labels at level {rec.level}")
            for br, labs in rec.itineraries:
                if not labs:
                    raise AdmissibilityError(
                        f"branch {br} at level {rec.level} has an empty itinerary (never returns)")
                if any(lab not in labels for lab in labs):
                    raise AdmissibilityError(f"itinerary of branch {br} uses unknown labels")
        return cls(kind=RECORDS, records=tuple(records), depth=records[-1].level)


@dataclass
class SearchResult:
    a_text: str
    a: mpf
    bracket: tuple[mpf, mpf]
    matched_depth: int
    probes: int
    target: SearchTarget
    transcript: list[str] = field(default_factory=list)


def _probe_prec(digits: int) -> int:
    return max(192, 64 + int(digits * 3.5))


def _fibonacci_depth(fmap: UnimodalMap, depth: int) -> int:
    """Consecutive levels from 1 with the minimal-recurrence signature:
    non-central, landing times 3, 5 then the two-term recursion.

    Each level's landing time is forced by the recursion, so the scan is
    capped right there; mismatching parameters fail in a few iterates.
    """
    from .maps import RInterval
    from .nest import _required_bits
    from .orbits import INSIDE, first_landing_time, pullback_component

    cache = OrbitCache(fmap, max_bits=_PROBE_MAX_BITS)
    prev = fmap.base_interval(bits=2 * fmap.prec.bits)
    r1 = r2 = 0
    matched = 0
    try:
        for n in range(1, depth + 1):
            expected = 3 if n == 1 else 5 if n == 2 else r1 + r2
            cache.ensure_bits(_required_bits(fmap.prec, prev))
            landing = first_landing_time(cache, prev, expected)
            if not landing.landed or landing.time != expected:
                break
            cur = pullback_component(fmap, expected, prev, cache).interval
            if cache.locate(expected, cur) == INSIDE:
                break  # central: not minimal recurrence
            matched = n
            r1, r2 = expected, r1
            prev = cur
    except NestgeomError:
        pass
    return matched


def _fib_side(n: int) -> int:
    """Canonical side of the n-th landing point: the sides repeat with
    period four, two positive then two negative."""
    return 1 if n % 4 in (0, 1) else -1


def _fib_prefix_probe(fmap: UnimodalMap, depth: int) -> tuple[int, float | None]:
    """Matched minimal-recurrence depth plus, when the prefix fully matches,
    the next landing point's position relative to the deepest interval
    (scaled so the interior is (-1, 1))."""
    from .maps import RInterval
    from .nest import _required_bits
    from .orbits import INSIDE, first_landing_time, pullback_component

    cache = OrbitCache(fmap, max_bits=_PROBE_MAX_BITS)
    prev = fmap.base_interval(bits=2 * fmap.prec.bits)
    r1 = r2 = 0
    matched = 0
    try:
        for n in range(1, depth + 1):
            expected = 3 if n == 1 else 5 if n == 2 else r1 + r2
            cache.ensure_bits(_required_bits(fmap.prec, prev))
            landing = first_landing_time(cache, prev, expected)
            if not landing.landed or landing.time != expected:
                return matched, None
            cur = pullback_component(fmap, expected, prev, cache).interval
            if cache.locate(expected, cur) == INSIDE:
                return matched, None
            matched = n
            r1, r2 = expected, r1
            prev = cur
        nxt = 3 if depth == 0 else 5 if depth == 1 else r1 + r2
        cache.ensure_bits(_required_bits(fmap.prec, prev))
        x = cache.value(nxt)
        from .precision import safe_prec
        with workprec(safe_prec(x, prev.lo, prev.hi)):
            rel = (x - prev.midpoint()) / (prev.length() / 2)
        return matched, float(rel)
    except NestgeomError:
        return matched, None


def _kneading_depth(fmap: UnimodalMap, prefix: KneadingSequence) -> int:
    try:
        seq = kneading_sequence(OrbitCache(fmap, max_bits=_PROBE_MAX_BITS), len(prefix))
    except NestgeomError:
        return 0
    n = 0
    for s, t in zip(seq.symbols, prefix.symbols):
        if s != t:
            break
        n += 1
    return n


def _records_depth(fmap: UnimodalMap, records: tuple[CombinatoricsRecord, ...]) -> int:
    top = records[-1].level
    try:
        nest = build_nest(fmap, max_levels=top + 1, orbit_cap=_PROBE_ORBIT_CAP,
                          max_bits=_PROBE_MAX_BITS, renorm_horizon=None)
    except NestgeomError:
        return 0
    matched = 0
    for rec in records:
        if nest.depth < rec.level + 1:
            break
        try:
            got = combinatorics(nest, rec.level)
        except NestgeomError:
            break
        if not essentially_equivalent(got, rec, 0):
            break
        matched = rec.level
    return matched


def _grid(lo: mpf, hi: mpf, count: int, bits: int) -> list[mpf]:
    with workprec(bits):
        step = (hi - lo) / (count + 1)
        return [lo + step * i for i in range(1, count + 1)]


def _maximal_runs(depths: list[int], dmax: int) -> list[tuple[int, int]]:
    runs = []
    i = 0
    while i < len(depths):
        if depths[i] == dmax:
            j = i
            while j + 1 < len(depths) and depths[j + 1] == dmax:
                j += 1
            runs.append((i, j))
            i = j + 1
        else:
            i += 1
    return runs


class _Descent:
    """Backtracking window descent on a nested-window match predicate.

    Grid points at the current maximal matched depth mark candidate windows;
    the search narrows onto each candidate run in turn, growing the grid
    whenever the whole bracket sits at one depth (the deeper window is then
    hiding between grid points)."""

    def __init__(self, match_depth, target_depth: int, tol: mpf, bits: int,
                 transcript: list[str], grid: int = 9, grid_max: int = 4096):
        self.match_depth = match_depth
        self.target = target_depth
        self.tol = tol
        self.bits = bits
        self.transcript = transcript
        self.grid0 = grid
        self.grid_max = grid_max
        self.probes = 0
        self.best = 0

    def run(self, lo: mpf, hi: mpf):
        found = self._explore(lo, hi, self.grid0)
        if found is None:
            raise NotRealized(
                f"no window reaching depth {self.target} (best {self.best})",
                matched_depth=self.best)
        return found

    def _explore(self, lo: mpf, hi: mpf, grid: int):
        while True:
            pts = _grid(lo, hi, grid, self.bits)
            depths = []
            for p in pts:
                depths.append(self.match_depth(p))
                self.probes += 1
            dmax = max(depths)
            self.best = max(self.best, dmax)
            self.transcript.append(
                f"[{mpmath.nstr(lo, 24)}, {mpmath.nstr(hi, 24)}] grid={grid} depths={depths}")
            if dmax >= self.target:
                i = depths.index(dmax)
                blo = pts[i - 1] if i > 0 else lo
                bhi = pts[i + 1] if i < grid - 1 else hi
                return pts[i], blo, bhi
            runs = _maximal_runs(depths, dmax)
            if len(runs) == 1 and runs[0] == (0, grid - 1):
                if 2 * grid > self.grid_max:
                    return None
                grid *= 2
                continue
            if hi - lo < self.tol:
                return None
            if len(runs) == 1:
                i0, i1 = runs[0]
                lo = pts[i0 - 1] if i0 > 0 else lo
                hi = pts[i1 + 1] if i1 < grid - 1 else hi
                continue
            for i0, i1 in runs:
                sub_lo = pts[i0 - 1] if i0 > 0 else lo
                sub_hi = pts[i1 + 1] if i1 < grid - 1 else hi
                found = self._explore(sub_lo, sub_hi, grid)
                if found is not None:
                    return found
            return None


def _descend(match_depth, target_depth: int, lo: mpf, hi: mpf, tol: mpf,
             bits: int, transcript: list[str], grid: int = 9):
    """Find a point reaching ``target_depth``; returns (point, lo, hi, probes)."""
    descent = _Descent(match_depth, target_depth, tol, bits, transcript, grid)
    hit, blo, bhi = descent.run(lo, hi)
    return hit, blo, bhi, descent.probes


def _pin_edge(match, outside: mpf, inside: mpf, tol: mpf, bits: int) -> tuple[mpf, mpf, int]:
    """Bisect between a non-matching and a matching point down to ``tol``."""
    probes = 0
    with workprec(bits):
        while abs(inside - outside) >= tol:
            mid = (outside + inside) / 2
            probes += 1
            if match(mid):
                inside = mid
            else:
                outside = mid
    return outside, inside, probes


def _search_fibonacci(target: SearchTarget, digits: int,
                      prec: Precision | None) -> SearchResult:
    """Depth-first window refinement for the minimal-recurrence target.

    Inside a matched window the next landing point sweeps the deepest
    interval as the parameter moves (a polynomial in the parameter), so
    bisection on its relative position narrows the window to the landing
    cell before any grid scan.  A cell can hold several windows at the next
    depth (left and right of the central domain); candidates are tried in
    order and dead ends are backtracked.
    """
    prec = prec or Precision(_probe_prec(digits))
    probe_prec = Precision(128)  # certified decisions escalate on their own
    bits = max(4 * digits + 128, 2 * prec.bits)
    depth = target.depth
    transcript: list[str] = []
    state = {"probes": 0}
    with workprec(bits):
        start_lo, start_hi = mpf("1.501"), mpf("2")
        tol_final = mpf(10) ** (-digits)

    def probe(a: mpf, d: int):
        state["probes"] += 1
        return _fib_prefix_probe(make_map_from_value(a, probe_prec), d)

    def candidates(m: int, wlo: mpf, whi: mpf):
        """Candidate parameters for depth m+1 inside the depth-m window.

        In a guided cell, bisecting the landing position onto a spread of
        targets on the canonical side lands a probe inside the next-depth
        window; without guidance an adaptive grid scan takes over."""
        with workprec(bits):
            width = whi - wlo
            eps = width / 1024
            p_lo = probe(wlo + eps, m)[1]
            p_hi = probe(whi - eps, m)[1]
            guided = (p_lo is not None and p_hi is not None
                      and abs(p_lo) > 1 and abs(p_hi) > 1 and (p_lo > 0) != (p_hi > 0))
        transcript.append(
            f"level {m + 1}: window [{mpmath.nstr(wlo, 24)}, {mpmath.nstr(whi, 24)}]"
            f" guided={guided}")
        if not guided:
            def full(a, _d=m + 1):
                return probe(a, _d)[0] >= _d
            yield from _grid_hunt(full, wlo, whi, bits, tol_final)
            return

        sign = 1 if p_lo < p_hi else -1

        def pos(a):
            rel = probe(a, m)[1]
            return None if rel is None else sign * rel

        side = _fib_side(m + 1)
        with workprec(bits):
            aim_tol = max(tol_final, width * mpf(2) ** -16)
        # canonical side first; the mirror side only as a fallback
        spread = (0.62, 0.75, 0.5, 0.87, 0.4, 0.95, 0.25)
        targets = [side * t for t in spread] + [-side * t for t in spread]
        for t in targets:
            # pos is orientation-normalized, so aim at sign * target
            c = _bisect_crossing(pos, wlo + eps, whi - eps, sign * t, bits, aim_tol)
            yield c, None, None

    def window_around(match, c: mpf, lo_bound: mpf, hi_bound: mpf, tol: mpf):
        """Pin the edges of the matching window containing ``c``."""
        with workprec(bits):
            anchors = []
            for direction in (-1, 1):
                step = (hi_bound - lo_bound) * mpf(2) ** -24
                anchor = None
                while True:
                    cand = c + direction * step
                    if not (lo_bound < cand < hi_bound):
                        anchor = lo_bound if direction < 0 else hi_bound
                        break
                    if not match(cand):
                        anchor = cand
                        break
                    step *= 8
                anchors.append(anchor)
        _, in_l, _ = _pin_edge(match, anchors[0], c, tol, bits)
        _, in_r, _ = _pin_edge(match, anchors[1], c, tol, bits)
        return in_l, in_r

    def attempt(m: int, wlo: mpf, whi: mpf):
        """Refine the depth-m window (wlo, whi) down to full target depth."""
        if m == depth:
            return wlo, whi

        def full(a, _d=m + 1):
            return probe(a, _d)[0] >= _d

        with workprec(bits):
            edge_tol = max(tol_final, (whi - wlo) * mpf(2) ** -16)
        tried: list[tuple[mpf, mpf]] = []
        for c, _, _ in candidates(m, wlo, whi):
            if any(lo_t <= c <= hi_t for lo_t, hi_t in tried):
                continue
            if not full(c):
                continue
            in_l, in_r = window_around(full, c, wlo, whi, edge_tol)
            tried.append((in_l, in_r))
            found = attempt(m + 1, in_l, in_r)
            if found is not None:
                return found
        return None

    found = attempt(0, start_lo, start_hi)
    if found is None:
        raise NotRealized(f"no parameter window reached depth {depth}")
    wlo, whi = found

    def full_depth(a):
        return probe(a, depth)[0] >= depth

    with workprec(bits):
        pad = (whi - wlo) / 2
        out_l, in_l, _ = _pin_edge(full_depth, wlo - pad, wlo, tol_final, bits)
        out_r, in_r, _ = _pin_edge(full_depth, whi + pad, whi, tol_final, bits)
    a_star = in_l
    a_text = mpmath.nstr(a_star, digits + 10)
    verify_map = make_map(a_text, Precision(2 * prec.bits))
    got = _fibonacci_depth(verify_map, depth)
    if got < depth:
        raise NotRealized("re-verification from decimal text failed", matched_depth=got)
    result = SearchResult(a_text=a_text, a=verify_map.a, bracket=(out_l, out_r),
                          matched_depth=depth, probes=state["probes"], target=target,
                          transcript=transcript)
    _check_bracket_straddle(result, prec)
    return result


def _bisect_crossing(pos, lo: mpf, hi: mpf, level: float, bits: int, tol: mpf) -> mpf:
    """Bisect for pos(a) = level, assuming pos(lo) < level < pos(hi)."""
    with workprec(bits):
        for _ in range(4 * bits):
            if hi - lo < tol:
                break
            mid = (lo + hi) / 2
            v = pos(mid)
            if v is None:
                mid = (lo + mid) / 2
                v = pos(mid)
                if v is None:
                    break
            if v < level:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2


def _grid_hunt(match, lo: mpf, hi: mpf, bits: int, tol: mpf,
               grid: int = 96, grid_max: int = 8192):
    """Yield matching points with their non-matching neighbors, scanning an
    ever finer grid; deduplicates hits that fall in an already-seen run."""
    seen: list[tuple[mpf, mpf]] = []
    while grid <= grid_max:
        pts = _grid(lo, hi, grid, bits)
        flags = []
        for p in pts:
            if any(b_lo <= p <= b_hi for b_lo, b_hi in seen):
                flags.append(None)  # inside an already-yielded run
                continue
            flags.append(match(p))
        for i, (p, ok) in enumerate(zip(pts, flags)):
            if ok:
                fail_lo = pts[i - 1] if i > 0 else lo
                fail_hi = pts[i + 1] if i < len(pts) - 1 else hi
                seen.append((fail_lo, fail_hi))
                yield p, fail_lo, fail_hi
        if hi - lo < tol:
            return
        grid *= 4


def search_parameter(target: SearchTarget, digits: int = 60,
                     prec: Precision | None = None,
                     lo_text: str = "1.501", hi_text: str = "2") -> SearchResult:
    """Find a parameter realizing ``target``, pinned to ``digits`` digits.

    The fibonacci target uses landing-cell-guided window refinement; other
    window targets (kneading prefix, explicit records) run the grid descent
    plus edge bisection; the two cascade targets bisect on the measured
    cascade quantity directly.  The result is re-verified from its decimal
    text before being returned; failure raises NotRealized.
    """
    if target.kind == NEAR_PARABOLIC:
        return _search_near_parabolic(target, digits, prec)
    if target.kind == INTERMITTENT:
        return _search_intermittent(target, digits, prec)
    if target.kind == FIBONACCI:
        return _search_fibonacci(target, digits, prec)

    prec = prec or Precision(max(192, _probe_prec(digits)))
    bits = max(4 * digits + 128, 2 * prec.bits)
    with workprec(bits):
        lo = mpf(lo_text)
        hi = mpf(hi_text)
        tol = mpf(10) ** (-digits)

    if target.kind == KNEADING:
        if target.prefix is None:
            raise AdmissibilityError("kneading target without a prefix")
        def match_depth(a):
            return _kneading_depth(make_map_from_value(a, prec), target.prefix)
    elif target.kind == RECORDS:
        def match_depth(a):
            return _records_depth(make_map_from_value(a, prec), target.records)
    else:
        raise AdmissibilityError(f"unknown target kind {target.kind!r}")

    depth_goal = len(target.prefix) if target.kind == KNEADING else target.depth
    transcript: list[str] = []
    hit, blo, bhi, probes = _descend(match_depth, depth_goal, lo, hi, tol,
                                     bits, transcript)

    def full_match(a):
        return match_depth(a) >= depth_goal

    out_l, in_l, p1 = _pin_edge(full_match, blo, hit, tol, bits)
    out_r, in_r, p2 = _pin_edge(full_match, bhi, hit, tol, bits)
    probes += p1 + p2
    a_star = in_l
    a_text = mpmath.nstr(a_star, digits + 10)
    transcript.append(f"edge bracket [{mpmath.nstr(out_l, digits)}, {mpmath.nstr(in_l, digits)}]")

    verify_map = make_map(a_text, Precision(2 * prec.bits))
    if match_depth(verify_map.a) < depth_goal:
        raise NotRealized("re-verification from decimal text failed",
                          matched_depth=match_depth(verify_map.a))
    result = SearchResult(a_text=a_text, a=verify_map.a, bracket=(out_l, out_r),
                          matched_depth=depth_goal, probes=probes, target=target,
                          transcript=transcript)
    _check_bracket_straddle(result, prec)
    return result


def _check_bracket_straddle(result: SearchResult, prec: Precision) -> None:
    """The final bracket endpoints' kneading sequences straddle the result's."""
    length = 24
    try:
        k_lo = kneading_sequence(OrbitCache(make_map_from_value(result.bracket[0], prec),
                                            max_bits=_PROBE_MAX_BITS), length)
        k_hi = kneading_sequence(OrbitCache(make_map_from_value(result.bracket[1], prec),
                                            max_bits=_PROBE_MAX_BITS), length)
        k_mid = kneading_sequence(OrbitCache(make_map_from_value(result.a, prec),
                                             max_bits=_PROBE_MAX_BITS), length)
    except NestgeomError:
        return
    c_lo, c_hi = compare(k_lo, k_mid), compare(k_hi, k_mid)
    if c_lo * c_hi > 0:
        raise NestgeomError("bracket endpoints fail to straddle the target in kneading order")


def verify_fibonacci(a_text: str, depth: int, prec: Precision,
                     cap: int = 20000) -> Nest:
    """Independent closure check for a found minimal-recurrence parameter:
    rebuilds the nest, confirms the landing recursion, non-centrality and
    the two-branch return structure."""
    fmap = make_map(a_text, prec)
    nest = build_nest(fmap, max_levels=depth, orbit_cap=_PROBE_ORBIT_CAP,
                      max_bits=max(_PROBE_MAX_BITS, 8 * prec.bits), renorm_horizon=None)
    if nest.depth < depth:
        raise NotRealized(f"nest only reached depth {nest.depth}", matched_depth=nest.depth)
    rs = [lv.r for lv in nest.levels]
    if rs[1] != 3 or rs[2] != 5:
        raise NotRealized("landing times do not start 3, 5")
    for n in range(3, depth + 1):
        if rs[n] != rs[n - 1] + rs[n - 2]:
            raise NotRealized(f"landing recursion breaks at level {n}", matched_depth=n - 1)
    if any(lv.central is not False for lv in nest.levels[1:]):
        raise NotRealized("a central level appeared")
    for n in range(1, depth):
        branches = return_map_domains(nest, n, cap)
        if len(branches) != 2:
            raise NotRealized(f"level {n} has {len(branches)} branches, expected 2",
                              matched_depth=n - 1)
    return nest


def _cycle_multiplier(fmap: UnimodalMap, period: int, bits: int,
                      iters: int = 60000) -> mpf | None:
    """Multiplier of the attracting cycle reached from the critical point,
    or None when the orbit fails to settle onto a cycle of that period."""
    with workprec(bits):
        a = fmap.a
        x = mpf(0)
        for _ in range(iters):
            x = 1 - a + a * x * x
        probe = x
        for _ in range(period):
            probe = 1 - a + a * probe * probe
        if abs(probe - x) > mpf(2) ** (-bits // 3):
            return None
        mult = mpf(1)
        z = x
        for _ in range(period):
            mult *= 2 * a * z
            z = 1 - a + a * z * z
        return mult


def find_superstable(period: int, prec: Precision,
                     lo: float = 1.55, hi: float = 1.999) -> mpf:
    """Parameter where the critical point is periodic of exactly ``period``
    (the largest such in the range), by sign scan plus bisection."""
    bits = 4 * prec.bits

    def crit_iter(a: mpf) -> mpf:
        with workprec(bits):
            x = mpf(0)
            for _ in range(period):
                x = 1 - a + a * x * x
            return x

    with workprec(bits):
        grid = [mpf(lo) + (mpf(hi) - mpf(lo)) * i / 2048 for i in range(2049)]
    roots = []
    vals = [crit_iter(a) for a in grid]
    for a0, a1, v0, v1 in zip(grid, grid[1:], vals, vals[1:]):
        if v0 == 0 or v0 * v1 >= 0:
            continue
        x, y = a0, a1
        with workprec(bits):
            for _ in range(prec.bits + 64):
                mid = (x + y) / 2
                vm = crit_iter(mid)
                if vm == 0:
                    x = y = mid
                    break
                if vm * crit_iter(x) < 0:
                    y = mid
                else:
                    x = mid
            root = (x + y) / 2
        exact_period = all(abs(_iterate(root, k, bits)) > mpf(2) ** -32
                           for k in range(1, period))
        if exact_period:
            roots.append(root)
    if not roots:
        raise NotRealized(f"no superstable period-{period} parameter in [{lo}, {hi}]")
    return max(roots)


def _iterate(a: mpf, k: int, bits: int) -> mpf:
    with workprec(bits):
        x = mpf(0)
        for _ in range(k):
            x = 1 - a + a * x * x
        return x


def _search_near_parabolic(target: SearchTarget, digits: int,
                           prec: Precision | None) -> SearchResult:
    """Inside a low-period window, near its tangency edge: bisect the
    attracting-cycle multiplier to the requested value."""
    prec = prec or Precision(256)
    bits = max(4 * digits + 128, 2 * prec.bits)
    period = target.period
    mult_goal = mpf(target.multiplier)
    a_ss = find_superstable(period, prec)
    transcript = [f"superstable period-{period} at {mpmath.nstr(a_ss, 25)}"]

    def mult(a: mpf) -> mpf | None:
        return _cycle_multiplier(make_map_from_value(a, prec), period, prec.bits)

    with workprec(bits):
        step = mpf("0.0005")
        lo = None
        probes = 0
        for _ in range(16):
            cand = a_ss - step
            probes += 1
            m = mult(cand)
            if m is None or m > mult_goal:
                lo = cand
                break
            step *= 2
        if lo is None:
            raise NotRealized(f"could not bracket the period-{period} tangency edge")
        hi = a_ss
        tol = mpf(10) ** (-digits)
        while hi - lo >= tol:
            mid = (lo + hi) / 2
            probes += 1
            m = mult(mid)
            if m is None or m > mult_goal:
                lo = mid
            else:
                hi = mid
        a_star = hi

    a_text = mpmath.nstr(a_star, digits + 10)
    final = mult(make_map(a_text, prec).a)
    if final is None or abs(final - mult_goal) > mpf("0.05"):
        raise NotRealized("multiplier verification failed at the found parameter")
    transcript.append(f"multiplier at result: {mpmath.nstr(final, 12)}")
    return SearchResult(a_text=a_text, a=make_map(a_text, prec).a,
                        bracket=(lo, a_ss), matched_depth=period, probes=probes,
                        target=target, transcript=transcript)


def _cascade_run_length(fmap: UnimodalMap, budget: int) -> int:
    """Length of the first run of central levels (budget-capped)."""
    try:
        nest = build_nest(fmap, max_levels=budget + 4, orbit_cap=_PROBE_ORBIT_CAP,
                          max_bits=_PROBE_MAX_BITS, renorm_horizon=None)
    except NestgeomError:
        return 0
    runs = central_runs(nest)
    if not runs:
        return 0
    # a run still open at the last built level counts as at least the budget
    start, length = runs[0]
    if start + length - 1 >= nest.depth and nest.depth >= budget:
        return budget + 1
    return length


def _search_intermittent(target: SearchTarget, digits: int,
                         prec: Precision | None) -> SearchResult:
    """Just outside a low-period window: bisect the measured central-run
    length into the requested band (finite cascade with an escape)."""
    prec = prec or Precision(256)
    bits = max(4 * digits + 128, 2 * prec.bits)
    lo_len, hi_len = target.cascade_length
    budget = hi_len + 8
    a_ss = find_superstable(target.period, prec)
    probes = 0
    transcript = [f"superstable period-{target.period} at {mpmath.nstr(a_ss, 25)}"]

    def run_len(a: mpf) -> int:
        return _cascade_run_length(make_map_from_value(a, prec), budget)

    with workprec(bits):
        lo = a_ss - mpf("0.02")
        hi = a_ss
        tol = mpf(10) ** (-digits)
        a_star = None
        while hi - lo >= tol:
            mid = (lo + hi) / 2
            probes += 1
            length = run_len(mid)
            transcript.append(f"a={mpmath.nstr(mid, 20)} run={length}")
            if lo_len <= length <= hi_len:
                a_star = mid
                break
            if length < lo_len:
                lo = mid
            else:
                hi = mid
        if a_star is None:
            raise NotRealized(f"no cascade in [{lo_len}, {hi_len}] found to tolerance")

    a_text = mpmath.nstr(a_star, digits + 10)
    final = run_len(make_map(a_text, prec).a)
    if not (lo_len <= final <= hi_len):
        raise NotRealized(f"cascade length verification failed: got {final}")
    transcript.append(f"run length at result: {final}")
    return SearchResult(a_text=a_text, a=make_map(a_text, prec).a, bracket=(lo, hi),
                        matched_depth=final, probes=probes, target=target,
                        transcript=transcript)
