"""Generalized return maps, cascade resolution and level combinatorics.

At each nest level the first-return map to the previous interval splits
into a central branch (the nest level itself) and finitely many diffeomorphic
branches, discovered here through the critical orbit's visits.  Runs of
central levels are resolved into a landing family carried by iterates of the
central branch, the composed Bernoulli map over that family, and the next
tower interval.  A level's combinatorics is the real-line order of the
landing family plus the Bernoulli itineraries of the next level's branches.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mpf

from .errors import CapExceeded, NestgeomError, NotInDomain
from .maps import RInterval
from .nest import Nest
from .orbits import INSIDE, OUTSIDE, pullback_along_segment, pullback_component
from .precision import ulp_tol, workprec

INFINITE_DEPTH = -1  # JSON-safe sentinel for an unbounded forward depth

DEFAULT_RETURN_CAP = 10**4
DEFAULT_CASCADE_BUDGET = 256
DEFAULT_ITINERARY_CAP = 256


@dataclass(frozen=True)
class Branch:
    """One domain of the first-return map to the previous level's interval."""

    label: int  # 0 = central (folding) branch
    domain: RInterval
    return_time: int
    orientation: int  # +1 increasing, -1 decreasing, 0 folding
    witness: int  # orbit index of a critical-orbit visit inside the domain

    @property
    def central(self) -> bool:
        return self.label == 0


@dataclass(frozen=True)
class LandingInterval:
    """A domain of the Bernoulli map: transit iterates of the central branch
    carry it onto a return branch."""

    label: int  # 0 = the interval equal to the next tower base
    domain: RInterval
    transit_time: int
    target_branch: int
    witness: int


@dataclass
class LevelMaps:
    """Resolved return-map structure at one level."""

    level: int
    return_time: int
    branches: list[Branch]
    landing: list[LandingInterval]
    cascade_levels: int
    escape_time: int | None  # central-branch iterates of 0 until exit (None: not seen)
    escaped: bool
    t_next: RInterval

    def branch_by_label(self, label: int) -> Branch:
        for b in self.branches:
            if b.label == label:
                return b
        raise KeyError(label)

    def landing_by_label(self, label: int) -> LandingInterval:
        for piece in self.landing:
            if piece.label == label:
                return piece
        raise KeyError(label)


@dataclass(frozen=True)
class CombinatoricsRecord:
    """Order + itineraries + depths of one level's landing family."""

    level: int
    ordering: tuple[int, ...]  # landing labels by increasing position
    itineraries: tuple[tuple[int, tuple[int, ...]], ...]  # (branch label, labels visited)
    depths: tuple[tuple[int, int], ...]  # (landing label, depth); -1 encodes infinity


@dataclass(frozen=True)
class EssentialBound:
    branch_count_bound: int
    depth_bound: int
    return_time_bound: int
    growing: tuple[str, ...]  # components that grow monotonically across levels


def _locate_orbit_in(nest: Nest, k: int, iv: RInterval) -> bool:
    return nest.cache.locate(k, iv) == INSIDE


def _proper_overlap(d1: RInterval, d2: RInterval, scale: mpf, bits: int) -> bool:
    """True when the interiors overlap by more than the rounding tolerance
    (return domains may legitimately abut at shared boundary preimages)."""
    from .precision import safe_prec
    with workprec(safe_prec(d1.lo, d1.hi, d2.lo, d2.hi)):
        inner = min(d1.hi, d2.hi) - max(d1.lo, d2.lo)
        return inner > ulp_tol(bits, 16) * scale


def return_map_domains(nest: Nest, n: int, cap: int = DEFAULT_RETURN_CAP) -> list[Branch]:
    """Branches of the first-return map to I^(n-1) witnessed by the critical
    orbit within ``cap`` iterates.

    The central branch is the nest level itself; every other visit pulls the
    previous interval back along the orbit segment to the visiting point.
    """
    if n < 1 or n > nest.depth:
        raise ValueError(f"level {n} not built")
    prev = nest.interval(n - 1)
    cur = nest.interval(n)
    cache = nest.cache
    r_n = nest.return_time(n)

    visits = [k for k in range(1, cap + 1) if _locate_orbit_in(nest, k, prev)]
    raw: list[tuple[RInterval, int, int]] = []  # (domain, return_time, witness)
    for tau, tau_next in zip(visits, visits[1:]):
        rho = tau_next - tau
        if _locate_orbit_in(nest, tau, cur):
            if rho != r_n:
                raise NestgeomError(
                    f"visit at {tau} inside level {n} returned after {rho} != r_n = {r_n}")
            continue  # central branch, known in closed form
        if any(rho == r0 and dom.contains(cache.value(tau)) for dom, r0, _ in raw):
            continue
        pb = pullback_along_segment(nest.fmap, rho, prev, cache.value(tau), cache,
                                    base_index=tau)
        raw.append((pb.interval, rho, tau))

    bits = nest.prec.bits
    for i, (dom_i, rho_i, _) in enumerate(raw):
        for dom_j, rho_j, _ in raw[i + 1:]:
            if _proper_overlap(dom_i, dom_j, prev.length(), bits):
                raise NestgeomError(
                    f"overlapping return branches at level {n} (times {rho_i}, {rho_j})")
        if _proper_overlap(dom_i, cur, prev.length(), bits):
            raise NestgeomError(f"non-central branch overlaps the central domain at level {n}")

    raw.sort(key=lambda item: item[0].lo)
    branches = [Branch(0, cur, r_n, 0, 0)]
    for pos, (dom, rho, tau) in enumerate(raw, start=1):
        branches.append(Branch(pos, dom, rho, _orientation(nest, dom, rho), tau))
    if len(branches) < 2:
        raise CapExceeded(f"only the central branch found at level {n} within cap {cap}")
    return branches


def _orientation(nest: Nest, dom: RInterval, rho: int) -> int:
    """Sign of the return map's derivative on a monotone branch."""
    fmap = nest.fmap
    bits = nest.cache.working_bits
    lo_img = _iterate_point(fmap, dom.lo, rho, bits)
    hi_img = _iterate_point(fmap, dom.hi, rho, bits)
    return 1 if lo_img < hi_img else -1


def _iterate_point(fmap, x: mpf, steps: int, bits: int) -> mpf:
    a = fmap.a
    with workprec(bits):
        for _ in range(steps):
            x = 1 - a + a * x * x
    return x


def _consecutive_central(nest: Nest, n: int) -> int:
    count = 0
    for lv in nest.levels[n:]:
        if lv.central:
            count += 1
        else:
            break
    return count


def cascade_structure(nest: Nest, n: int, budget: int = DEFAULT_CASCADE_BUDGET,
                      cap: int = DEFAULT_RETURN_CAP,
                      branches: list[Branch] | None = None) -> LevelMaps:
    """Resolve level ``n``: its branches, landing family and next tower base.

    At a non-central level the landing family is the branch family itself.
    At a central level the critical orbit's iterates under the central branch
    are followed to their escape; the landing family consists of the branch
    domains plus every witnessed pullback of them under those iterates, with
    the 0-labeled one (the pullback containing 0) becoming the next tower
    base.  ``escaped=False`` reports a cascade outrunning ``budget``.
    """
    if n < 1 or n > nest.depth:
        raise ValueError(f"level {n} not built")
    cur = nest.interval(n)
    cache = nest.cache
    r = nest.return_time(n)
    cascade_levels = _consecutive_central(nest, n)
    central_here = bool(nest.levels[n].central)

    if central_here:
        escape_time = None
        for t in range(1, budget + 1):
            if t * r > cap:
                break
            if not _locate_orbit_in(nest, t * r, cur):
                escape_time = t
                break
        if escape_time is None:
            # trapped: nothing away from the central branch is witnessed
            central_only = [Branch(0, cur, r, 0, 0)]
            return LevelMaps(n, r, central_only, [], cascade_levels, None, False, cur)

    branches = branches if branches is not None else return_map_domains(nest, n, cap)

    if not central_here:
        landing = [LandingInterval(b.label, b.domain, 0, b.label, b.witness)
                   for b in branches]
        return LevelMaps(n, r, branches, landing, 0, 1, True, cur)

    target = _branch_containing(nest, branches, escape_time * r)
    t_next = pullback_component(nest.fmap, escape_time * r, target.domain, cache).interval

    pieces: list[tuple[RInterval, int, int, int]] = []  # (domain, transit, target, witness)
    for b in branches:
        if b.label != 0:
            pieces.append((b.domain, 0, b.label, b.witness))
    seen_transits = set()
    visits = [k for k in range(1, cap + 1) if _locate_orbit_in(nest, k, cur)]
    visits.insert(0, 0)
    for nu in visits:
        exit_t = None
        for t in range(1, budget + 1):
            if nu + t * r > cap:
                break
            if not _locate_orbit_in(nest, nu + t * r, cur):
                exit_t = t
                break
        if exit_t is None:
            continue
        tgt = _branch_containing(nest, branches, nu + exit_t * r)
        if nu == 0:
            continue  # the 0-based pullback is t_next itself
        key = (exit_t, tgt.label, _side_of_zero(cache.value(nu)))
        if key in seen_transits:
            continue
        seen_transits.add(key)
        pb = pullback_along_segment(nest.fmap, exit_t * r, tgt.domain,
                                    cache.value(nu), cache, base_index=nu)
        pieces.append((pb.interval, exit_t, tgt.label, nu))

    pieces = [p for p in pieces if not _proper_overlap(p[0], t_next, cur.length(),
                                                       nest.prec.bits)]
    pieces.sort(key=lambda p: p[0].lo)
    landing = [LandingInterval(0, t_next, escape_time, target.label, 0)]
    label = 1
    for dom, transit, tgt_label, wit in pieces:
        landing.append(LandingInterval(label, dom, transit, tgt_label, wit))
        label += 1
    return LevelMaps(n, r, branches, landing, cascade_levels, escape_time, True, t_next)


def _side_of_zero(x: mpf) -> int:
    return 1 if x >= 0 else -1


def _branch_containing(nest: Nest, branches: list[Branch], orbit_index: int) -> Branch:
    for b in branches:
        if nest.cache.locate(orbit_index, b.domain) == INSIDE:
            return b
    raise CapExceeded(
        f"orbit point {orbit_index} lies in no witnessed branch; raise the return cap")


def _landing_containing(nest: Nest, maps: LevelMaps, orbit_index: int) -> LandingInterval:
    for piece in maps.landing:
        if nest.cache.locate(orbit_index, piece.domain) == INSIDE:
            return piece
    raise NotInDomain(
        f"orbit point {orbit_index} lies in a gap of the landing family at level {maps.level}")


def bernoulli_step_time(maps: LevelMaps, piece: LandingInterval) -> int:
    """Map iterates consumed by one Bernoulli application on ``piece``."""
    rho = maps.branch_by_label(piece.target_branch).return_time
    return piece.transit_time * maps.return_time + rho


def bernoulli_map_apply(nest: Nest, maps: LevelMaps, x: mpf) -> tuple[int, mpf]:
    """One Bernoulli application at a point: landing label and image.

    The transit carries the point onto a return branch; that branch then maps
    it over the level's base interval.  Points in gaps raise NotInDomain.
    """
    from .precision import safe_prec
    tol = ulp_tol(nest.prec.bits, 16)
    piece = None
    for cand in maps.landing:
        with workprec(safe_prec(x, cand.domain.lo, cand.domain.hi)):
            slack = tol * cand.domain.length()
            hit = cand.domain.lo - slack <= x <= cand.domain.hi + slack
        if hit:
            piece = cand
            break
    if piece is None:
        raise NotInDomain("point lies in a gap of the landing family")
    steps = bernoulli_step_time(maps, piece)
    image = _iterate_point(nest.fmap, x, steps, nest.cache.working_bits)
    return piece.label, image


def next_level_branches(nest: Nest, maps: LevelMaps,
                        cap: int = DEFAULT_RETURN_CAP,
                        itinerary_cap: int = DEFAULT_ITINERARY_CAP) -> list[Branch]:
    """Branches of the first return to the next tower base under the
    Bernoulli map, witnessed by the critical orbit."""
    n = maps.level
    if not maps.escaped:
        raise CapExceeded(f"cascade at level {n} did not escape; no next tower level")
    if maps.cascade_levels == 0:
        if nest.depth < n + 1:
            raise ValueError(f"level {n + 1} not built")
        return return_map_domains(nest, n + 1, cap)

    cache = nest.cache
    visits = [0]
    idx = 0
    for _ in range(itinerary_cap * 4):
        piece = _landing_containing(nest, maps, idx) if idx else maps.landing_by_label(0)
        idx += bernoulli_step_time(maps, piece)
        if idx > cap:
            break
        if _locate_orbit_in(nest, idx, maps.t_next):
            visits.append(idx)
            if len(visits) >= 12:
                break
    if len(visits) < 2:
        raise CapExceeded(f"no return to the tower base after level {n} within cap {cap}")

    raw: list[tuple[RInterval, int, int]] = []
    for v, v_next in zip(visits, visits[1:]):
        steps = v_next - v
        if v == 0:
            pb = pullback_component(nest.fmap, steps, maps.t_next, cache)
        else:
            pb = pullback_along_segment(nest.fmap, steps, maps.t_next,
                                        cache.value(v), cache, base_index=v)
        if any(_proper_overlap(dom, pb.interval, maps.t_next.length(), nest.prec.bits)
               for dom, _, _ in raw):
            continue
        raw.append((pb.interval, steps, v))

    central = [item for item in raw if item[0].contains(mpf(0))]
    others = sorted((item for item in raw if not item[0].contains(mpf(0))),
                    key=lambda item: item[0].lo)
    branches = [Branch(0, central[0][0], central[0][1], 0, central[0][2])]
    for pos, (dom, steps, wit) in enumerate(others, start=1):
        branches.append(Branch(pos, dom, steps, 0, wit))
    return branches


def combinatorics(nest: Nest, n: int, cap: int = DEFAULT_RETURN_CAP,
                  budget: int = DEFAULT_CASCADE_BUDGET,
                  itinerary_cap: int = DEFAULT_ITINERARY_CAP,
                  maps: LevelMaps | None = None) -> CombinatoricsRecord:
    """Extract the combinatorial record of level ``n``.

    Itineraries replay each next-level branch's witness point under the
    Bernoulli map until it re-enters the next tower base; the labels visited
    along the way, with the real-line ordering and the depth of every landing
    interval, determine the level's combinatorics.
    """
    maps = maps or cascade_structure(nest, n, budget=budget, cap=cap)
    nxt = next_level_branches(nest, maps, cap=cap, itinerary_cap=itinerary_cap)
    cache = nest.cache

    itineraries = []
    for br in sorted(nxt, key=lambda b: b.label):
        idx = br.witness
        labels = []
        for _ in range(itinerary_cap):
            piece = _landing_containing(nest, maps, idx) if idx else maps.landing_by_label(0)
            labels.append(piece.label)
            idx += bernoulli_step_time(maps, piece)
            if idx > cap:
                raise CapExceeded(f"itinerary of branch {br.label} exceeded the orbit cap")
            if _locate_orbit_in(nest, idx, maps.t_next):
                break
        else:
            raise CapExceeded(f"itinerary of branch {br.label} exceeded {itinerary_cap} steps")
        itineraries.append((br.label, tuple(labels)))

    ordering = tuple(piece.label
                     for piece in sorted(maps.landing, key=lambda p: p.domain.lo))
    depths = tuple(sorted(_depths(nest, maps).items()))
    return CombinatoricsRecord(level=n, ordering=ordering,
                               itineraries=tuple(itineraries), depths=depths)


def _depths(nest: Nest, maps: LevelMaps) -> dict[int, int]:
    """depth = min(backward pullback ancestry, forward transit), per label."""
    r = maps.return_time
    cache = nest.cache
    out: dict[int, int] = {}
    for piece in maps.landing:
        if maps.cascade_levels == 0 and piece.label == 0:
            k_plus = INFINITE_DEPTH  # central branch never equals a non-central one
        else:
            k_plus = piece.transit_time
        k_minus = 0
        for other in maps.landing:
            gap = other.transit_time - piece.transit_time
            if gap >= 1 and other.target_branch == piece.target_branch:
                if cache.locate(other.witness + gap * r, piece.domain) == INSIDE:
                    k_minus = max(k_minus, gap)
        if k_plus == INFINITE_DEPTH:
            out[piece.label] = k_minus
        else:
            out[piece.label] = min(k_minus, k_plus)
    return out


def _canonical(record: CombinatoricsRecord, cutoff: int, mirrored: bool = False) -> tuple:
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    depth_of = dict(record.depths)
    kept = [lab for lab in record.ordering
            if depth_of[lab] <= cutoff or depth_of[lab] == INFINITE_DEPTH]
    if mirrored:
        kept = list(reversed(kept))
    rank = {lab: i for i, lab in enumerate(kept)}
    central_rank = rank.get(0)
    branch_labels = sorted(lab for lab, _ in record.itineraries)
    if mirrored:
        noncentral = [lab for lab in branch_labels if lab != 0]
        branch_map = {lab: new for lab, new in zip(noncentral, reversed(noncentral))}
        branch_map[0] = 0
    else:
        branch_map = {lab: lab for lab in branch_labels}
    its = []
    for br_label, labels in record.itineraries:
        trimmed = tuple(rank[lab] for lab in labels if lab in rank)
        its.append((branch_map[br_label], trimmed))
    its.sort()
    return (len(kept), central_rank, tuple(its))


def essentially_equivalent(rec1: CombinatoricsRecord, rec2: CombinatoricsRecord,
                           depth_cutoff: int = 0) -> bool:
    """True when the records agree after removing landing intervals deeper
    than ``depth_cutoff``, under a centrality-preserving relabeling that
    either preserves or reverses the real-line order (levels of one nest
    recur with alternating orientation, so reflections are combinatorially
    neutral)."""
    base = _canonical(rec1, depth_cutoff)
    return base == _canonical(rec2, depth_cutoff) or \
        base == _canonical(rec2, depth_cutoff, mirrored=True)


def essential_bound(records: list[CombinatoricsRecord]) -> EssentialBound:
    """Componentwise maxima across records, plus monotone-growth flags."""
    if not records:
        raise ValueError("need at least one record")
    branch_counts = [len(rec.itineraries) for rec in records]
    depth_maxima = []
    for rec in records:
        finite = [d for _, d in rec.depths if d != INFINITE_DEPTH]
        depth_maxima.append(max(finite) if finite else 0)
    return_maxima = [max(len(labels) for _, labels in rec.itineraries) for rec in records]

    growing = []
    for name, series in (("branch_count", branch_counts), ("depth", depth_maxima),
                         ("return_time", return_maxima)):
        if len(series) >= 3 and all(b > a for a, b in zip(series, series[1:])):
            growing.append(name)
    return EssentialBound(max(branch_counts), max(depth_maxima), max(return_maxima),
                          tuple(growing))


def record_to_json_dict(record: CombinatoricsRecord) -> dict:
    """Canonical JSON-ready encoding: integers only, stable field order."""
    return {
        "level": record.level,
        "ordering": list(record.ordering),
        "itineraries": [[lab, list(labels)] for lab, labels in record.itineraries],
        "depths": [[lab, d] for lab, d in record.depths],
    }


def record_from_json_dict(data: dict) -> CombinatoricsRecord:
    return CombinatoricsRecord(
        level=int(data["level"]),
        ordering=tuple(int(x) for x in data["ordering"]),
        itineraries=tuple((int(lab), tuple(int(x) for x in labels))
                          for lab, labels in data["itineraries"]),
        depths=tuple((int(lab), int(d)) for lab, d in data["depths"]),
    )
