import pytest
from mpmath import mpf

import fixtures
import oracle
from nestgeom.errors import CapExceeded, NotInDomain
from nestgeom.maps import make_map
from nestgeom.nest import build_nest
from nestgeom.precision import Precision, ulp_tol, workprec
from nestgeom.renorm import (
    CombinatoricsRecord,
    INFINITE_DEPTH,
    bernoulli_map_apply,
    bernoulli_step_time,
    cascade_structure,
    combinatorics,
    essential_bound,
    essentially_equivalent,
    record_from_json_dict,
    record_to_json_dict,
    return_map_domains,
)


def fib_nest(depth=9, prec=512):
    m = make_map(fixtures.FIBONACCI_A, Precision(prec))
    return build_nest(m, max_levels=depth, orbit_cap=10**5, max_bits=1 << 15,
                      renorm_horizon=None)


def fib_cap(n):
    """Scan horizon for level n data: enough to witness the branch pair."""
    return fixtures.FIBONACCI_R[min(n + 1, len(fixtures.FIBONACCI_R) - 1)] + 2


@pytest.fixture(scope="module")
def nest9():
    return fib_nest()


def test_central_branch_is_the_nest_level(nest9):
    branches = return_map_domains(nest9, 1, cap=fib_cap(1))
    central = branches[0]
    assert central.label == 0
    assert central.domain == nest9.interval(1)
    assert central.return_time == nest9.return_time(1)


def test_two_branch_structure(nest9):
    for n in range(1, 7):
        branches = return_map_domains(nest9, n, cap=fib_cap(n))
        assert len(branches) == 2, f"level {n}"
        side = branches[1]
        assert side.return_time == nest9.return_time(n - 1) if n > 1 else 2


def test_branches_disjoint_and_onto(nest9):
    for n in (1, 2, 3):
        branches = return_map_domains(nest9, n, cap=fib_cap(n))
        prev = nest9.interval(n - 1)
        for b in branches:
            assert prev.strictly_inside(b.domain) is False
            assert b.domain.lo >= prev.lo and b.domain.hi <= prev.hi
        for b1 in branches:
            for b2 in branches:
                if b1.label < b2.label:
                    inner = min(b1.domain.hi, b2.domain.hi) - max(b1.domain.lo, b2.domain.lo)
                    assert inner <= ulp_tol(512, 20) * prev.length()
        for b in branches[1:]:
            sign = oracle.check_monotone(nest9.fmap.a, b.domain.lo, b.domain.hi,
                                         b.return_time)
            assert sign == b.orientation
            oracle.check_return_interval(nest9.fmap.a, b.domain.lo, b.domain.hi,
                                         b.return_time, prev.lo, prev.hi)


def test_branch_domains_match_oracle_visit_scan(nest9):
    pts = oracle.orbit(nest9.fmap.a, fib_cap(3) + 40)
    for n in (1, 2, 3):
        prev = nest9.interval(n - 1)
        cap = fib_cap(n)
        visits = oracle.naive_visits(pts, prev.lo, prev.hi, cap)
        assert visits[0] == nest9.return_time(n)
        branches = return_map_domains(nest9, n, cap=cap)
        for tau in visits:
            assert any(b.domain.lo <= pts[tau] <= b.domain.hi for b in branches), \
                f"visit {tau} at level {n} not covered"


def test_cap_exceeded_when_no_noncentral_witness():
    nest = build_nest(make_map(fixtures.NEAR_PARABOLIC_A, Precision(256)),
                      max_levels=4, orbit_cap=10**4, max_bits=1 << 14,
                      renorm_horizon=None)
    with pytest.raises(CapExceeded):
        return_map_domains(nest, 1, cap=2000)


def test_standard_level_maps(nest9):
    maps = cascade_structure(nest9, 1, cap=fib_cap(1))
    assert maps.cascade_levels == 0 and maps.escaped
    assert maps.t_next == nest9.interval(1)
    assert [p.label for p in maps.landing] == [b.label for b in maps.branches]
    assert all(p.transit_time == 0 for p in maps.landing)


@pytest.fixture(scope="module")
def cascade_nest():
    m = make_map(fixtures.INTERMITTENT_A, Precision(512))
    return build_nest(m, max_levels=24, orbit_cap=10**5, max_bits=1 << 15,
                      renorm_horizon=None)


def test_cascade_resolution(cascade_nest):
    maps = cascade_structure(cascade_nest, 1, budget=64, cap=20000)
    assert maps.cascade_levels == 20
    assert maps.escaped and maps.escape_time == 21
    assert maps.landing[0].label == 0
    assert maps.landing[0].transit_time == maps.escape_time
    # the zero-labeled landing interval is the next tower base
    assert maps.landing[0].domain == maps.t_next
    assert maps.t_next.strictly_inside(cascade_nest.interval(1))
    # transit times grow toward the centre of the cascade channel
    pieces = sorted((p for p in maps.landing if p.label != 0),
                    key=lambda p: abs(p.domain.midpoint()))
    transits = [p.transit_time for p in pieces]
    assert transits == sorted(transits, reverse=True)
    assert max(transits) >= 10


def test_cascade_transit_consistency(cascade_nest):
    """Endpoint images of each landing interval land in its target branch."""
    maps = cascade_structure(cascade_nest, 1, budget=64, cap=20000)
    r = maps.return_time
    a = cascade_nest.fmap.a
    for piece in maps.landing[1:6]:
        tgt = maps.branch_by_label(piece.target_branch)
        if piece.transit_time == 0:
            continue
        for x in (piece.domain.lo, piece.domain.hi, piece.domain.midpoint()):
            img = oracle.iterate_point(a, x, piece.transit_time * r)
            with workprec(2048):
                slack = tgt.domain.length() * mpf(2) ** -200
                assert tgt.domain.lo - slack <= img <= tgt.domain.hi + slack


def test_cascade_escape_matches_direct_iteration(cascade_nest):
    maps = cascade_structure(cascade_nest, 1, budget=64, cap=20000)
    a = cascade_nest.fmap.a
    iv = cascade_nest.interval(1)
    r = maps.return_time
    x = mpf(0)
    t = 0
    with_inside = True
    while with_inside:
        x = oracle.iterate_point(a, x, r)
        t += 1
        with_inside = iv.lo < x < iv.hi
    assert t == maps.escape_time


def test_bernoulli_apply(nest9):
    maps = cascade_structure(nest9, 2, cap=fib_cap(2))
    prev = nest9.interval(1)
    piece = maps.landing[1] if maps.landing[0].label == 0 else maps.landing[0]
    x = piece.domain.midpoint()
    label, image = bernoulli_map_apply(nest9, maps, x)
    assert label == piece.label
    assert prev.lo <= image <= prev.hi
    want = oracle.iterate_point(nest9.fmap.a, x, bernoulli_step_time(maps, piece))
    with workprec(600):
        assert abs(want - image) < ulp_tol(512, 24)


def test_bernoulli_gap_raises(nest9):
    maps = cascade_structure(nest9, 1, cap=fib_cap(1))
    prev = nest9.interval(0)
    doms = sorted((p.domain for p in maps.landing), key=lambda d: d.lo)
    gap_point = None
    with workprec(600):
        spans = [(prev.lo, doms[0].lo)] + \
            [(d1.hi, d2.lo) for d1, d2 in zip(doms, doms[1:])] + \
            [(doms[-1].hi, prev.hi)]
        for g_lo, g_hi in spans:
            if g_hi - g_lo > prev.length() / 16:
                gap_point = (g_lo + g_hi) / 2
                break
    assert gap_point is not None
    with pytest.raises(NotInDomain):
        bernoulli_map_apply(nest9, maps, gap_point)


def test_combinatorics_fibonacci_self_similar(nest9):
    records = [combinatorics(nest9, n, cap=fib_cap(n + 1)) for n in range(2, 7)]
    for rec in records:
        assert len(rec.itineraries) == 2
    for r1 in records:
        for r2 in records:
            assert essentially_equivalent(r1, r2, 0)


def test_combinatorics_itineraries_replay(nest9):
    n = 3
    maps = cascade_structure(nest9, n, cap=fib_cap(n + 1))
    rec = combinatorics(nest9, n, cap=fib_cap(n + 1), maps=maps)
    nxt_domains = [(p.label, p.domain.lo, p.domain.hi,
                    bernoulli_step_time(maps, p)) for p in maps.landing]
    t_next = maps.t_next
    from nestgeom.renorm import next_level_branches
    for br in next_level_branches(nest9, maps, cap=fib_cap(n + 1)):
        got = dict(rec.itineraries)[br.label]
        want = oracle.naive_itinerary(nest9.fmap.a, br.domain.midpoint(),
                                      nxt_domains, t_next.lo, t_next.hi, 64)
        assert list(got) == want


def test_essential_equivalence_cutoff_semantics():
    base = CombinatoricsRecord(
        level=2, ordering=(1, 0, 2),
        itineraries=((0, (0, 1)), (1, (0,))),
        depths=((0, 0), (1, 0), (2, 0)))
    deeper = CombinatoricsRecord(
        level=3, ordering=(1, 0, 3, 2),
        itineraries=((0, (0, 1)), (1, (0,))),
        depths=((0, 0), (1, 0), (2, 0), (3, 2)))
    assert essentially_equivalent(base, base, 0)
    assert essentially_equivalent(base, deeper, 0)
    assert essentially_equivalent(base, deeper, 1)
    assert not essentially_equivalent(base, deeper, 2)


def test_essential_equivalence_allows_reflection_only():
    # a pure reflection is neutral
    r1 = CombinatoricsRecord(2, (1, 0), ((0, (0, 1)),), ((0, 0), (1, 0)))
    r2 = CombinatoricsRecord(2, (0, 1), ((0, (0, 1)),), ((0, 0), (1, 0)))
    assert essentially_equivalent(r1, r2, 0)
    # a genuinely different central position is not
    r3 = CombinatoricsRecord(2, (1, 0, 2), ((0, (0, 1)), (1, (0,))),
                             ((0, 0), (1, 0), (2, 0)))
    r4 = CombinatoricsRecord(2, (0, 1, 2), ((0, (0, 1)), (1, (0,))),
                             ((0, 0), (1, 0), (2, 0)))
    assert not essentially_equivalent(r3, r4, 0)
    # differing itineraries are never equivalent
    r5 = CombinatoricsRecord(2, (1, 0), ((0, (0, 1)),), ((0, 0), (1, 0)))
    r6 = CombinatoricsRecord(2, (1, 0), ((0, (0,)),), ((0, 0), (1, 0)))
    assert not essentially_equivalent(r5, r6, 0)


def test_essential_bound_and_growth_flags():
    recs = []
    for lvl, labels in ((2, 2), (3, 3), (4, 4)):
        ordering = tuple(range(labels))
        its = tuple((i, tuple([0] * (lvl - 1))) for i in range(labels))
        depths = tuple((i, i) for i in range(labels))
        recs.append(CombinatoricsRecord(lvl, ordering, its, depths))
    bound = essential_bound(recs)
    assert bound.branch_count_bound == 4
    assert bound.depth_bound == 3
    assert bound.return_time_bound == 3
    assert set(bound.growing) == {"branch_count", "depth", "return_time"}
    single = essential_bound(recs[:1])
    assert single.branch_count_bound == 2 and single.growing == ()


def test_record_json_round_trip(nest9):
    rec = combinatorics(nest9, 2, cap=fib_cap(3))
    again = record_from_json_dict(record_to_json_dict(rec))
    assert again == rec
