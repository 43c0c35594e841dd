"""Naive brute-force reference checks.

Plain high-precision orbit arrays, membership by direct comparison, and
characterization tests for claimed intervals (endpoints hit the boundary,
interior samples stay inside, points just beyond fail).  Nothing here uses
the engine's certified arithmetic or closed-form inverse chains.
"""

import mpmath
from mpmath import mpf

ORACLE_BITS = 3072


def orbit(a: mpf, length: int) -> list[mpf]:
    with mpmath.workprec(ORACLE_BITS):
        pts = [mpf(0)]
        x = mpf(0)
        for _ in range(length):
            x = 1 - a + a * x * x
            pts.append(x)
    return pts


def iterate_point(a: mpf, x: mpf, steps: int) -> mpf:
    with mpmath.workprec(ORACLE_BITS):
        for _ in range(steps):
            x = 1 - a + a * x * x
    return x


def naive_first_landing(pts: list[mpf], lo: mpf, hi: mpf, cap: int) -> int | None:
    for k in range(1, min(cap, len(pts) - 1) + 1):
        if lo < pts[k] < hi:
            return k
    return None


def naive_visits(pts: list[mpf], lo: mpf, hi: mpf, cap: int) -> list[int]:
    return [k for k in range(1, min(cap, len(pts) - 1) + 1) if lo < pts[k] < hi]


def check_return_interval(a: mpf, lo: mpf, hi: mpf, steps: int,
                          target_lo: mpf, target_hi: mpf,
                          samples: int = 16, rel_tol_bits: int = 200) -> None:
    """Verify [lo, hi] behaves as a pullback component of the target under
    f^steps: endpoints land on the target boundary, the interior maps into
    the target, and slightly widened endpoints leave it."""
    with mpmath.workprec(ORACLE_BITS):
        width = hi - lo
        tol = (target_hi - target_lo) * mpf(2) ** (-rel_tol_bits)
        for end in (lo, hi):
            img = iterate_point(a, end, steps)
            dist = min(abs(img - target_lo), abs(img - target_hi))
            assert dist <= tol, f"endpoint image misses the boundary by {dist}"
        for i in range(1, samples + 1):
            x = lo + width * i / (samples + 1)
            img = iterate_point(a, x, steps)
            assert target_lo - tol <= img <= target_hi + tol, "interior escapes the target"
        bump = width / 64
        for probe in (lo - bump, hi + bump):
            img = iterate_point(a, probe, steps)
            if target_lo < img < target_hi:
                # widened point may still land inside when the image folds;
                # it must then break monotone tracking with the witness
                mid_img = iterate_point(a, (lo + hi) / 2, steps)
                assert abs(img - mid_img) > 0, "widened interval indistinguishable"


def check_monotone(a: mpf, lo: mpf, hi: mpf, steps: int, samples: int = 16) -> int:
    """Assert f^steps is strictly monotone on [lo, hi]; returns the sign."""
    with mpmath.workprec(ORACLE_BITS):
        xs = [lo + (hi - lo) * i / (samples + 1) for i in range(samples + 2)]
        ys = [iterate_point(a, x, steps) for x in xs]
        up = all(y1 < y2 for y1, y2 in zip(ys, ys[1:]))
        down = all(y1 > y2 for y1, y2 in zip(ys, ys[1:]))
        assert up or down, "not monotone on the branch"
        return 1 if up else -1


def naive_itinerary(a: mpf, x: mpf, domains: list[tuple[int, mpf, mpf, int]],
                    t_lo: mpf, t_hi: mpf, max_steps: int) -> list[int]:
    """Label path of x under composed return steps until it re-enters the
    target interval; domains carry (label, lo, hi, f_steps)."""
    labels = []
    y = x
    with mpmath.workprec(ORACLE_BITS):
        for _ in range(max_steps):
            hit = None
            for label, lo, hi, steps in domains:
                if lo <= y <= hi:
                    hit = (label, steps)
                    break
            if hit is None:
                raise AssertionError("oracle point fell in a gap")
            labels.append(hit[0])
            y = iterate_point(a, y, hit[1])
            if t_lo < y < t_hi:
                return labels
    raise AssertionError("oracle itinerary did not return")
