#!/usr/bin/env python3
"""Deterministic surveys that produced the frozen fixture parameter lists.

Two grids are scanned under the same budgets the acceptance suite uses:
a coarse grid over (1.84, 2.0) harvesting chaotic-regime nests, and a fine
grid over (1.905, 1.995) harvesting window cascades.  Parameters whose nest
reaches depth >= 6 are printed with their non-central level counts.
"""

import argparse
import time

from nestgeom.maps import make_map
from nestgeom.nest import build_nest, noncentral_levels
from nestgeom.precision import Precision


def survey(lo: float, hi: float, steps: int, budget_s: float):
    t0 = time.time()
    found = []
    for i in range(1, steps + 1):
        a_text = "%.10f" % (lo + (hi - lo) * i / (steps + 1))
        try:
            nest = build_nest(make_map(a_text, Precision(256)), max_levels=7,
                              orbit_cap=20000, max_bits=1 << 13,
                              renorm_horizon=None)
        except Exception:
            continue
        if nest.depth >= 6:
            found.append((a_text, nest.depth, len(noncentral_levels(nest))))
        if time.time() - t0 > budget_s:
            print(f"# budget reached at grid index {i}")
            break
    return found


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--budget", type=float, default=240.0,
                    help="seconds per grid")
    args = ap.parse_args()
    print("# chaotic-regime survey (1.84, 2.0), 200 points")
    for row in survey(1.84, 2.0, 200, args.budget):
        print(row)
    print("# window-band survey (1.905, 1.995), 256 points")
    for row in survey(1.905, 1.995, 256, args.budget):
        print(row)


if __name__ == "__main__":
    main()
