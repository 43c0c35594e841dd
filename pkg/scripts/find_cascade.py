#!/usr/bin/env python3
"""Locate the near-parabolic cascade parameters the fixtures freeze.

``--mode trapped`` finds a parameter just inside the period-3 window near
its tangency edge (endless central cascade, branch fixed point of the given
multiplier); ``--mode escaping`` finds one just outside (finite cascade of
the requested length band).
"""

import argparse
import time

from nestgeom.search import SearchTarget, search_parameter


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--mode", choices=("trapped", "escaping"), default="trapped")
    ap.add_argument("--digits", type=int, default=50)
    ap.add_argument("--multiplier", default="0.9")
    ap.add_argument("--min-run", type=int, default=12)
    ap.add_argument("--max-run", type=int, default=48)
    args = ap.parse_args()

    if args.mode == "trapped":
        target = SearchTarget(kind="near-parabolic", multiplier=args.multiplier)
    else:
        target = SearchTarget(kind="intermittent-cascade",
                              cascade_length=(args.min_run, args.max_run))
    t0 = time.time()
    res = search_parameter(target, digits=args.digits)
    print(f"a* = {res.a_text}")
    print(f"probes = {res.probes}, time = {time.time() - t0:.1f} s")
    for line in res.transcript:
        print("  " + line)


if __name__ == "__main__":
    main()
