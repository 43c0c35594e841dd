#!/usr/bin/env python3
"""Locate the minimal-recurrence parameter to many digits and print the
verification data that the test fixtures freeze."""

import argparse
import time

from nestgeom.precision import Precision
from nestgeom.search import SearchTarget, search_parameter, verify_fibonacci


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--depth", type=int, default=18)
    ap.add_argument("--digits", type=int, default=60)
    args = ap.parse_args()

    t0 = time.time()
    res = search_parameter(SearchTarget.named("fibonacci", depth=args.depth),
                           digits=args.digits)
    print(f"a* = {res.a_text}")
    print(f"probes = {res.probes}, search time = {time.time() - t0:.1f} s")
    t0 = time.time()
    nest = verify_fibonacci(res.a_text, args.depth, Precision(256))
    print(f"verified depth {nest.depth}, landing times "
          f"{[lv.r for lv in nest.levels]}, verify time = {time.time() - t0:.1f} s")


if __name__ == "__main__":
    main()
