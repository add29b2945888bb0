#!/usr/bin/env python3
"""Run the randomized necessity experiments for every violation template.

Each template simulates a construction aimed at one trace condition under
fresh adversary seeds, tabulating how often the violation materializes and
how often a similar normal-form replay exists anyway (expected: never).

Usage: python3 scripts/necessity_sweep.py [--seeds N] [--out FILE]
"""
import argparse
import json
import sys
import time

from robosync.experiments import necessity_experiment
from robosync.scenarios import NECESSITY_TEMPLATES


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=1000)
    parser.add_argument("--templates", nargs="*", default=sorted(NECESSITY_TEMPLATES))
    parser.add_argument("--out", help="write aggregate results as JSON")
    args = parser.parse_args(argv)

    aggregates = {}
    bad = 0
    for template in args.templates:
        t0 = time.perf_counter()
        agg = necessity_experiment(template, args.seeds)
        agg["elapsed_s"] = round(time.perf_counter() - t0, 2)
        aggregates[template] = agg
        print(f"{template:20s} violations {agg['materialized']:5d}/{args.seeds}  "
              f"found {agg['found_given_violation']}  "
              f"inconclusive {agg['inconclusive_given_violation']}  "
              f"clean-found {agg['clean_found']}/{agg['clean']}  "
              f"({agg['elapsed_s']}s)")
        if agg["found_given_violation"]:
            bad += 1
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"schema": 1, "aggregates": aggregates}, fh,
                      sort_keys=True, indent=1)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
