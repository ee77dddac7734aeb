#!/usr/bin/env python3
"""Exploratory upper-bound searches over separable mixtures.

The two-copy target has a known optimum (0 bits) and serves as the
convergence control; the three-copy target has no known optimal separable
state, so its values are logged, never asserted.  One JSON line per run.

Usage: python scripts/explore_er_search.py [--seeds 0 1 2] [--budget 8000]
"""

import argparse
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from belldistill import er_search  # noqa: E402


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    parser.add_argument("--budget", type=int, default=8000)
    parser.add_argument("--restarts", type=int, default=10)
    args = parser.parse_args()

    for n in (2, 3):
        for seed in args.seeds:
            t0 = time.perf_counter()
            report = er_search(n, restarts=args.restarts, budget=args.budget,
                               seed=seed)
            line = report.to_dict()
            line["wall_time_s"] = round(time.perf_counter() - t0, 2)
            print(json.dumps(line, sort_keys=True), flush=True)


if __name__ == "__main__":
    main()
