#!/usr/bin/env python3
"""Run the synthetic coverage study and write CSV/JSON result tables.

Full scale (500 replications, 5000 draws per fit) takes a while; pass
--desk for the fast desk-scale configuration (200 replications, 1000
draws) used by the acceptance suite.
"""

import argparse
import sys
import time

from chainuq.benchmark import run_coverage_experiment


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pi", default="0.85,0.13,0.02")
    parser.add_argument("--beta-grid", default="0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8")
    parser.add_argument("--iterations", type=int, default=1000)
    parser.add_argument("--replications", type=int, default=500)
    parser.add_argument("--draws", type=int, default=5000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--desk", action="store_true",
                        help="desk-scale run: 200 replications, 1000 draws")
    parser.add_argument("--out", default="coverage_study",
                        help="output prefix; writes <prefix>.csv and <prefix>.json")
    args = parser.parse_args()

    replications = 200 if args.desk else args.replications
    draws = 1000 if args.desk else args.draws
    pi = [float(v) for v in args.pi.split(",")]
    betas = [float(v) for v in args.beta_grid.split(",")]

    start = time.perf_counter()
    result = run_coverage_experiment(
        pi, betas,
        iterations=args.iterations,
        replications=replications,
        n_draws=draws,
        seed=args.seed,
        progress=lambda msg: print(msg, file=sys.stderr),
    )
    elapsed = time.perf_counter() - start

    with open(f"{args.out}.csv", "w", encoding="utf-8") as fh:
        fh.write(result.to_csv())
    with open(f"{args.out}.json", "w", encoding="utf-8") as fh:
        fh.write(result.to_json())
    print(f"finished in {elapsed:.1f}s; wrote {args.out}.csv and {args.out}.json",
          file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
