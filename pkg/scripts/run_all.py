#!/usr/bin/env python3
"""Run every named experiment with its default settings and report the checks.

    python3 scripts/run_all.py --out results --threads 4
"""
import argparse
import sys
import time

from primalgap.harness import EXPERIMENTS, ExperimentConfig, run_experiment


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--only", nargs="*", choices=sorted(EXPERIMENTS), help="subset of experiments")
    args = ap.parse_args(argv)

    failed = []
    for name in args.only or EXPERIMENTS:
        t0 = time.perf_counter()
        cfg = ExperimentConfig(experiment=name, seed=args.seed, threads=args.threads, out=args.out)
        result, paths = run_experiment(cfg)
        bad = [k for k, ok in result.checks.items() if not ok]
        failed += [f"{name}: {k}" for k in bad]
        status = "ok" if not bad else f"{len(bad)} failed"
        print(f"{name:16s} {time.perf_counter() - t0:7.1f}s  checks {status:10s} -> {paths['results']}")
    for line in failed:
        print("FAIL", line)
    return 2 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
