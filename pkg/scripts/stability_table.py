#!/usr/bin/env python3
"""Print measured GDA stability next to its bound on a quadratic saddle, as a plain table."""
import argparse

from primalgap.harness import ExperimentConfig, exp_stability_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    ns, Ts = [50, 100, 200], [5, 10, 20]
    res = exp_stability_scan(ExperimentConfig("stability-scan", trials=args.trials, seed=args.seed,
                                              threads=args.threads, params={"ns": ns, "Ts": Ts}))
    print(f"{'n':>5} {'T':>4} {'eps_hat':>12} {'se':>10} {'bound':>12}")
    for T in Ts:
        for n in ns:
            est = res.aggregates[f"stability_joint[n={n},T={T}]"][0]
            bound = res.aggregates[f"stability_bound[n={n},T={T}]"][0].mean
            print(f"{n:5d} {T:4d} {est.mean:12.5g} {est.std_error:10.2g} {bound:12.5g}")


if __name__ == "__main__":
    main()
