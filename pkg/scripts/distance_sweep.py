"""Distance-distortion sweep: how tight does the ratio band get as k grows?

Runs the distance experiment for dense RP, a structured map, and its
5-replicate ensemble, then prints the mean ratio and the 2-standard-deviation
band width per (map, k) cell.  The CSV with every replication goes to --out.
"""

import argparse

import numpy as np

from tensorproj import ExperimentConfig, run_experiment, write_csv


def parse_args():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--d", type=int, default=2500)
    p.add_argument("--dims", default=None, help="factorization like 50x50")
    p.add_argument("--k", default="5,10,25,50,100")
    p.add_argument("--n", type=int, default=20, help="points per replication")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--T", type=int, default=5)
    p.add_argument("--dist", default="gaussian",
                   choices=("gaussian", "sparse", "very_sparse"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="distance_sweep.csv")
    return p.parse_args()


def main():
    args = parse_args()
    if args.dims:
        dims = tuple(int(t) for t in args.dims.split("x"))
    else:
        side = int(round(args.d**0.5))
        if side * side != args.d:
            raise SystemExit(f"--d {args.d} is not square; pass --dims")
        dims = (side, side)
    cfg = ExperimentConfig(
        experiment="distance",
        map_kinds=("rp", "trp", "trp_t"),
        dist_kind=args.dist,
        dims=dims,
        k_sweep=tuple(int(t) for t in args.k.split(",")),
        T=args.T,
        n_points=args.n,
        replications=args.reps,
        base_seed=args.seed,
    )
    records = run_experiment(cfg)
    write_csv(records, args.out)

    print(f"d={cfg.d} dims={dims} n={args.n} reps={args.reps} dist={args.dist}")
    print(f"{'map':8s} {'k':>4s} {'mean ratio':>11s} {'2-sigma band':>13s}")
    for kind in cfg.map_kinds:
        for k in cfg.k_sweep:
            vals = np.array(
                [r.value for r in records if r.map_kind == kind and r.k == k]
            )
            band = 4.0 * float(vals.std(ddof=1))
            print(f"{kind:8s} {k:4d} {vals.mean():11.4f} {band:13.4f}")
    print(f"wrote {len(records)} records to {args.out}")


if __name__ == "__main__":
    main()
