"""Cosine-similarity RMSE table for dense RP vs structured maps.

Reproduces the benchmark table on synthetic Gaussian points by default; pass
--mnist to run on the first --n images of a local IDX file instead.
"""

import argparse

from tensorproj import (
    EntryDistribution,
    SeedSpec,
    cosine_similarity_rmse,
    gen_synthetic,
    load_mnist,
    make_factory,
)


def parse_args():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--d", type=int, default=10_000)
    p.add_argument("--dims", default=None, help="factorization like 100x100")
    p.add_argument("--k", type=int, default=50)
    p.add_argument("--T", type=int, default=5)
    p.add_argument("--n", type=int, default=None,
                   help="points (default 100 synthetic, 50 with --mnist)")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mnist", default=None, help="path to an IDX image file")
    return p.parse_args()


def main():
    args = parse_args()
    base = SeedSpec(args.seed)
    if args.mnist:
        n = args.n or 50
        points = load_mnist(args.mnist, n)
        d = points.shape[1]
        dims = (28, 28)
    else:
        n = args.n or 100
        d = args.d
        points = gen_synthetic(d, n, base.child(0))
        if args.dims:
            dims = tuple(int(t) for t in args.dims.split("x"))
        else:
            side = int(round(d**0.5))
            if side * side != d:
                raise SystemExit(f"--d {d} is not square; pass --dims")
            dims = (side, side)

    source = args.mnist or f"synthetic d={d}"
    print(f"{source}, n={n}, k={args.k}, {args.reps} replications")
    print(f"{'map':8s} {'mean RMSE':>10s} {'std error':>10s}")
    for i, kind in enumerate(("rp", "trp", "trp_t")):
        layout = (d,) if kind == "rp" else dims
        factory = make_factory(
            kind, layout, args.k, EntryDistribution.gaussian(), args.T, base.child(1).child(i)
        )
        result = cosine_similarity_rmse(points, factory, args.reps)
        print(f"{kind:8s} {result.mean_rmse:10.4f} {result.std_error:10.4f}")


if __name__ == "__main__":
    main()
