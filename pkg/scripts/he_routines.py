"""Time the five HE routines per NTT variant, with NTT share of the runtime."""

import argparse
import sys

from hekl import bench


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=32768)
    ap.add_argument("--rns", type=int, default=8)
    ap.add_argument("--variants", nargs="+", default=["naive", "radix8"])
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--no-pool", action="store_true")
    args = ap.parse_args(argv)
    cfg = bench.BenchConfig("he-bench", n=(args.n,), rns=args.rns, variants=tuple(args.variants),
                            reps=args.reps, threads=1, pool=not args.no_pool)
    rows, ok = bench.he_bench(cfg)
    for r in rows:
        t = f"{r['median_ns'] / 1e6:9.2f} ms" if r["median_ns"] != "" else "   failed"
        print(f"{r['variant']:<10}{r['routine']:<18}{t}   ntt {r['ntt_share']:.0%}   {r['check']}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
