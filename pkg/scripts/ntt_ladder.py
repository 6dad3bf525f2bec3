"""Sweep the NTT kernel ladder over sizes and batch widths; write one CSV."""

import argparse
import sys

from hekl import bench


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--log-n", type=int, nargs="+", default=[12, 13, 14, 15])
    ap.add_argument("--instances", type=int, nargs="+", default=[16, 64])
    ap.add_argument("--rns", type=int, default=1)
    ap.add_argument("--variants", nargs="+",
                    default=["naive", "naive-unfused", "staged2", "radix4", "radix8", "radix16"])
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--out", default="-")
    args = ap.parse_args(argv)

    rows, ok = [], True
    for inst in args.instances:
        cfg = bench.BenchConfig("ntt-bench", n=tuple(1 << k for k in args.log_n), rns=args.rns,
                                instances=inst, variants=tuple(args.variants), threads=args.threads,
                                reps=args.reps)
        r, good = bench.ntt_bench(cfg)
        rows += r
        ok &= good
    text = bench.render(rows, "csv")
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
