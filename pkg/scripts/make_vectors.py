"""Write a CKKS test-vector file and optionally check it against this build."""

import argparse
import sys

from hekl import testvectors as tv


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out")
    ap.add_argument("--n", type=int, default=8192)
    ap.add_argument("--levels", type=int, default=4)
    ap.add_argument("--delta-bits", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args(argv)
    doc = tv.generate(args.n, args.levels, args.delta_bits, args.seed)
    tv.dump(doc, args.out)
    if not args.check:
        return 0
    results = tv.run(tv.load(args.out))
    for r in results:
        name = r.routine + (f"({r.step})" if r.step is not None else "")
        print(f"{name:<20} max err {r.max_error:.2e}  tol {r.tolerance:g}  {'ok' if r.ok else 'FAIL'}")
    return 0 if all(r.ok for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
