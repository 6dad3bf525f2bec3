"""Model densities next to a roofline for given machine numbers.

Prints, per variant and size, ops/byte, the attainable throughput under the
roofline, and whether the kernel sits left (memory) or right (compute) of the
knee.
"""

import argparse

from hekl.perf import DEFAULT_DENSITY_VARIANTS, MachineParams, density_table


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--peak-gops", type=float, required=True)
    ap.add_argument("--bandwidth-gbs", type=float, required=True)
    ap.add_argument("--log-n", type=int, nargs="+", default=list(range(10, 17)))
    ap.add_argument("--block-gap", type=int, default=None)
    args = ap.parse_args(argv)

    machine = MachineParams.from_cli(args.peak_gops, args.bandwidth_gbs)
    print(f"knee at {machine.knee:.2f} ops/byte")
    print(f"{'variant':<14}{'n':>7}{'ops/byte':>10}{'Gops/s':>10}  bound")
    for rep in density_table([1 << k for k in args.log_n], DEFAULT_DENSITY_VARIANTS, machine,
                             args.block_gap):
        gops = machine.attainable(rep.density) / 1e9
        print(f"{rep.variant:<14}{rep.n:>7}{rep.density:>10.3f}{gops:>10.1f}  {rep.bound.value}")


if __name__ == "__main__":
    main()
