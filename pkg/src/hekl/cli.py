"""``hekl`` command line: ntt-bench, he-bench, matmul, density."""

from __future__ import annotations

import json
import sys

import click

from . import bench, config
from .errors import HeklError


def _shape(ctx, param, value):
    if value is None:
        return None
    try:
        dims = tuple(int(x) for x in value.lower().split("x"))
    except ValueError:
        raise click.BadParameter("expected MxNxK, e.g. 10x9x8")
    if len(dims) != 3 or min(dims) < 1:
        raise click.BadParameter("expected three positive dimensions MxNxK")
    return dims


def common(defaults: dict):
    """Shared flags; ``defaults`` sets per-command defaults."""

    def deco(f):
        opts = [
            click.option("--n", "n", type=int, multiple=True, default=defaults["n"], show_default=True,
                         help="Polynomial degree (repeatable where the command sweeps sizes)."),
            click.option("--rns", type=int, default=defaults["rns"], show_default=True,
                         help="RNS size L (number of chain primes)."),
            click.option("--instances", type=int, default=defaults.get("instances", 1), show_default=True),
            click.option("--variant", "variants", multiple=True, default=defaults["variants"],
                         show_default=True, help="naive, naive-unfused, staged2, radix4|8|16[@gap]."),
            click.option("--threads", type=int, default=None, help="Worker threads [env HEKL_THREADS]."),
            click.option("--delta-bits", type=int, default=40, show_default=True),
            click.option("--reps", type=int, default=defaults.get("reps", 5), show_default=True),
            click.option("--warmup", type=int, default=1, show_default=True),
            click.option("--pool/--no-pool", default=True, show_default=True),
            click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
                         show_default=True),
            click.option("--seed", type=int, default=0, show_default=True),
            click.option("--peak-gops", type=float, default=None, help="Machine peak, 1e9 int64 ops/s."),
            click.option("--bandwidth-gbs", type=float, default=None, help="Memory bandwidth, GB/s."),
            click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None),
        ]
        for o in reversed(opts):
            f = o(f)
        return f

    return deco


def _config(command: str, kw: dict, **extra) -> bench.BenchConfig:
    threads = kw.pop("threads") or config.default_threads()
    kw.pop("out")
    kw["n"] = tuple(kw["n"])
    kw["variants"] = tuple(kw["variants"])
    try:
        return bench.BenchConfig(command=command, threads=threads, **kw, **extra)
    except ValueError as e:
        raise click.UsageError(str(e))


def _emit(rows, fmt, out) -> None:
    text = bench.render(rows, fmt)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _finish(ok: bool) -> None:
    if not ok:
        click.echo("correctness gate failed", err=True)
    sys.exit(0 if ok else 1)


def _guard(fn, *args):
    try:
        return fn(*args)
    except HeklError as e:
        raise click.UsageError(str(e))


@click.group()
def main():
    """Batched NTT and RNS-CKKS benchmarks."""


@main.command("ntt-bench")
@common({"n": (4096, 8192, 16384, 32768), "rns": 1, "instances": 16,
         "variants": ("naive", "staged2", "radix8")})
def ntt_bench_cmd(**kw):
    """Time the NTT variant ladder on batches of random polynomials."""
    out = kw["out"]
    cfg = _config("ntt-bench", kw)
    rows, ok = _guard(bench.ntt_bench, cfg)
    _emit(rows, cfg.fmt, out)
    _finish(ok)


@main.command("he-bench")
@common({"n": (32768,), "rns": 8, "variants": ("radix8",), "reps": 3})
def he_bench_cmd(**kw):
    """Time MulLin, MulLinRS, SqrLinRS, MulLinRSModSwAdd and Rotate."""
    out = kw["out"]
    cfg = _config("he-bench", kw)
    rows, ok = _guard(bench.he_bench, cfg)
    _emit(rows, cfg.fmt, out)
    _finish(ok)


@main.command("matmul")
@common({"n": (8192,), "rns": 2, "variants": ("radix8",), "reps": 1})
@click.option("--shape", callback=_shape, default="10x9x8", show_default=True,
              help="MxNxK: C(MxK) += A(MxN) * B(NxK).")
@click.option("--pool-stats", is_flag=True, help="Print buffer pool counters as JSON on stderr.")
def matmul_cmd(shape, pool_stats, **kw):
    """Encrypted element-wise polynomial matrix multiply, verified against plaintext."""
    out = kw["out"]
    cfg = _config("matmul", kw, shape=shape)
    rows, ok, stats = _guard(bench.matmul_bench, cfg)
    _emit(rows, cfg.fmt, out)
    if pool_stats:
        click.echo(json.dumps(stats), err=True)
    _finish(ok)


@main.command("density")
@common({"n": (1024, 4096, 32768), "rns": 1,
         "variants": ("naive", "staged2", "radix4", "radix8", "radix16")})
def density_cmd(**kw):
    """Operational density and roofline verdict per variant and size."""
    out = kw["out"]
    if kw["peak_gops"] is None or kw["bandwidth_gbs"] is None:
        raise click.UsageError("density needs --peak-gops and --bandwidth-gbs")
    cfg = _config("density", kw)
    rows, ok = _guard(bench.density_bench, cfg)
    _emit(rows, cfg.fmt, out)
    _finish(ok)


if __name__ == "__main__":
    main()
