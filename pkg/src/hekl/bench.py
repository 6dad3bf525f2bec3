"""Benchmark drivers behind the CLI: NTT ladder, HE routines, matmul, density.

Every driver returns (rows, ok). A row's timing fields are left empty when
its correctness gate failed, so a failed run never reports a time.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from . import config
from .ckks import ROUTINES, CkksContext, EncryptionParameters
from .ntt import (
    KernelProfile,
    Naive,
    NttVariant,
    batch_transform,
    build_tables,
    forward_ntt,
    ntt_clock,
    parse_variant,
)
from .perf import MachineParams, classify, operational_density
from .pool import BufferPool
from .rns import generate_primes
from .testvectors import oracle

CSV_FIELDS = ("command", "variant", "n", "L", "instances", "threads", "median_ns", "speedup",
              "alu_ops", "mem_bytes", "density", "check")
EXTRA_FIELDS = {
    "ntt-bench": (),
    "he-bench": ("routine", "ntt_share"),
    "matmul": ("shape", "max_error", "pool_allocations", "pool_reuses", "steady_allocations"),
    "density": ("bound", "measured_density"),
}

NTT_PRIME_BITS = 60


@dataclass
class BenchConfig:
    command: str
    n: tuple[int, ...] = (4096, 8192, 16384, 32768)
    rns: int = 1
    instances: int = 16
    variants: tuple[str, ...] = ("naive", "staged2", "radix8")
    threads: int = field(default_factory=config.default_threads)
    delta_bits: int = 40
    reps: int = 5
    warmup: int = 1
    pool: bool = True
    fmt: str = "csv"
    seed: int = 0
    peak_gops: float | None = None
    bandwidth_gbs: float | None = None
    shape: tuple[int, int, int] = (10, 9, 8)
    tolerance: float | None = None

    def __post_init__(self):
        if self.reps < 1 or self.instances < 1 or self.warmup < 0:
            raise ValueError("reps and instances must be >= 1, warmup >= 0")
        if self.command not in EXTRA_FIELDS:
            raise ValueError(f"unknown command {self.command!r}")

    @property
    def machine(self) -> MachineParams | None:
        if self.peak_gops is None or self.bandwidth_gbs is None:
            return None
        return MachineParams.from_cli(self.peak_gops, self.bandwidth_gbs)


def _row(cfg: BenchConfig, **kw) -> dict:
    row = {k: "" for k in CSV_FIELDS + EXTRA_FIELDS[cfg.command]}
    row.update(command=cfg.command, threads=cfg.threads)
    row.update(kw)
    return row


def _median_ns(samples: list[float]) -> int:
    return int(round(statistics.median(samples) * 1e9))


# --------------------------------------------------------------------------
# ntt-bench


def _variant_for(name: str | NttVariant, n: int) -> NttVariant:
    v = parse_variant(name) if isinstance(name, str) else name
    return v.fit(n)


def ntt_bench(cfg: BenchConfig) -> tuple[list[dict], bool]:
    rows, ok_all = [], True
    rng = np.random.default_rng(cfg.seed)
    for n in cfg.n:
        primes = generate_primes(n, NTT_PRIME_BITS, cfg.rns)
        tables = [build_tables(n, m) for m in primes]
        base = np.stack([rng.integers(0, m.p, (cfg.instances, n), dtype=np.uint64) for m in primes], axis=1)
        probe = int(rng.integers(cfg.instances))
        ref = base[probe].copy()
        for i, t in enumerate(tables):
            forward_ntt(ref[i], t, Naive())
        names = list(cfg.variants)
        if "naive" not in names:
            names.insert(0, "__baseline__")
        medians: dict[str, int] = {}
        for name in names:
            v = _variant_for("naive" if name == "__baseline__" else name, n)
            work = np.empty_like(base)
            samples, correct = [], True
            for r in range(cfg.warmup + cfg.reps):
                work[...] = base
                t0 = time.perf_counter()
                batch_transform(work, tables, v, cfg.threads)
                dt = time.perf_counter() - t0
                correct &= bool(np.array_equal(work[probe], ref))
                if r >= cfg.warmup:
                    samples.append(dt)
            prof = KernelProfile()
            one = base[probe, 0].copy()
            forward_ntt(one, tables[0], v, prof)
            rep = classify(prof, cfg.machine, variant=v.label, n=n)
            med = _median_ns(samples)
            medians[v.label] = med
            if name == "__baseline__":
                ok_all &= correct
                continue
            ok_all &= correct
            rows.append(_row(cfg, variant=v.label, n=n, L=cfg.rns, instances=cfg.instances,
                             median_ns=med if correct else "", alu_ops=rep.total_alu_ops,
                             mem_bytes=rep.total_mem_bytes, density=rep.density,
                             check="pass" if correct else "FAIL"))
        for row in rows:
            if row["n"] == n and row["median_ns"] != "":
                row["speedup"] = medians["naive"] / row["median_ns"]
    return rows, ok_all


# --------------------------------------------------------------------------
# he-bench


def he_bench(cfg: BenchConfig) -> tuple[list[dict], bool]:
    n = cfg.n[0]
    tol = cfg.tolerance or 1e-3
    params = EncryptionParameters.create(n, cfg.rns, cfg.delta_bits, seed=cfg.seed)
    rows, ok_all = [], True
    rng = np.random.default_rng(cfg.seed)
    half = n // 2
    z = [rng.uniform(-1, 1, half) + 1j * rng.uniform(-1, 1, half) for _ in range(3)]
    naive_med: dict[str, int] = {}
    for name in cfg.variants:
        v = _variant_for(name, n)
        pool = BufferPool() if cfg.pool else None
        ctx = CkksContext(params, variant=v, pool=pool, threads=cfg.threads)
        keys = ctx.keygen((1,))
        a, b = (ctx.encrypt_vector(x, keys.pk) for x in z[:2])
        q_last = params.basis.primes[a.level - 1].p
        c = ctx.encrypt_vector(z[2], keys.pk, scale=a.scale * b.scale / q_last)
        calls = {
            "MulLin": (lambda: ctx.mul_lin(a, b, keys.evk), [z[0], z[1]], 0),
            "MulLinRS": (lambda: ctx.mul_lin_rs(a, b, keys.evk), [z[0], z[1]], 0),
            "SqrLinRS": (lambda: ctx.sqr_lin_rs(a, keys.evk), [z[0]], 0),
            "MulLinRSModSwAdd": (lambda: ctx.mul_lin_rs_modsw_add(a, b, c, keys.evk), z, 0),
            "Rotate": (lambda: ctx.rotate_routine(a, 1, keys.galois), [z[0]], 1),
        }
        for routine in ROUTINES:
            fn, ins, step = calls[routine]
            out = fn()
            err = float(np.max(np.abs(ctx.decrypt_vector(out, keys.sk) - oracle(routine, ins, step))))
            ctx.release(out)
            correct = err <= tol
            ok_all &= correct
            for _ in range(cfg.warmup):
                ctx.release(fn())
            samples, ntt_secs = [], 0.0
            ctx.profile.reset()
            for _ in range(cfg.reps):
                s0 = ntt_clock.seconds
                t0 = time.perf_counter()
                out = fn()
                samples.append(time.perf_counter() - t0)
                ntt_secs += ntt_clock.seconds - s0
                ctx.release(out)
            med = _median_ns(samples)
            alu = ctx.profile.alu_ops // cfg.reps
            mem = ctx.profile.mem_bytes // cfg.reps
            if v.label == "naive":
                naive_med[routine] = med
            rows.append(_row(cfg, variant=v.label, n=n, L=cfg.rns, instances=1,
                             median_ns=med if correct else "", alu_ops=alu, mem_bytes=mem,
                             density=alu / mem if mem else "", check="pass" if correct else "FAIL",
                             routine=routine, ntt_share=ntt_secs / sum(samples)))
    for row in rows:
        base = naive_med.get(row["routine"])
        if base and row["median_ns"] != "":
            row["speedup"] = base / row["median_ns"]
    return rows, ok_all


# --------------------------------------------------------------------------
# matmul


@dataclass
class MatmulResult:
    seconds: float
    max_error: float


def matmul_inputs(shape, n: int, seed: int):
    m, kk, p = shape
    rng = np.random.default_rng(seed)
    half = n // 2

    def draw(*s):
        return rng.uniform(-1, 1, s + (half,)) + 1j * rng.uniform(-1, 1, s + (half,))

    return draw(m, kk), draw(kk, p), draw(m, p)


def matmul_oracle(A, B, C):
    return C + np.einsum("ikz,kjz->ijz", A, B)


def run_matmul(ctx: CkksContext, keys, A, B, C) -> MatmulResult:
    """C += A*B with every element an encrypted slot vector; timed end to end."""
    m, kk, _ = A.shape
    p = B.shape[1]
    if B.shape[0] != kk or C.shape[:2] != (m, p):
        from .errors import ParameterError
        raise ParameterError(f"shapes {A.shape[:2]} x {B.shape[:2]} -> {C.shape[:2]} do not match")
    delta = ctx.params.delta
    t0 = time.perf_counter()
    ea = [[ctx.encrypt_vector(A[i, k], keys.pk) for k in range(kk)] for i in range(m)]
    eb = [[ctx.encrypt_vector(B[k, j], keys.pk) for j in range(p)] for k in range(kk)]
    out = np.empty(C.shape, dtype=np.complex128)
    for i in range(m):
        for j in range(p):
            ec = ctx.encrypt_vector(C[i, j], keys.pk, scale=delta * delta)
            acc = ctx.zeros_like_product(ec.level, ec.scale)
            for k in range(kk):
                ctx.multiply_accumulate(acc, ea[i][k], eb[k][j])
            ctx.add_inplace(acc, ec)
            res = ctx.relinearize(acc, keys.evk)
            out[i, j] = ctx.decrypt_vector(res, keys.sk)
            ctx.release(ec, acc, res)
    for row in ea + eb:
        ctx.release(*row)
    secs = time.perf_counter() - t0
    err = float(np.max(np.abs(out - matmul_oracle(A, B, C))))
    return MatmulResult(secs, err)


def matmul_bench(cfg: BenchConfig) -> tuple[list[dict], bool, dict]:
    n = cfg.n[0]
    tol = cfg.tolerance or 1e-2
    params = EncryptionParameters.create(n, cfg.rns, cfg.delta_bits, seed=cfg.seed)
    v = _variant_for(cfg.variants[0], n)
    pool = BufferPool() if cfg.pool else None
    ctx = CkksContext(params, variant=v, pool=pool, threads=cfg.threads)
    keys = ctx.keygen(())
    A, B, C = matmul_inputs(cfg.shape, n, cfg.seed)
    for _ in range(cfg.warmup):
        run_matmul(ctx, keys, A, B, C)
    before = pool.stats.allocations if pool else 0
    results = [run_matmul(ctx, keys, A, B, C) for _ in range(cfg.reps)]
    steady = (pool.stats.allocations - before) if pool else ""
    err = max(r.max_error for r in results)
    correct = err <= tol
    stats = pool.stats.as_dict() if pool else {}
    row = _row(cfg, variant=v.label, n=n, L=cfg.rns, instances=int(np.prod(cfg.shape)),
               median_ns=_median_ns([r.seconds for r in results]) if correct else "",
               check="pass" if correct else "FAIL", shape="x".join(map(str, cfg.shape)),
               max_error=err, pool_allocations=stats.get("allocations", ""),
               pool_reuses=stats.get("reuses", ""), steady_allocations=steady)
    return [row], correct, stats


# --------------------------------------------------------------------------
# density


def density_bench(cfg: BenchConfig) -> tuple[list[dict], bool]:
    machine = cfg.machine
    if machine is None:
        raise ValueError("density needs --peak-gops and --bandwidth-gbs")
    rows, ok_all = [], True
    for n in cfg.n:
        t = build_tables(n, generate_primes(n, NTT_PRIME_BITS, 1)[0])
        for name in cfg.variants:
            v = _variant_for(name, n)
            rep = operational_density(v, n, machine=machine)
            prof = KernelProfile()
            forward_ntt(np.zeros(n, dtype=np.uint64), t, v, prof)
            measured = classify(prof, machine, variant=v.label, n=n)
            agree = (measured.total_alu_ops, measured.total_mem_bytes) == (rep.total_alu_ops, rep.total_mem_bytes)
            ok_all &= agree
            rows.append(_row(cfg, variant=v.label, n=n, L=1, instances=1, alu_ops=rep.total_alu_ops,
                             mem_bytes=rep.total_mem_bytes, density=rep.density,
                             check="pass" if agree else "FAIL", bound=rep.bound.value,
                             measured_density=measured.density))
    return rows, ok_all


# --------------------------------------------------------------------------
# output


def render(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    if not rows:
        return ",".join(CSV_FIELDS) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()
