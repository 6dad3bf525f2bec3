"""Negacyclic NTT over a single word-sized prime, with a ladder of kernels.

Layout and conventions
----------------------
* Forward transforms are Cooley-Tukey (natural order in, bit-reversed out),
  inverse transforms Gentleman-Sande (bit-reversed in, natural out).
* Powers of the 2N-th root psi are folded into the twiddle tables, so no
  separate psi pre-scaling or psi^-1 post-scaling pass exists; N^-1 is folded
  into the last inverse round.
* Forward output position i holds a(psi^(2*brv(i) + 1)).

Kernel ladder
-------------
``Naive``      one radix-2 round per pass over the whole batch (global memory
               traffic of 2N elements per round).
``Staged2``    radix-2 rounds through global memory while the butterfly gap is
               larger than ``block_gap``; the remaining rounds run block by
               block in a scratch buffer of 2*gap elements (the stand-in for
               GPU shared local memory) with the final reduction fused in.
``HighRadix``  like ``Staged2`` but every pass is a radix-4/8/16 kernel that
               keeps its elements in locals across 2/3/4 internal rounds.
               Radix-16 works out of a small scratch array instead of named
               locals (too many live values), the analogue of a register
               spill.

Every kernel updates a counter vector (butterflies, ALU ops by the per
work-item radix costs, global element loads+stores, rounds) while it runs;
:class:`KernelProfile` accumulates those counters.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence, Union

import numpy as np
from numba import njit

from . import config
from .errors import ParameterError
from .modarith import (
    Modulus,
    MulOperand,
    _mad_mod_v,
    _mul_mod_v,
    as_u64,
    find_primitive_2n_root,
    harvey_butterfly_k,
    harvey_inv_butterfly_k,
    inv_mod,
    mul_shoup_k,
)

DEFAULT_BLOCK_GAP = 4096  # 64 KiB of int64 scratch holds 2 * 4096 elements

# 64-bit integer ALU ops per work-item per radix round, indexed by log2(radix)
RADIX_OPS = np.array([0, 48, 157, 456, 1156], dtype=np.int64)
RADIX_OTHER_OPS = np.array([0, 20, 45, 120, 260], dtype=np.int64)
RADIX_BUTTERFLY_OPS = RADIX_OPS - RADIX_OTHER_OPS


def bit_reverse(i: int, bits: int) -> int:
    return int(format(i, f"0{bits}b")[::-1], 2) if bits else 0


def bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n, dtype=np.int64)
    out = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        out |= ((idx >> b) & 1) << (bits - 1 - b)
    return out


def _check_pow2(n: int, what: str = "n") -> int:
    n = int(n)
    if n < 2 or n & (n - 1):
        raise ParameterError(f"{what}={n} must be a power of two >= 2")
    return n


# --------------------------------------------------------------------------
# tables


@dataclass(frozen=True, eq=False)
class NttTables:
    """Per-prime twiddle tables for a degree-n negacyclic transform."""

    n: int
    modulus: Modulus
    psi: int
    fwd_w: np.ndarray  # psi^brv(i)
    fwd_precon: np.ndarray
    inv_w: np.ndarray  # psi^-brv(i)
    inv_precon: np.ndarray
    n_inv: MulOperand
    inv_last: MulOperand  # inv_w[1] * n_inv, used by the fused final round

    @property
    def fwd_twiddles(self) -> list[MulOperand]:
        return [MulOperand(int(w), int(q)) for w, q in zip(self.fwd_w, self.fwd_precon)]

    @property
    def inv_twiddles(self) -> list[MulOperand]:
        return [MulOperand(int(w), int(q)) for w, q in zip(self.inv_w, self.inv_precon)]

    @property
    def p(self) -> int:
        return self.modulus.p


def _precon(ws: list[int], p: int) -> np.ndarray:
    return np.array([(w << 64) // p for w in ws], dtype=np.uint64)


@lru_cache(maxsize=256)
def build_tables(n: int, m: Modulus) -> NttTables:
    """Twiddle tables for the minimal primitive 2n-th root modulo ``m.p``."""
    n = _check_pow2(n)
    p = m.p
    if (p - 1) % (2 * n):
        raise ParameterError(f"{p} != 1 mod {2 * n}")
    psi = find_primitive_2n_root(m, n)
    psi_inv = pow(psi, -1, p)
    bits = n.bit_length() - 1
    pw = [1] * n
    ipw = [1] * n
    for i in range(1, n):
        pw[i] = pw[i - 1] * psi % p
        ipw[i] = ipw[i - 1] * psi_inv % p
    rev = bit_reverse_indices(n)
    fwd = [pw[int(r)] for r in rev]
    inv = [ipw[int(r)] for r in rev]
    n_inv = inv_mod(n, m)
    last = inv[1] * n_inv % p if n > 1 else n_inv
    return NttTables(
        n=n,
        modulus=m,
        psi=psi,
        fwd_w=np.array(fwd, dtype=np.uint64),
        fwd_precon=_precon(fwd, p),
        inv_w=np.array(inv, dtype=np.uint64),
        inv_precon=_precon(inv, p),
        n_inv=MulOperand.make(n_inv, m),
        inv_last=MulOperand.make(last, m),
    )


# --------------------------------------------------------------------------
# variants and pass plans


@dataclass(frozen=True)
class Naive:
    """Radix-2, one full-array pass per round.

    With ``fuse_last_round=False`` the [0, 4p) -> [0, p) correction runs as an
    extra pass (2N more global accesses) instead of inside the last round.
    """

    fuse_last_round: bool = True

    @property
    def label(self) -> str:
        return "naive" if self.fuse_last_round else "naive-unfused"

    def fit(self, n: int) -> "Naive":
        return self


@dataclass(frozen=True)
class Staged2:
    block_gap: int = DEFAULT_BLOCK_GAP

    @property
    def label(self) -> str:
        return "staged2"

    def fit(self, n: int) -> "Staged2":
        return Staged2(min(self.block_gap, max(n // 2, 1)))


@dataclass(frozen=True)
class HighRadix:
    radix: int = 8
    block_gap: int = DEFAULT_BLOCK_GAP

    def __post_init__(self):
        if self.radix not in (4, 8, 16):
            raise ParameterError(f"unsupported radix {self.radix}")

    @property
    def label(self) -> str:
        return f"radix{self.radix}"

    def fit(self, n: int) -> "HighRadix":
        return HighRadix(self.radix, min(self.block_gap, max(n // 2, 1)))


NttVariant = Union[Naive, Staged2, HighRadix]


def parse_variant(text: str) -> NttVariant:
    """``naive``, ``naive-unfused``, ``staged2``, ``radix4|8|16``, optional ``@gap``."""
    name, _, gap = text.strip().lower().partition("@")
    kw = {"block_gap": int(gap)} if gap else {}
    if name == "naive":
        return Naive()
    if name == "naive-unfused":
        return Naive(fuse_last_round=False)
    if name == "staged2":
        return Staged2(**kw)
    if name.startswith("radix") and name[5:].isdigit():
        return HighRadix(int(name[5:]), **kw)
    raise ParameterError(f"unknown NTT variant {text!r}")


@dataclass(frozen=True)
class Plan:
    """Pass structure of one transform.

    ``global_passes`` and ``block_passes`` hold log2(radix) of each pass in
    forward order. Block passes run on blocks of ``block_len`` elements.
    """

    n: int
    global_passes: tuple[int, ...]
    block_passes: tuple[int, ...]
    block_len: int
    fused: bool

    @property
    def global_mem_elements(self) -> int:
        """Global loads+stores per transform (twiddles excluded)."""
        passes = len(self.global_passes) + (1 if self.block_passes else 0)
        passes += 0 if self.fused else 1
        return 2 * self.n * passes

    @property
    def alu_ops(self) -> int:
        n = self.n
        return sum((n >> r) * int(RADIX_OPS[r]) for r in self.global_passes + self.block_passes)

    @property
    def butterflies(self) -> int:
        return (self.n // 2) * (sum(self.global_passes) + sum(self.block_passes))


@lru_cache(maxsize=None)
def make_plan(n: int, variant: NttVariant) -> Plan:
    n = _check_pow2(n)
    logn = n.bit_length() - 1
    if isinstance(variant, Naive):
        return Plan(n, (1,) * logn, (), 0, variant.fuse_last_round)
    if isinstance(variant, Staged2):
        rmax = 1
    elif isinstance(variant, HighRadix):
        rmax = variant.radix.bit_length() - 1
    else:
        raise ParameterError(f"unknown variant {variant!r}")
    gap = variant.block_gap
    if gap < 1 or gap & (gap - 1):
        raise ParameterError(f"block_gap={gap} must be a power of two")
    if gap > n // 2:
        raise ParameterError(f"block_gap={gap} too large for n={n} (max {n // 2})")
    t, left = n // 2, logn
    glob: list[int] = []
    while t > gap:
        r = min(rmax, left)
        glob.append(r)
        t >>= r
        left -= r
    blk: list[int] = []
    block_len = 2 * t if left else 0
    while left:
        r = min(rmax, left)
        blk.append(r)
        left -= r
    return Plan(n, tuple(glob), tuple(blk), block_len, True)


# --------------------------------------------------------------------------
# kernels


@njit(inline="always", cache=True)
def _bf(x, y, w, wp, p, two_p, four_p, check):
    if check and (x >= four_p or y >= four_p):
        raise AssertionError("NTT butterfly input outside [0, 4p)")
    return harvey_butterfly_k(x, y, w, wp, p, two_p)


@njit(inline="always", cache=True)
def _ibf(x, y, w, wp, p, two_p, check):
    if check and (x >= two_p or y >= two_p):
        raise AssertionError("inverse butterfly input outside [0, 2p)")
    return harvey_inv_butterfly_k(x, y, w, wp, p, two_p)


@njit(inline="always", cache=True)
def _reduce4(x, p, two_p):
    if x >= two_p:
        x -= two_p
    if x >= p:
        x -= p
    return x


@njit(inline="always", cache=True)
def _r8_unit(x0, x1, x2, x3, x4, x5, x6, x7, w0, q0, w1, q1, w2, q2, w3, q3, w4, q4, w5, q5,
             w6, q6, p, two_p, four_p, check):
    """Three radix-2 rounds on eight register-resident values.

    Twiddles (w, q=precon): w0 for round 1, w1/w2 for round 2, w3..w6 for round 3.
    """
    x0, x4 = _bf(x0, x4, w0, q0, p, two_p, four_p, check)
    x1, x5 = _bf(x1, x5, w0, q0, p, two_p, four_p, check)
    x2, x6 = _bf(x2, x6, w0, q0, p, two_p, four_p, check)
    x3, x7 = _bf(x3, x7, w0, q0, p, two_p, four_p, check)
    x0, x2 = _bf(x0, x2, w1, q1, p, two_p, four_p, check)
    x1, x3 = _bf(x1, x3, w1, q1, p, two_p, four_p, check)
    x4, x6 = _bf(x4, x6, w2, q2, p, two_p, four_p, check)
    x5, x7 = _bf(x5, x7, w2, q2, p, two_p, four_p, check)
    x0, x1 = _bf(x0, x1, w3, q3, p, two_p, four_p, check)
    x2, x3 = _bf(x2, x3, w4, q4, p, two_p, four_p, check)
    x4, x5 = _bf(x4, x5, w5, q5, p, two_p, four_p, check)
    x6, x7 = _bf(x6, x7, w6, q6, p, two_p, four_p, check)
    return x0, x1, x2, x3, x4, x5, x6, x7


@njit(cache=True)
def _radix8_block_round(vals, w, wp, p, check):
    two_p = p + p
    four_p = two_p + two_p
    r = _r8_unit(vals[0], vals[1], vals[2], vals[3], vals[4], vals[5], vals[6], vals[7],
                 w[0], wp[0], w[1], wp[1], w[2], wp[2], w[3], wp[3], w[4], wp[4], w[5], wp[5],
                 w[6], wp[6], p, two_p, four_p, check)
    out = np.empty(8, np.uint64)
    for i in range(8):
        out[i] = r[i]
    return out


@njit(inline="always", cache=True)
def _fwd_pass_r2(x, seg_len, base, n, t, W, Wp, p, final, global_mem, cnt, check):
    two_p = p + p
    four_p = two_p + two_p
    span = 2 * t
    first = n // span + base // span
    for j in range(seg_len // span):
        w = W[first + j]
        wp = Wp[first + j]
        off = j * span
        for k in range(off, off + t):
            a, b = _bf(x[k], x[k + t], w, wp, p, two_p, four_p, check)
            if final:
                a = _reduce4(a, p, two_p)
                b = _reduce4(b, p, two_p)
            x[k] = a
            x[k + t] = b
    units = seg_len // 2
    cnt[0] += units
    cnt[1] += units * RADIX_OPS[1]
    if global_mem:
        cnt[2] += 2 * seg_len


@njit(inline="always", cache=True)
def _fwd_pass_r4(x, seg_len, base, n, t, W, Wp, p, final, global_mem, cnt, check):
    two_p = p + p
    four_p = two_p + two_p
    g = t >> 1
    span = 2 * t
    for j in range(seg_len // span):
        e = base + j * span
        i0 = n // span + e // span
        i1 = n // t + e // t
        w0, q0 = W[i0], Wp[i0]
        w1, q1 = W[i1], Wp[i1]
        w2, q2 = W[i1 + 1], Wp[i1 + 1]
        off = j * span
        for k in range(off, off + g):
            x0 = x[k]
            x1 = x[k + g]
            x2 = x[k + 2 * g]
            x3 = x[k + 3 * g]
            x0, x2 = _bf(x0, x2, w0, q0, p, two_p, four_p, check)
            x1, x3 = _bf(x1, x3, w0, q0, p, two_p, four_p, check)
            x0, x1 = _bf(x0, x1, w1, q1, p, two_p, four_p, check)
            x2, x3 = _bf(x2, x3, w2, q2, p, two_p, four_p, check)
            if final:
                x0 = _reduce4(x0, p, two_p)
                x1 = _reduce4(x1, p, two_p)
                x2 = _reduce4(x2, p, two_p)
                x3 = _reduce4(x3, p, two_p)
            x[k] = x0
            x[k + g] = x1
            x[k + 2 * g] = x2
            x[k + 3 * g] = x3
    units = seg_len // 4
    cnt[0] += units * 4
    cnt[1] += units * RADIX_OPS[2]
    if global_mem:
        cnt[2] += 2 * seg_len


@njit(inline="always", cache=True)
def _fwd_pass_r8(x, seg_len, base, n, t, W, Wp, p, final, global_mem, cnt, check):
    two_p = p + p
    four_p = two_p + two_p
    g = t >> 2  # gap of the third internal round
    span = 2 * t
    for j in range(seg_len // span):
        e = base + j * span
        i0 = n // span + e // span
        i1 = n // t + e // t
        i2 = n // (t >> 1) + e // (t >> 1)
        # twiddles stay in locals for the whole unit group
        w0, q0 = W[i0], Wp[i0]
        w1, q1 = W[i1], Wp[i1]
        w2, q2 = W[i1 + 1], Wp[i1 + 1]
        w3, q3 = W[i2], Wp[i2]
        w4, q4 = W[i2 + 1], Wp[i2 + 1]
        w5, q5 = W[i2 + 2], Wp[i2 + 2]
        w6, q6 = W[i2 + 3], Wp[i2 + 3]
        off = j * span
        for k in range(off, off + g):
            y0, y1, y2, y3, y4, y5, y6, y7 = _r8_unit(
                x[k], x[k + g], x[k + 2 * g], x[k + 3 * g],
                x[k + 4 * g], x[k + 5 * g], x[k + 6 * g], x[k + 7 * g],
                w0, q0, w1, q1, w2, q2, w3, q3, w4, q4, w5, q5, w6, q6,
                p, two_p, four_p, check)
            if final:
                y0 = _reduce4(y0, p, two_p)
                y1 = _reduce4(y1, p, two_p)
                y2 = _reduce4(y2, p, two_p)
                y3 = _reduce4(y3, p, two_p)
                y4 = _reduce4(y4, p, two_p)
                y5 = _reduce4(y5, p, two_p)
                y6 = _reduce4(y6, p, two_p)
                y7 = _reduce4(y7, p, two_p)
            x[k] = y0
            x[k + g] = y1
            x[k + 2 * g] = y2
            x[k + 3 * g] = y3
            x[k + 4 * g] = y4
            x[k + 5 * g] = y5
            x[k + 6 * g] = y6
            x[k + 7 * g] = y7
    units = seg_len // 8
    cnt[0] += units * 12
    cnt[1] += units * RADIX_OPS[3]
    if global_mem:
        cnt[2] += 2 * seg_len


@njit(inline="always", cache=True)
def _fwd_pass_generic(x, seg_len, base, n, t, rlog, W, Wp, p, final, global_mem, cnt, check,
                      regs, tw2, twp2):
    """Radix-2^rlog pass; elements live in the small ``regs`` scratch array."""
    two_p = p + p
    four_p = two_p + two_p
    R = 1 << rlog
    g = t >> (rlog - 1)
    span = 2 * t
    for j in range(seg_len // span):
        e = base + j * span
        for s in range(rlog):
            ts = t >> s
            i0 = n // (2 * ts) + e // (2 * ts)
            for h in range(1 << s):
                tw2[s, h] = W[i0 + h]
                twp2[s, h] = Wp[i0 + h]
        off = j * span
        for k in range(off, off + g):
            for i in range(R):
                regs[i] = x[k + i * g]
            for s in range(rlog):
                half = R >> (s + 1)
                for h in range(1 << s):
                    a0 = 2 * h * half
                    for i in range(a0, a0 + half):
                        regs[i], regs[i + half] = _bf(regs[i], regs[i + half], tw2[s, h],
                                                      twp2[s, h], p, two_p, four_p, check)
            for i in range(R):
                v = regs[i]
                if final:
                    v = _reduce4(v, p, two_p)
                x[k + i * g] = v
    units = seg_len >> rlog
    cnt[0] += units * rlog * (R // 2)
    cnt[1] += units * RADIX_OPS[rlog]
    if global_mem:
        cnt[2] += 2 * seg_len


@njit(inline="always", cache=True)
def _fwd_pass(x, seg_len, base, n, t, rlog, W, Wp, p, final, global_mem, cnt, check,
              regs, tw2, twp2):
    if rlog == 1:
        _fwd_pass_r2(x, seg_len, base, n, t, W, Wp, p, final, global_mem, cnt, check)
    elif rlog == 2:
        _fwd_pass_r4(x, seg_len, base, n, t, W, Wp, p, final, global_mem, cnt, check)
    elif rlog == 3:
        _fwd_pass_r8(x, seg_len, base, n, t, W, Wp, p, final, global_mem, cnt, check)
    else:
        _fwd_pass_generic(x, seg_len, base, n, t, rlog, W, Wp, p, final, global_mem, cnt, check,
                          regs, tw2, twp2)


@njit(nogil=True, cache=True)
def _forward_rows(a, W, Wp, p, gpasses, bpasses, block_len, fused, cnt, check):
    rows, n = a.shape
    two_p = p + p
    regs = np.empty(16, np.uint64)
    tw2 = np.empty((4, 8), np.uint64)
    twp2 = np.empty((4, 8), np.uint64)
    ng = gpasses.size
    nb = bpasses.size
    t = n // 2
    for gi in range(ng):
        r = gpasses[gi]
        final = fused and nb == 0 and gi == ng - 1
        for b in range(rows):
            _fwd_pass(a[b], n, 0, n, t, r, W, Wp, p, final, True, cnt, check,
                      regs, tw2, twp2)
        cnt[3] += r * rows
        t >>= r
    if nb:
        slm = np.empty(block_len, np.uint64)
        for b in range(rows):
            row = a[b]
            for start in range(0, n, block_len):
                for i in range(block_len):
                    slm[i] = row[start + i]
                tt = t
                for bi in range(nb):
                    r = bpasses[bi]
                    _fwd_pass(slm, block_len, start, n, tt, r, W, Wp, p,
                              fused and bi == nb - 1, False, cnt, check,
                              regs, tw2, twp2)
                    tt >>= r
                for i in range(block_len):
                    row[start + i] = slm[i]
                cnt[2] += 2 * block_len
        for bi in range(nb):
            cnt[3] += bpasses[bi] * rows
    if not fused:
        for b in range(rows):
            row = a[b]
            for i in range(n):
                row[i] = _reduce4(row[i], p, two_p)
        cnt[2] += 2 * n * rows


@njit(inline="always", cache=True)
def _inv_pass(x, seg_len, base, n, t, rlog, W, Wp, p, final, lw, lwp, nw, nwp, global_mem, cnt,
              check, regs, tw2, twp2):
    """Gentleman-Sande pass of radix 2^rlog, gaps t, 2t, ... inside the unit.

    With ``final`` the last internal round is the global gap-n/2 round and also
    multiplies by N^-1, leaving fully reduced output.
    """
    two_p = p + p
    R = 1 << rlog
    span = R * t
    for j in range(seg_len // span):
        e = base + j * span
        for s in range(rlog):
            ts = t << s
            i0 = n // (2 * ts) + e // (2 * ts)
            for h in range(R >> (s + 1)):
                tw2[s, h] = W[i0 + h]
                twp2[s, h] = Wp[i0 + h]
        off = j * span
        for k in range(off, off + t):
            for i in range(R):
                regs[i] = x[k + i * t]
            for s in range(rlog):
                gi = 1 << s
                last = final and s == rlog - 1
                for h in range(R >> (s + 1)):
                    a0 = 2 * h * gi
                    for i in range(a0, a0 + gi):
                        u = regs[i]
                        v = regs[i + gi]
                        if last:
                            if check and (u >= two_p or v >= two_p):
                                raise AssertionError("inverse butterfly input outside [0, 2p)")
                            regs[i] = mul_shoup_k(u + v, nw, nwp, p)
                            regs[i + gi] = mul_shoup_k(u - v + two_p, lw, lwp, p)
                        else:
                            regs[i], regs[i + gi] = _ibf(u, v, tw2[s, h], twp2[s, h], p, two_p,
                                                         check)
            for i in range(R):
                x[k + i * t] = regs[i]
    units = seg_len >> rlog
    cnt[0] += units * rlog * (R // 2)
    cnt[1] += units * RADIX_OPS[rlog]
    if global_mem:
        cnt[2] += 2 * seg_len


@njit(inline="always", cache=True)
def _inv_last(u, v, lw, lwp, nw, nwp, p, two_p, check):
    if check and (u >= two_p or v >= two_p):
        raise AssertionError("inverse butterfly input outside [0, 2p)")
    return mul_shoup_k(u + v, nw, nwp, p), mul_shoup_k(u - v + two_p, lw, lwp, p)


@njit(inline="always", cache=True)
def _inv_pass_r2(x, seg_len, base, n, t, W, Wp, p, final, lw, lwp, nw, nwp, global_mem, cnt,
                 check):
    two_p = p + p
    span = 2 * t
    first = n // span + base // span
    for j in range(seg_len // span):
        w = W[first + j]
        wp = Wp[first + j]
        off = j * span
        if final:
            for k in range(off, off + t):
                x[k], x[k + t] = _inv_last(x[k], x[k + t], lw, lwp, nw, nwp, p, two_p, check)
        else:
            for k in range(off, off + t):
                x[k], x[k + t] = _ibf(x[k], x[k + t], w, wp, p, two_p, check)
    units = seg_len // 2
    cnt[0] += units
    cnt[1] += units * RADIX_OPS[1]
    if global_mem:
        cnt[2] += 2 * seg_len


@njit(inline="always", cache=True)
def _inv_pass_r4(x, seg_len, base, n, t, W, Wp, p, final, lw, lwp, nw, nwp, global_mem, cnt,
                 check):
    two_p = p + p
    span = 4 * t
    for j in range(seg_len // span):
        e = base + j * span
        i0 = n // (2 * t) + e // (2 * t)
        i1 = n // span + e // span
        w0, q0 = W[i0], Wp[i0]
        w1, q1 = W[i0 + 1], Wp[i0 + 1]
        w2, q2 = W[i1], Wp[i1]
        off = j * span
        for k in range(off, off + t):
            x0 = x[k]
            x1 = x[k + t]
            x2 = x[k + 2 * t]
            x3 = x[k + 3 * t]
            x0, x1 = _ibf(x0, x1, w0, q0, p, two_p, check)
            x2, x3 = _ibf(x2, x3, w1, q1, p, two_p, check)
            if final:
                x0, x2 = _inv_last(x0, x2, lw, lwp, nw, nwp, p, two_p, check)
                x1, x3 = _inv_last(x1, x3, lw, lwp, nw, nwp, p, two_p, check)
            else:
                x0, x2 = _ibf(x0, x2, w2, q2, p, two_p, check)
                x1, x3 = _ibf(x1, x3, w2, q2, p, two_p, check)
            x[k] = x0
            x[k + t] = x1
            x[k + 2 * t] = x2
            x[k + 3 * t] = x3
    units = seg_len // 4
    cnt[0] += units * 4
    cnt[1] += units * RADIX_OPS[2]
    if global_mem:
        cnt[2] += 2 * seg_len


@njit(inline="always", cache=True)
def _inv_pass_r8(x, seg_len, base, n, t, W, Wp, p, final, lw, lwp, nw, nwp, global_mem, cnt,
                 check):
    two_p = p + p
    span = 8 * t
    for j in range(seg_len // span):
        e = base + j * span
        i0 = n // (2 * t) + e // (2 * t)
        i1 = n // (4 * t) + e // (4 * t)
        i2 = n // span + e // span
        w0, q0 = W[i0], Wp[i0]
        w1, q1 = W[i0 + 1], Wp[i0 + 1]
        w2, q2 = W[i0 + 2], Wp[i0 + 2]
        w3, q3 = W[i0 + 3], Wp[i0 + 3]
        w4, q4 = W[i1], Wp[i1]
        w5, q5 = W[i1 + 1], Wp[i1 + 1]
        w6, q6 = W[i2], Wp[i2]
        off = j * span
        for k in range(off, off + t):
            x0 = x[k]
            x1 = x[k + t]
            x2 = x[k + 2 * t]
            x3 = x[k + 3 * t]
            x4 = x[k + 4 * t]
            x5 = x[k + 5 * t]
            x6 = x[k + 6 * t]
            x7 = x[k + 7 * t]
            x0, x1 = _ibf(x0, x1, w0, q0, p, two_p, check)
            x2, x3 = _ibf(x2, x3, w1, q1, p, two_p, check)
            x4, x5 = _ibf(x4, x5, w2, q2, p, two_p, check)
            x6, x7 = _ibf(x6, x7, w3, q3, p, two_p, check)
            x0, x2 = _ibf(x0, x2, w4, q4, p, two_p, check)
            x1, x3 = _ibf(x1, x3, w4, q4, p, two_p, check)
            x4, x6 = _ibf(x4, x6, w5, q5, p, two_p, check)
            x5, x7 = _ibf(x5, x7, w5, q5, p, two_p, check)
            if final:
                x0, x4 = _inv_last(x0, x4, lw, lwp, nw, nwp, p, two_p, check)
                x1, x5 = _inv_last(x1, x5, lw, lwp, nw, nwp, p, two_p, check)
                x2, x6 = _inv_last(x2, x6, lw, lwp, nw, nwp, p, two_p, check)
                x3, x7 = _inv_last(x3, x7, lw, lwp, nw, nwp, p, two_p, check)
            else:
                x0, x4 = _ibf(x0, x4, w6, q6, p, two_p, check)
                x1, x5 = _ibf(x1, x5, w6, q6, p, two_p, check)
                x2, x6 = _ibf(x2, x6, w6, q6, p, two_p, check)
                x3, x7 = _ibf(x3, x7, w6, q6, p, two_p, check)
            x[k] = x0
            x[k + t] = x1
            x[k + 2 * t] = x2
            x[k + 3 * t] = x3
            x[k + 4 * t] = x4
            x[k + 5 * t] = x5
            x[k + 6 * t] = x6
            x[k + 7 * t] = x7
    units = seg_len // 8
    cnt[0] += units * 12
    cnt[1] += units * RADIX_OPS[3]
    if global_mem:
        cnt[2] += 2 * seg_len


@njit(inline="always", cache=True)
def _inv_dispatch(x, seg_len, base, n, t, rlog, W, Wp, p, final, lw, lwp, nw, nwp, global_mem,
                  cnt, check, regs, tw2, twp2):
    if rlog == 1:
        _inv_pass_r2(x, seg_len, base, n, t, W, Wp, p, final, lw, lwp, nw, nwp, global_mem, cnt,
                     check)
    elif rlog == 2:
        _inv_pass_r4(x, seg_len, base, n, t, W, Wp, p, final, lw, lwp, nw, nwp, global_mem, cnt,
                     check)
    elif rlog == 3:
        _inv_pass_r8(x, seg_len, base, n, t, W, Wp, p, final, lw, lwp, nw, nwp, global_mem, cnt,
                     check)
    else:
        _inv_pass(x, seg_len, base, n, t, rlog, W, Wp, p, final, lw, lwp, nw, nwp, global_mem,
                  cnt, check, regs, tw2, twp2)


@njit(nogil=True, cache=True)
def _inverse_rows(a, W, Wp, p, gpasses, bpasses, block_len, lw, lwp, nw, nwp, cnt, check):
    """Passes are given in forward order and executed in reverse."""
    rows, n = a.shape
    regs = np.empty(16, np.uint64)
    tw2 = np.empty((4, 8), np.uint64)
    twp2 = np.empty((4, 8), np.uint64)
    ng = gpasses.size
    nb = bpasses.size
    if nb:
        slm = np.empty(block_len, np.uint64)
        for b in range(rows):
            row = a[b]
            for start in range(0, n, block_len):
                for i in range(block_len):
                    slm[i] = row[start + i]
                tt = 1
                for bi in range(nb - 1, -1, -1):
                    r = bpasses[bi]
                    _inv_dispatch(slm, block_len, start, n, tt, r, W, Wp, p, ng == 0 and bi == 0,
                              lw, lwp, nw, nwp, False, cnt, check, regs, tw2, twp2)
                    tt <<= r
                for i in range(block_len):
                    row[start + i] = slm[i]
                cnt[2] += 2 * block_len
        for bi in range(nb):
            cnt[3] += bpasses[bi] * rows
    t = block_len if nb else 1
    for gi in range(ng - 1, -1, -1):
        r = gpasses[gi]
        for b in range(rows):
            _inv_dispatch(a[b], n, 0, n, t, r, W, Wp, p, gi == 0, lw, lwp, nw, nwp, True, cnt, check,
                      regs, tw2, twp2)
        cnt[3] += r * rows
        t <<= r


# --------------------------------------------------------------------------
# profiling


@dataclass
class KernelProfile:
    """Counters accumulated by the NTT kernels.

    ``alu_ops`` follows the per work-item radix costs (48/157/456/1156 for
    radix 2/4/8/16); ``mem_elements`` counts loads plus stores of the
    transformed array outside cache-resident blocks, twiddles excluded.
    """

    butterflies: int = 0
    alu_ops: int = 0
    mem_elements: int = 0
    rounds: int = 0
    transforms: int = 0

    def reset(self) -> None:
        self.butterflies = self.alu_ops = self.mem_elements = self.rounds = self.transforms = 0

    def add_counts(self, cnt: np.ndarray, transforms: int) -> None:
        self.butterflies += int(cnt[0])
        self.alu_ops += int(cnt[1])
        self.mem_elements += int(cnt[2])
        self.rounds += int(cnt[3])
        self.transforms += transforms

    @property
    def mem_bytes(self) -> int:
        return 8 * self.mem_elements


class NttClock:
    """Wall time spent inside transforms, for NTT-share reporting."""

    def __init__(self):
        self.seconds = 0.0
        self.calls = 0

    def reset(self) -> None:
        self.seconds = 0.0
        self.calls = 0


ntt_clock = NttClock()


# --------------------------------------------------------------------------
# public transforms


def _rows_view(a: np.ndarray, n: int) -> np.ndarray:
    if a.dtype != np.uint64:
        raise ParameterError(f"NTT input must be uint64, got {a.dtype}")
    if a.shape[-1] != n:
        raise ParameterError(f"length {a.shape[-1]} does not match tables for n={n}")
    return a


def _run(a2: np.ndarray, t: NttTables, variant: NttVariant, inverse: bool) -> np.ndarray:
    plan = make_plan(t.n, variant)
    cnt = np.zeros(4, dtype=np.int64)
    check = config.debug()
    p = np.uint64(t.p)
    g = np.array(plan.global_passes, dtype=np.int64)
    b = np.array(plan.block_passes, dtype=np.int64)
    if inverse:
        _inverse_rows(a2, t.inv_w, t.inv_precon, p, g, b, plan.block_len,
                      np.uint64(t.inv_last.w), np.uint64(t.inv_last.w_precon),
                      np.uint64(t.n_inv.w), np.uint64(t.n_inv.w_precon), cnt, check)
    else:
        _forward_rows(a2, t.fwd_w, t.fwd_precon, p, g, b, plan.block_len, plan.fused, cnt, check)
    return cnt


def _precheck(a: np.ndarray, bound: int) -> None:
    if config.debug() and a.size and int(a.max()) >= bound:
        raise AssertionError(f"NTT input not reduced below {bound}")


def _transform(poly, t, variant, profile, inverse):
    a = _rows_view(poly, t.n)
    if a.ndim != 1:
        raise ParameterError("forward_ntt/inverse_ntt take a single polynomial; use batch_transform")
    _precheck(a, (2 if inverse else 4) * t.p)
    t0 = time.perf_counter()
    cnt = _run(a.reshape(1, -1), t, variant, inverse)
    ntt_clock.seconds += time.perf_counter() - t0
    ntt_clock.calls += 1
    if profile is not None:
        profile.add_counts(cnt, 1)
    return poly


def forward_ntt(poly: np.ndarray, t: NttTables, variant: NttVariant = Naive(),
                profile: KernelProfile | None = None) -> np.ndarray:
    """In-place negacyclic NTT; output bit-reversed and fully reduced to [0, p)."""
    return _transform(poly, t, variant, profile, False)


def inverse_ntt(poly: np.ndarray, t: NttTables, variant: NttVariant = Naive(),
                profile: KernelProfile | None = None) -> np.ndarray:
    """In-place inverse of :func:`forward_ntt`, including the N^-1 scaling."""
    return _transform(poly, t, variant, profile, True)


def batch_transform(polys: np.ndarray, tables: Sequence[NttTables], variant: NttVariant = Naive(),
                    threads: int = 1, profile: KernelProfile | None = None,
                    inverse: bool = False) -> np.ndarray:
    """Transform every row of an (..., L, N) array in place; row i uses ``tables[i]``.

    Rows are independent work units: each prime's rows are split into chunks
    and chunks are spread over ``threads`` workers. The kernels release the
    GIL, and results do not depend on the thread count.
    """
    L = len(tables)
    if polys.ndim < 2 or polys.shape[-2] != L:
        raise ParameterError(f"expected (..., {L}, N) array, got shape {polys.shape}")
    n = tables[0].n
    _rows_view(polys, n)
    if not polys.flags.c_contiguous:
        raise ParameterError("batch_transform needs a C-contiguous array")
    flat = polys.reshape(-1, L, n)
    M = flat.shape[0]
    threads = max(1, int(threads))
    chunk = math.ceil(M / math.ceil(threads / L)) if threads > L else M
    units = [(i, s) for i in range(L) for s in range(0, M, chunk)]
    if config.debug():
        for i, t in enumerate(tables):
            _precheck(flat[:, i, :], (2 if inverse else 4) * t.p)

    def work(unit):
        i, s = unit
        return _run(flat[s:s + chunk, i, :], tables[i], variant, inverse)

    t0 = time.perf_counter()
    if threads > 1 and len(units) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            counts = list(ex.map(work, units))
    else:
        counts = [work(u) for u in units]
    ntt_clock.seconds += time.perf_counter() - t0
    ntt_clock.calls += 1
    if profile is not None:
        profile.add_counts(np.sum(counts, axis=0), M * L)
    return polys


def radix8_block_round(values, twiddles: Sequence[MulOperand], m: Modulus) -> np.ndarray:
    """One register-resident radix-8 kernel invocation.

    ``values`` are the eight elements x[k + i*gap]; ``twiddles`` are the seven
    operands in order [round 1, round 2 lower/upper, round 3 x4]. Pairings are
    (i, i+4), then (0,2),(1,3),(4,6),(5,7), then consecutive pairs. Output is
    lazily reduced, in [0, 4p).
    """
    if len(twiddles) != 7:
        raise ParameterError("radix-8 kernel needs 7 twiddles")
    w = np.array([tw.w for tw in twiddles], dtype=np.uint64)
    wp = np.array([tw.w_precon for tw in twiddles], dtype=np.uint64)
    return _radix8_block_round(as_u64(values), w, wp, np.uint64(m.p), config.debug())


# --------------------------------------------------------------------------
# pointwise products


def _moduli(mods, ndim: int):
    if isinstance(mods, (NttTables, Modulus)):
        mods = [mods]
    ms = [m.modulus if isinstance(m, NttTables) else m for m in mods]
    shape = (len(ms),) + (1,) * (ndim - 1) if len(ms) > 1 else ()
    p = np.array([m.p for m in ms], dtype=np.uint64).reshape(shape or (-1,))
    hi = np.array([m.barrett_hi for m in ms], dtype=np.uint64).reshape(shape or (-1,))
    lo = np.array([m.barrett_lo for m in ms], dtype=np.uint64).reshape(shape or (-1,))
    if not shape:
        p, hi, lo = p[0], hi[0], lo[0]
    return p, hi, lo


def _same_shape(*arrays):
    shapes = {a.shape for a in arrays}
    if len(shapes) != 1:
        raise ParameterError(f"operand shapes differ: {sorted(shapes)}")


def dyadic_mul(a: np.ndarray, b: np.ndarray, t, out: np.ndarray | None = None) -> np.ndarray:
    """Element-wise product mod p. ``t`` is one table/modulus, or one per leading row
    of an (L, N) operand."""
    _same_shape(a, b)
    p, hi, lo = _moduli(t, a.ndim)
    return _mul_mod_v(a, b, p, hi, lo, out=out) if out is not None else _mul_mod_v(a, b, p, hi, lo)


def dyadic_mad(acc: np.ndarray, a: np.ndarray, b: np.ndarray, t,
               out: np.ndarray | None = None) -> np.ndarray:
    """acc + a*b element-wise, one modular reduction per element (mad_mod)."""
    _same_shape(acc, a, b)
    p, hi, lo = _moduli(t, a.ndim)
    if out is None:
        return _mad_mod_v(a, b, acc, p, hi, lo)
    return _mad_mod_v(a, b, acc, p, hi, lo, out=out)


def negacyclic_poly_mul(a: np.ndarray, b: np.ndarray, t: NttTables,
                        variant: NttVariant = Naive()) -> np.ndarray:
    """a * b mod (x^N + 1, p) through forward NTTs, a dyadic product and an inverse NTT."""
    if a.shape != (t.n,) or b.shape != (t.n,):
        raise ParameterError(f"operands must have shape ({t.n},)")
    fa = forward_ntt(as_u64(a).copy(), t, variant)
    fb = forward_ntt(as_u64(b).copy(), t, variant)
    c = dyadic_mul(fa, fb, t)
    return inverse_ntt(c, t, variant)
