"""RNS bookkeeping: NTT-friendly primes, bases, CRT, rescale and modulus switch."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ParameterError, PrimeExhaustionError, StateError
from .modarith import (
    MAX_HE_MODULUS_BITS,
    Modulus,
    _barrett_reduce_64_v,
    _mul_shoup_v,
    _sub_mod_v,
    is_prime,
)
from .ntt import NttTables, build_tables


def generate_primes(n: int, bit_size: int, count: int, *, exclude: Iterable[int] = (),
                    ascending_from: int | None = None) -> list[Modulus]:
    """``count`` distinct primes p = 1 (mod 2n) with exactly ``bit_size`` bits.

    The default search walks down from 2**bit_size, so the result is the
    largest such primes in descending order. ``ascending_from`` walks up from
    that value instead (still within the bit size), which is how scale-sized
    chain primes just above the scale are found.
    """
    if bit_size < 2 or count < 0:
        raise ParameterError(f"bad prime request ({bit_size} bits, count {count})")
    step = 2 * n
    lo, hi = 1 << (bit_size - 1), 1 << bit_size
    skip = {int(x) for x in exclude}
    found: list[Modulus] = []
    if ascending_from is None:
        cand = (hi - 1) - ((hi - 2) % step)  # largest value below 2^bits that is 1 mod 2n
        stride = -step
    else:
        cand = ascending_from + (1 - ascending_from) % step
        stride = step
    while len(found) < count and lo <= cand < hi:
        if cand > 2 and cand not in skip and is_prime(cand):
            found.append(Modulus(cand))
        cand += stride
    if len(found) < count:
        raise PrimeExhaustionError(
            f"only {len(found)} of {count} {bit_size}-bit primes = 1 mod {step} available")
    return found


class Domain(enum.Enum):
    COEFF = "coeff"
    NTT = "ntt"


@dataclass
class RnsPolynomial:
    """Residue rows of one polynomial; row i is reduced modulo the i-th basis prime."""

    rows: np.ndarray  # (level, n) uint64
    domain: Domain = Domain.COEFF

    @property
    def level(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    def copy(self) -> "RnsPolynomial":
        return RnsPolynomial(self.rows.copy(), self.domain)


@dataclass(frozen=True, eq=False)
class RnsBasis:
    """Ciphertext modulus chain q_0..q_{L-1} plus an optional special prime P.

    A polynomial at level l uses the first l primes; rescale drops the last
    active prime.
    """

    n: int
    primes: tuple[Modulus, ...]
    special: Modulus | None = None

    def __post_init__(self):
        ps = [m.p for m in self.primes]
        if not ps:
            raise ParameterError("empty RNS basis")
        all_ps = ps + ([self.special.p] if self.special else [])
        if len(set(all_ps)) != len(all_ps):
            raise ParameterError("RNS primes must be distinct")
        for p in all_ps:
            if (p - 1) % (2 * self.n):
                raise ParameterError(f"{p} != 1 mod {2 * self.n}")
            if p >= 1 << MAX_HE_MODULUS_BITS:
                raise ParameterError(f"{p} exceeds {MAX_HE_MODULUS_BITS} bits")
        if self.special and self.special.p <= max(ps):
            raise ParameterError("special prime must exceed every chain prime")

    @property
    def levels(self) -> int:
        return len(self.primes)

    @cached_property
    def tables(self) -> tuple[NttTables, ...]:
        return tuple(build_tables(self.n, m) for m in self.primes)

    @cached_property
    def special_tables(self) -> NttTables | None:
        return build_tables(self.n, self.special) if self.special else None

    def moduli(self, level: int, with_special: bool = False) -> list[Modulus]:
        ms = list(self.primes[:level])
        if with_special:
            ms.append(self.special)
        return ms

    def product(self, level: int) -> int:
        q = 1
        for m in self.primes[:level]:
            q *= m.p
        return q


# --------------------------------------------------------------------------
# CRT (big integers, test/decoding layer only)


def _as_ints(moduli) -> list[int]:
    return [int(m.p) if isinstance(m, Modulus) else int(m) for m in moduli]


def crt_decompose(x, moduli) -> np.ndarray:
    """Residues of integer(s) ``x`` modulo each prime; shape (L,) + shape(x)."""
    ps = _as_ints(moduli)
    arr = np.asarray(x, dtype=object)
    return np.array([np.asarray(np.mod(arr, p), dtype=object).astype(np.uint64) for p in ps], dtype=np.uint64)


def crt_compose(residues, moduli, centered: bool = False):
    """Unique integer in [0, Q) (or (-Q/2, Q/2] when ``centered``) with the given residues."""
    ps = _as_ints(moduli)
    res = np.asarray(residues)
    if res.shape[0] != len(ps):
        raise ParameterError(f"{res.shape[0]} residue rows for {len(ps)} moduli")
    Q = 1
    for p in ps:
        Q *= p
    flat = res.reshape(len(ps), -1).astype(object)
    total = np.zeros(flat.shape[1], dtype=object)
    for r, p in zip(flat, ps):
        qi = Q // p
        total = total + r * (qi * pow(qi % p, -1, p) % Q)
    total = total % Q
    if centered:
        total = np.where(total > Q // 2, total - Q, total)
    total = total.reshape(res.shape[1:])
    return int(total[()]) if total.ndim == 0 else total


# --------------------------------------------------------------------------
# rescale / modulus switch


def divide_round_by_last(rows: np.ndarray, moduli: Sequence[Modulus]) -> np.ndarray:
    """round(x / p_last) over the remaining primes, for coefficient-domain rows.

    ``rows`` is (k+1, n) with row i modulo ``moduli[i]``; the result is (k, n).
    The last residue is centred before subtraction, which realises rounding to
    nearest rather than flooring.
    """
    k = len(moduli) - 1
    if k < 1 or rows.shape[0] != k + 1:
        raise StateError("need at least two residue rows to drop one")
    last = moduli[-1]
    half = np.uint64(last.p >> 1)
    # (x + half) mod p_last, then subtract half again per prime
    r = rows[-1] + half
    r = np.where(r >= np.uint64(last.p), r - np.uint64(last.p), r)
    out = np.empty((k, rows.shape[1]), dtype=np.uint64)
    for i, m in enumerate(moduli[:-1]):
        p = np.uint64(m.p)
        ri = _barrett_reduce_64_v(r, p, np.uint64(m.barrett_hi))
        ri = _sub_mod_v(ri, np.uint64(last.p >> 1) % p, p)
        diff = _sub_mod_v(rows[i], ri, p)
        inv = pow(last.p % m.p, -1, m.p)
        out[i] = _mul_shoup_v(diff, np.uint64(inv), np.uint64((inv << 64) // m.p), p)
    return out


def rescale_rows(poly: RnsPolynomial, basis: RnsBasis) -> RnsPolynomial:
    """Divide by the last active prime with rounding; level drops by one."""
    if poly.domain is not Domain.COEFF:
        raise StateError("rescale_rows needs coefficient-domain input")
    if poly.level < 2:
        raise StateError("cannot rescale at level 1")
    rows = divide_round_by_last(poly.rows, basis.moduli(poly.level))
    return RnsPolynomial(rows, Domain.COEFF)


def mod_switch_drop_last(poly: RnsPolynomial) -> RnsPolynomial:
    """Drop the last residue row without dividing."""
    if poly.level < 2:
        raise StateError("cannot drop a prime at level 1")
    return RnsPolynomial(poly.rows[:-1].copy(), poly.domain)
