"""Word-sized modular arithmetic.

Every routine works on unsigned 64-bit words with a machine radix of 2**64.
The scalar kernels (``*_k``) are numba functions inlined into the NTT and
dyadic kernels; the public functions (``add_mod``, ``mul_mod`` ...) accept
Python ints or numpy arrays and broadcast.

A 64x64 -> 128 bit product is treated as one primitive (``mul_wide``); numba
has no native 128-bit integer, so it is assembled from four 32-bit partial
products.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy
from numba import njit, vectorize

from . import config
from .errors import DomainError, ParameterError

u64 = np.uint64

_M32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)

MAX_MODULUS_BITS = 62  # lazy butterflies need p < 2**64 / 4
MAX_HE_MODULUS_BITS = 60  # keeps every residue and mad_mod addend below 2**60


# --------------------------------------------------------------------------
# scalar kernels


@njit(inline="always", cache=True)
def mul_hi_k(a, b):
    a0 = a & _M32
    a1 = a >> _S32
    b0 = b & _M32
    b1 = b >> _S32
    ll = a0 * b0
    hl = a1 * b0
    lh = a0 * b1
    hh = a1 * b1
    cross = (ll >> _S32) + (hl & _M32) + lh
    return hh + (hl >> _S32) + (cross >> _S32)


@njit(inline="always", cache=True)
def mul_wide_k(a, b):
    """Full product as (hi, lo)."""
    return mul_hi_k(a, b), a * b


@njit(inline="always", cache=True)
def add_mod_k(x, y, p):
    s = x + y
    if s >= p:
        s -= p
    return s


@njit(inline="always", cache=True)
def sub_mod_k(x, y, p):
    if x >= y:
        return x - y
    return x + (p - y)


@njit(inline="always", cache=True)
def barrett_reduce_128_k(hi, lo, p, c_hi, c_lo):
    # quotient estimate floor((hi:lo) * floor(2^128/p) / 2^128), exact in the
    # words that matter; it undershoots the true quotient by at most one
    carry = mul_hi_k(lo, c_lo)
    t_hi, t_lo = mul_wide_k(lo, c_hi)
    tmp1 = t_lo + carry
    tmp3 = t_hi + (_ONE if tmp1 < carry else _ZERO)
    t_hi, t_lo = mul_wide_k(hi, c_lo)
    s = tmp1 + t_lo
    carry = t_hi + (_ONE if s < tmp1 else _ZERO)
    q = hi * c_hi + tmp3 + carry
    r = lo - q * p
    if r >= p:
        r -= p
    return r


@njit(inline="always", cache=True)
def barrett_reduce_64_k(x, p, c_hi):
    q = mul_hi_k(x, c_hi)
    r = x - q * p
    if r >= p:
        r -= p
    return r


@njit(inline="always", cache=True)
def mul_mod_k(x, y, p, c_hi, c_lo):
    hi, lo = mul_wide_k(x, y)
    return barrett_reduce_128_k(hi, lo, p, c_hi, c_lo)


@njit(inline="always", cache=True)
def mad_mod_k(a, b, c, p, c_hi, c_lo):
    # a*b + c accumulated in 128 bits, single reduction
    hi, lo = mul_wide_k(a, b)
    s = lo + c
    if s < lo:
        hi += _ONE
    return barrett_reduce_128_k(hi, s, p, c_hi, c_lo)


@njit(inline="always", cache=True)
def mul_shoup_lazy_k(y, w, w_precon, p):
    """w*y mod p in [0, 2p) using the precomputed floor(w * 2^64 / p)."""
    q = mul_hi_k(w_precon, y)
    return w * y - q * p


@njit(inline="always", cache=True)
def mul_shoup_k(y, w, w_precon, p):
    r = mul_shoup_lazy_k(y, w, w_precon, p)
    if r >= p:
        r -= p
    return r


@njit(inline="always", cache=True)
def harvey_butterfly_k(x, y, w, w_precon, p, two_p):
    if x >= two_p:
        x -= two_p
    q = mul_hi_k(w_precon, y)
    t = w * y - q * p
    return x + t, x - t + two_p


@njit(inline="always", cache=True)
def harvey_inv_butterfly_k(x, y, w, w_precon, p, two_p):
    s = x + y
    if s >= two_p:
        s -= two_p
    d = x - y + two_p
    q = mul_hi_k(w_precon, d)
    return s, w * d - q * p


# --------------------------------------------------------------------------
# domain types


def is_prime(p: int) -> bool:
    return bool(sympy.isprime(p))


@dataclass(frozen=True)
class Modulus:
    """An odd prime below 2**62 with its Barrett constant floor(2**128 / p)."""

    p: int
    barrett_hi: int = field(init=False, repr=False)
    barrett_lo: int = field(init=False, repr=False)
    bit_len: int = field(init=False, repr=False)

    def __post_init__(self):
        p = int(self.p)
        if not 2 < p < (1 << MAX_MODULUS_BITS):
            raise ParameterError(f"modulus {p} outside (2, 2^{MAX_MODULUS_BITS})")
        if not is_prime(p):
            raise ParameterError(f"modulus {p} is not prime")
        ratio = (1 << 128) // p
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "barrett_hi", ratio >> 64)
        object.__setattr__(self, "barrett_lo", ratio & 0xFFFFFFFFFFFFFFFF)
        object.__setattr__(self, "bit_len", p.bit_length())

    def __int__(self):
        return self.p

    @property
    def consts(self):
        """(p, c_hi, c_lo) as uint64, the argument triple of the kernels."""
        return u64(self.p), u64(self.barrett_hi), u64(self.barrett_lo)


@dataclass(frozen=True)
class MulOperand:
    """A fixed multiplicand w < p with its Shoup constant floor(w * 2**64 / p)."""

    w: int
    w_precon: int

    @classmethod
    def make(cls, w: int, m: Modulus) -> "MulOperand":
        w = int(w)
        if not 0 <= w < m.p:
            raise ParameterError(f"operand {w} not reduced modulo {m.p}")
        return cls(w, (w << 64) // m.p)


# --------------------------------------------------------------------------
# vectorised entry points


@vectorize(["uint64(uint64, uint64, uint64)"], cache=True)
def _add_mod_v(x, y, p):
    return add_mod_k(x, y, p)


@vectorize(["uint64(uint64, uint64, uint64)"], cache=True)
def _sub_mod_v(x, y, p):
    return sub_mod_k(x, y, p)


@vectorize(["uint64(uint64, uint64, uint64, uint64, uint64)"], cache=True)
def _mul_mod_v(x, y, p, c_hi, c_lo):
    return mul_mod_k(x, y, p, c_hi, c_lo)


@vectorize(["uint64(uint64, uint64, uint64, uint64, uint64, uint64)"], cache=True)
def _mad_mod_v(a, b, c, p, c_hi, c_lo):
    return mad_mod_k(a, b, c, p, c_hi, c_lo)


@vectorize(["uint64(uint64, uint64, uint64, uint64)"], cache=True)
def _mul_shoup_v(y, w, w_precon, p):
    return mul_shoup_k(y, w, w_precon, p)


@vectorize(["uint64(uint64, uint64, uint64)"], cache=True)
def _barrett_reduce_64_v(x, p, c_hi):
    return barrett_reduce_64_k(x, p, c_hi)


@njit(cache=True)
def _harvey_arrays(x, y, w, wp, p, fwd):
    n = x.size
    out_x = np.empty(n, np.uint64)
    out_y = np.empty(n, np.uint64)
    two_p = p + p
    for i in range(n):
        if fwd:
            a, b = harvey_butterfly_k(x[i], y[i], w[i], wp[i], p, two_p)
        else:
            a, b = harvey_inv_butterfly_k(x[i], y[i], w[i], wp[i], p, two_p)
        out_x[i] = a
        out_y[i] = b
    return out_x, out_y


def as_u64(x) -> np.ndarray:
    return np.asarray(x, dtype=np.uint64)


def _ret(r):
    r = np.asarray(r)
    return int(r) if r.ndim == 0 else r


def _require_below(name, x, bound):
    if config.debug() and np.any(as_u64(x) >= np.uint64(bound)):
        raise AssertionError(f"{name} must be < {bound}")


def add_mod(x, y, m: Modulus):
    """(x + y) mod p for x, y < p."""
    _require_below("x", x, m.p)
    _require_below("y", y, m.p)
    return _ret(_add_mod_v(as_u64(x), as_u64(y), u64(m.p)))


def sub_mod(x, y, m: Modulus):
    """(x - y) mod p for x, y < p."""
    _require_below("x", x, m.p)
    _require_below("y", y, m.p)
    return _ret(_sub_mod_v(as_u64(x), as_u64(y), u64(m.p)))


def mul_mod(x, y, m: Modulus):
    """(x * y) mod p via a 128-bit product and Barrett reduction.

    Any x, y < 2**64 are accepted; the estimate needs at most one correction.
    """
    p, hi, lo = m.consts
    return _ret(_mul_mod_v(as_u64(x), as_u64(y), p, hi, lo))


def mad_mod(a, b, c, m: Modulus):
    """(a * b + c) mod p with one reduction of the 128-bit sum."""
    _require_below("a", a, m.p)
    _require_below("b", b, m.p)
    _require_below("c", c, 1 << MAX_HE_MODULUS_BITS)
    p, hi, lo = m.consts
    return _ret(_mad_mod_v(as_u64(a), as_u64(b), as_u64(c), p, hi, lo))


def mul_mod_operand(y, w: MulOperand, m: Modulus):
    """w * y mod p through the Shoup precomputation (y any 64-bit word)."""
    return _ret(_mul_shoup_v(as_u64(y), u64(w.w), u64(w.w_precon), u64(m.p)))


def reduce_mod(x, m: Modulus):
    """x mod p for any 64-bit x."""
    return _ret(_barrett_reduce_64_v(as_u64(x), u64(m.p), u64(m.barrett_hi)))


def _butterfly(x, y, w, m, fwd, bound):
    p = m.p
    _require_below("X", x, bound * p)
    _require_below("Y", y, bound * p)
    if isinstance(w, MulOperand):
        w_arr, wp_arr = w.w, w.w_precon
    else:  # array of MulOperand-compatible (w, w_precon) columns
        w_arr, wp_arr = w
    x, y, w_arr, wp_arr = np.broadcast_arrays(as_u64(x), as_u64(y), as_u64(w_arr), as_u64(wp_arr))
    shape = x.shape
    ox, oy = _harvey_arrays(x.ravel(), y.ravel(), w_arr.ravel(), wp_arr.ravel(), u64(p), fwd)
    return _ret(ox.reshape(shape)), _ret(oy.reshape(shape))


def harvey_butterfly(x, y, w, m: Modulus):
    """Cooley-Tukey butterfly with lazy reduction.

    Inputs in [0, 4p); returns (X', Y') in [0, 4p) with X' = X + W*Y and
    Y' = X - W*Y modulo p. ``w`` is a :class:`MulOperand` or a pair of arrays
    ``(w, w_precon)``.
    """
    return _butterfly(x, y, w, m, True, 4)


def harvey_inv_butterfly(x, y, w, m: Modulus):
    """Gentleman-Sande butterfly: inputs in [0, 2p), returns (X + Y, W*(X - Y)) in [0, 2p)."""
    return _butterfly(x, y, w, m, False, 2)


# --------------------------------------------------------------------------
# table construction helpers (Python ints, off the hot path)


def pow_mod(b: int, e: int, m: Modulus) -> int:
    return pow(int(b), int(e), m.p)


def inv_mod(x: int, m: Modulus) -> int:
    x = int(x) % m.p
    if x == 0:
        raise DomainError(f"0 has no inverse modulo {m.p}")
    return pow(x, -1, m.p)


def find_primitive_2n_root(m: Modulus, n: int) -> int:
    """Smallest primitive 2n-th root of unity modulo p (n a power of two)."""
    p = m.p
    order = 2 * n
    if n < 1 or n & (n - 1):
        raise ParameterError(f"n={n} is not a power of two")
    if (p - 1) % order:
        raise ParameterError(f"{p} != 1 mod {order}: no primitive {order}-th root")
    cofactor = (p - 1) // order
    for g in range(2, p):
        root = pow(g, cofactor, p)
        # order is a power of two, so root^n == -1 certifies order exactly 2n
        if pow(root, n, p) == p - 1:
            break
    else:  # pragma: no cover - unreachable for prime p
        raise ParameterError(f"no primitive {order}-th root modulo {p}")
    # the primitive roots are exactly root^k for odd k
    best = root
    sq = root * root % p
    cur = root
    for _ in range(n - 1):
        cur = cur * sq % p
        if cur < best:
            best = cur
    return best
