"""RNS-CKKS: keys, encoding, encryption and the evaluation primitives.

Ciphertexts live in the NTT domain; rescale and key switching round-trip
through the coefficient domain. Key switching (relinearisation, rotation)
uses one special prime P and one key component per chain prime: the target
polynomial is split into its residues, each residue is multiplied with its
key component over (q_0..q_l, P), and the sum is divided by P with rounding.

Slots follow the usual power-of-five ordering: slot i is the evaluation at
zeta^(5^i), so ``rotate(c, k)`` shifts the slot vector left by k.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import EncodingOverflowError, ParameterError, StateError
from .modarith import Modulus, _add_mod_v, _barrett_reduce_64_v, _sub_mod_v
from .ntt import (
    HighRadix,
    KernelProfile,
    NttVariant,
    batch_transform,
    bit_reverse_indices,
    dyadic_mad,
    dyadic_mul,
)
from .pool import BufferPool, PooledBuffer
from .rns import Domain, RnsBasis, RnsPolynomial, crt_compose, divide_round_by_last, generate_primes

GALOIS_GENERATOR = 5


# --------------------------------------------------------------------------
# parameters and data objects


@dataclass(frozen=True, eq=False)
class EncryptionParameters:
    n: int
    basis: RnsBasis
    delta: float
    error_sigma: float = 3.2
    seed: int = 0

    def __post_init__(self):
        if self.n < 8 or self.n & (self.n - 1):
            raise ParameterError(f"n={self.n} must be a power of two >= 8")
        if self.basis.n != self.n:
            raise ParameterError("basis degree does not match n")
        if self.basis.special is None:
            raise ParameterError("CKKS needs a special prime for key switching")
        if not 0 < self.delta < min(m.p for m in self.basis.primes):
            raise ParameterError("scale must be positive and below every chain prime")

    @classmethod
    def create(cls, n: int, levels: int, delta_bits: int = 40, *, first_bits: int = 60,
               special_bits: int = 60, error_sigma: float = 3.2, seed: int = 0):
        """Chain of one ``first_bits`` prime and ``levels - 1`` primes just above 2**delta_bits."""
        if first_bits > special_bits:
            raise ParameterError("first prime may not be wider than the special prime")
        special = generate_primes(n, special_bits, 1)[0]
        first = generate_primes(n, first_bits, 1, exclude={special.p})[0]
        mids = generate_primes(n, delta_bits + 1, levels - 1, ascending_from=1 << delta_bits)
        basis = RnsBasis(n, (first, *mids), special)
        return cls(n, basis, float(2 ** delta_bits), error_sigma, seed)

    @property
    def levels(self) -> int:
        return self.basis.levels


@dataclass(eq=False)
class Plaintext:
    poly: RnsPolynomial
    scale: float
    _buf: PooledBuffer | None = field(default=None, repr=False)

    @property
    def level(self) -> int:
        return self.poly.level


@dataclass(eq=False)
class Ciphertext:
    """``data`` is (size, level, n) in the NTT domain."""

    data: np.ndarray
    scale: float
    _buf: PooledBuffer | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.data.shape[0]

    @property
    def level(self) -> int:
        return self.data.shape[1]

    @property
    def n(self) -> int:
        return self.data.shape[2]

    @property
    def polys(self) -> list[RnsPolynomial]:
        return [RnsPolynomial(c, Domain.NTT) for c in self.data]


@dataclass(eq=False)
class SecretKey:
    coeffs: np.ndarray  # ternary, int64
    ntt: np.ndarray  # (L + 1, n): chain primes then P


@dataclass(eq=False)
class PublicKey:
    data: np.ndarray  # (2, L, n): (-a*s + e, a)


@dataclass(eq=False)
class KeySwitchKey:
    """data[i] = (b_i, a_i) over (q_0..q_{L-1}, P) with b_i = -a_i*s + e_i + [i-th gadget]*P*s'."""

    data: np.ndarray  # (L, 2, L + 1, n)
    moduli: tuple[int, ...]

    @property
    def levels(self) -> int:
        return self.data.shape[0]


EvaluationKey = KeySwitchKey


@dataclass(eq=False)
class GaloisKeys:
    keys: dict[int, KeySwitchKey]  # by Galois element


@dataclass(eq=False)
class KeySet:
    sk: SecretKey
    pk: PublicKey
    evk: EvaluationKey
    galois: GaloisKeys


# --------------------------------------------------------------------------
# context


class CkksContext:
    """Owns parameters, the RNG, NTT settings and (optionally) a buffer pool."""

    def __init__(self, params: EncryptionParameters, *, variant: NttVariant | None = None,
                 pool: BufferPool | None = None, threads: int = 1):
        self.params = params
        self.n = params.n
        self.basis = params.basis
        self.rng = np.random.default_rng(params.seed)
        self.variant = (variant or HighRadix(8)).fit(self.n)
        self.pool = pool
        self.threads = threads
        self.profile = KernelProfile()
        self._tables = self.basis.tables + (self.basis.special_tables,)
        self._all_moduli = list(self.basis.primes) + [self.basis.special]

    # ---- small helpers

    @property
    def levels(self) -> int:
        return self.basis.levels

    def _mods(self, level: int, special: bool = False) -> list[Modulus]:
        return self.basis.moduli(level, special)

    def _tabs(self, level: int, special: bool = False):
        t = self._tables[:level]
        return t + (self._tables[-1],) if special else t

    @staticmethod
    def _cols(mods, ndim: int):
        return np.array([m.p for m in mods], dtype=np.uint64).reshape((-1,) + (1,) * (ndim - 1))

    def _ntt(self, arr: np.ndarray, tables, inverse: bool = False) -> np.ndarray:
        return batch_transform(arr, tables, self.variant, self.threads, self.profile, inverse)

    def _alloc(self, shape) -> tuple[np.ndarray, PooledBuffer | None]:
        if self.pool is None:
            return np.empty(shape, dtype=np.uint64), None
        return self.pool.empty(shape)

    @contextlib.contextmanager
    def _scratch(self, shape):
        arr, buf = self._alloc(shape)
        try:
            yield arr
        finally:
            if buf is not None:
                buf.release()

    def _new_ct(self, size: int, level: int, scale: float) -> Ciphertext:
        arr, buf = self._alloc((size, level, self.n))
        return Ciphertext(arr, scale, buf)

    def release(self, *objs) -> None:
        """Return pooled storage of ciphertexts/plaintexts; the objects become unusable."""
        for o in objs:
            buf = getattr(o, "_buf", None)
            if buf is not None:
                o._buf = None
                buf.release()

    def _small_to_rns(self, vals: np.ndarray, mods, out: np.ndarray | None = None) -> np.ndarray:
        vals = np.asarray(vals, dtype=np.int64)
        if out is None:
            out = np.empty((len(mods), vals.shape[-1]), dtype=np.uint64)
        for i, m in enumerate(mods):
            out[i] = np.mod(vals, np.int64(m.p)).astype(np.uint64)
        return out

    def _ternary(self) -> np.ndarray:
        return self.rng.integers(-1, 2, self.n, dtype=np.int64)

    def _gaussian(self) -> np.ndarray:
        sigma = self.params.error_sigma
        bound = np.floor(6 * sigma)
        e = np.rint(self.rng.normal(0.0, sigma, self.n))
        return np.clip(e, -bound, bound).astype(np.int64)

    def _uniform(self, mods) -> np.ndarray:
        return np.stack([self.rng.integers(0, m.p, self.n, dtype=np.uint64) for m in mods])

    # ---- key generation

    def keygen(self, rotation_steps=(1,)) -> KeySet:
        mods_all = self._all_moduli
        L = self.levels
        s = self._ternary()
        s_ntt = self._ntt(self._small_to_rns(s, mods_all), self._tables)
        sk = SecretKey(s, s_ntt)

        a = self._uniform(mods_all[:L])
        e = self._ntt(self._small_to_rns(self._gaussian(), mods_all[:L]), self._tables[:L])
        cols = self._cols(mods_all[:L], 2)
        b = _sub_mod_v(e, dyadic_mul(a, s_ntt[:L], mods_all[:L]), cols)
        pk = PublicKey(np.stack([b, a]))

        s2 = dyadic_mul(s_ntt, s_ntt, mods_all)
        evk = self._switch_key(sk, s2)
        galois = GaloisKeys({})
        for step in rotation_steps:
            g = self.galois_element(step)
            if g not in galois.keys and g != 1:
                galois.keys[g] = self._switch_key(sk, s_ntt[:, self._galois_perm(g)])
        return KeySet(sk, pk, evk, galois)

    def _switch_key(self, sk: SecretKey, target_ntt: np.ndarray) -> KeySwitchKey:
        mods = self._all_moduli
        L = self.levels
        P = self.basis.special.p
        cols = self._cols(mods, 2)
        data = np.empty((L, 2, L + 1, self.n), dtype=np.uint64)
        for i in range(L):
            a = self._uniform(mods)
            e = self._ntt(self._small_to_rns(self._gaussian(), mods), self._tables)
            b = _sub_mod_v(e, dyadic_mul(a, sk.ntt, mods), cols)
            q = mods[i]
            gadget = dyadic_mul(target_ntt[i], np.full(self.n, P % q.p, dtype=np.uint64), q)
            b[i] = _add_mod_v(b[i], gadget, np.uint64(q.p))
            data[i, 0] = b
            data[i, 1] = a
        return KeySwitchKey(data, tuple(m.p for m in mods))

    # ---- Galois automorphisms

    def galois_element(self, step: int) -> int:
        half = self.n // 2
        return pow(GALOIS_GENERATOR, int(step) % half, 2 * self.n)

    def _galois_perm(self, g: int) -> np.ndarray:
        return _galois_permutation(self.n, g)

    # ---- encoding

    @cached_property
    def _slot_index(self):
        n = self.n
        two_n = 2 * n
        pows = np.array([pow(GALOIS_GENERATOR, i, two_n) for i in range(n // 2)], dtype=np.int64)
        return (pows - 1) // 2, (two_n - pows - 1) // 2

    @cached_property
    def _zeta_powers(self):
        j = np.arange(self.n)
        return np.exp(1j * np.pi * j / self.n)

    def encode(self, z, scale: float | None = None, level: int | None = None) -> Plaintext:
        """Slot vector (length n/2) to a coefficient-domain plaintext at ``level``."""
        n = self.n
        scale = float(self.params.delta if scale is None else scale)
        level = self.levels if level is None else level
        z = np.asarray(z, dtype=np.complex128)
        if z.shape != (n // 2,):
            raise ParameterError(f"expected {n // 2} slots, got shape {z.shape}")
        idx, cidx = self._slot_index
        vals = np.zeros(n, dtype=np.complex128)
        vals[idx] = z * scale
        vals[cidx] = np.conj(z * scale)
        coeffs = np.rint((np.fft.fft(vals) / n * np.conj(self._zeta_powers)).real)
        mods = self._mods(level)
        q = self.basis.product(level)
        peak = float(np.max(np.abs(coeffs))) if n else 0.0
        if not np.isfinite(peak) or peak >= q / 2:
            raise EncodingOverflowError(f"scaled coefficients reach {peak:.3g}, modulus headroom {q / 2:.3g}")
        rows, buf = self._alloc((level, n))
        if peak < 2.0 ** 62:
            self._small_to_rns(coeffs.astype(np.int64), mods, out=rows)
        else:
            big = np.array([int(c) for c in coeffs], dtype=object)
            for i, m in enumerate(mods):
                rows[i] = np.mod(big, m.p).astype(np.uint64)
        return Plaintext(RnsPolynomial(rows, Domain.COEFF), scale, buf)

    def decode(self, pt: Plaintext) -> np.ndarray:
        rows = pt.poly.rows
        if pt.poly.domain is Domain.NTT:
            rows = self._ntt(rows.copy(), self._tabs(pt.level), inverse=True)
        coeffs = self._centered(rows)
        vals = np.fft.ifft(coeffs * self._zeta_powers) * self.n
        idx, _ = self._slot_index
        return vals[idx] / pt.scale

    def _centered(self, rows: np.ndarray) -> np.ndarray:
        if rows.shape[0] == 1:
            p = np.uint64(self.basis.primes[0].p)
            r = rows[0]
            return np.where(r > p // np.uint64(2), -(p - r).astype(np.float64), r.astype(np.float64))
        big = crt_compose(rows, self._mods(rows.shape[0]), centered=True)
        return big.astype(np.float64)

    # ---- encryption

    def encrypt(self, pt: Plaintext, pk: PublicKey) -> Ciphertext:
        level = pt.level
        mods = self._mods(level)
        tabs = self._tabs(level)
        cols = self._cols(mods, 2)
        if pt.poly.domain is Domain.COEFF:
            m = self._ntt(pt.poly.rows.copy(), tabs)
        else:
            m = pt.poly.rows
        ct = self._new_ct(2, level, pt.scale)
        with self._scratch((3, level, self.n)) as tmp:
            self._small_to_rns(self._ternary(), mods, out=tmp[0])
            self._small_to_rns(self._gaussian(), mods, out=tmp[1])
            self._small_to_rns(self._gaussian(), mods, out=tmp[2])
            self._ntt(tmp, tabs)
            v, e0, e1 = tmp
            _add_mod_v(e0, m, cols, out=e0)
            dyadic_mad(e0, v, pk.data[0, :level], mods, out=ct.data[0])
            dyadic_mad(e1, v, pk.data[1, :level], mods, out=ct.data[1])
        return ct

    def decrypt(self, ct: Ciphertext, sk: SecretKey) -> Plaintext:
        if ct.size != 2:
            raise StateError(f"decrypt needs a size-2 ciphertext, got size {ct.size}; relinearize first")
        level = ct.level
        mods = self._mods(level)
        rows, buf = self._alloc((level, self.n))
        dyadic_mad(ct.data[0], ct.data[1], sk.ntt[:level], mods, out=rows)
        self._ntt(rows, self._tabs(level), inverse=True)
        return Plaintext(RnsPolynomial(rows, Domain.COEFF), ct.scale, buf)

    # ---- evaluation primitives

    def _check_pair(self, c0: Ciphertext, c1: Ciphertext) -> None:
        if c0.level != c1.level:
            raise ParameterError(f"level mismatch: {c0.level} vs {c1.level}")
        if c0.scale != c1.scale:
            raise ParameterError(f"scale mismatch: {c0.scale!r} vs {c1.scale!r}")

    def add(self, c0: Ciphertext, c1: Ciphertext) -> Ciphertext:
        self._check_pair(c0, c1)
        if c0.size < c1.size:
            c0, c1 = c1, c0
        out = self._new_ct(c0.size, c0.level, c0.scale)
        cols = self._cols(self._mods(c0.level), 2)
        for i in range(c0.size):
            if i < c1.size:
                _add_mod_v(c0.data[i], c1.data[i], cols, out=out.data[i])
            else:
                out.data[i] = c0.data[i]
        return out

    def add_inplace(self, acc: Ciphertext, c: Ciphertext) -> Ciphertext:
        self._check_pair(acc, c)
        if c.size > acc.size:
            raise ParameterError("accumulator smaller than addend")
        cols = self._cols(self._mods(acc.level), 2)
        for i in range(c.size):
            _add_mod_v(acc.data[i], c.data[i], cols, out=acc.data[i])
        return acc

    def multiply(self, c0: Ciphertext, c1: Ciphertext) -> Ciphertext:
        """Tensor product (c0[0]c1[0], c0[0]c1[1] + c0[1]c1[0], c0[1]c1[1]); size 3."""
        if c0.size != 2 or c1.size != 2:
            raise StateError("multiply needs two size-2 ciphertexts")
        if c0.level != c1.level:
            raise ParameterError(f"level mismatch: {c0.level} vs {c1.level}")
        mods = self._mods(c0.level)
        out = self._new_ct(3, c0.level, c0.scale * c1.scale)
        a0, a1 = c0.data
        b0, b1 = c1.data
        dyadic_mul(a0, b0, mods, out=out.data[0])
        dyadic_mul(a1, b0, mods, out=out.data[1])
        dyadic_mad(out.data[1], a0, b1, mods, out=out.data[1])
        dyadic_mul(a1, b1, mods, out=out.data[2])
        return out

    def square(self, c: Ciphertext) -> Ciphertext:
        if c.size != 2:
            raise StateError("square needs a size-2 ciphertext")
        mods = self._mods(c.level)
        out = self._new_ct(3, c.level, c.scale * c.scale)
        a0, a1 = c.data
        dyadic_mul(a0, a0, mods, out=out.data[0])
        dyadic_mul(a0, a1, mods, out=out.data[1])
        dyadic_mad(out.data[1], a0, a1, mods, out=out.data[1])
        dyadic_mul(a1, a1, mods, out=out.data[2])
        return out

    def multiply_accumulate(self, acc: Ciphertext, c0: Ciphertext, c1: Ciphertext) -> Ciphertext:
        """acc += c0 * c1 on a size-3 accumulator, one reduction per fused multiply-add."""
        if acc.size != 3 or c0.size != 2 or c1.size != 2:
            raise StateError("multiply_accumulate needs a size-3 accumulator and size-2 operands")
        if not acc.level == c0.level == c1.level:
            raise ParameterError("level mismatch")
        if acc.scale != c0.scale * c1.scale:
            raise ParameterError(f"scale mismatch: {acc.scale!r} vs {c0.scale * c1.scale!r}")
        mods = self._mods(acc.level)
        a0, a1 = c0.data
        b0, b1 = c1.data
        d = acc.data
        dyadic_mad(d[0], a0, b0, mods, out=d[0])
        dyadic_mad(d[1], a0, b1, mods, out=d[1])
        dyadic_mad(d[1], a1, b0, mods, out=d[1])
        dyadic_mad(d[2], a1, b1, mods, out=d[2])
        return acc

    def zeros_like_product(self, level: int, scale: float) -> Ciphertext:
        """Size-3 all-zero accumulator (a trivial encryption of 0)."""
        out = self._new_ct(3, level, scale)
        out.data[...] = 0
        return out

    def _check_key(self, key: KeySwitchKey, level: int) -> None:
        if key.data.shape[-1] != self.n or key.moduli != tuple(m.p for m in self._all_moduli):
            raise ParameterError("key was generated for different parameters")
        if level > key.levels:
            raise ParameterError(f"key covers {key.levels} levels, ciphertext has {level}")

    def _key_switch(self, d: np.ndarray, key: KeySwitchKey, out: np.ndarray) -> None:
        """Coefficient-domain rows d (level, n) -> out (2, level, n) in NTT domain
        decrypting to d*s' under s (up to key-switch noise)."""
        level = d.shape[0]
        L = self.levels
        n = self.n
        mods = self._mods(level, special=True)
        tabs = self._tabs(level, special=True)
        rows = list(range(level)) + [L]
        with self._scratch((2, level + 1, n)) as acc, self._scratch((level + 1, n)) as lifted:
            acc[...] = 0
            for i in range(level):
                digit = d[i]
                for j, m in enumerate(mods):
                    if j == i:
                        lifted[j] = digit
                    else:
                        _barrett_reduce_64_v(digit, np.uint64(m.p), np.uint64(m.barrett_hi),
                                             out=lifted[j])
                self._ntt(lifted, tabs)
                dyadic_mad(acc[0], lifted, key.data[i, 0][rows], mods, out=acc[0])
                dyadic_mad(acc[1], lifted, key.data[i, 1][rows], mods, out=acc[1])
            self._ntt(acc, tabs, inverse=True)
            out[0] = divide_round_by_last(acc[0], mods)
            out[1] = divide_round_by_last(acc[1], mods)
        self._ntt(out, tabs[:level])

    def relinearize(self, c: Ciphertext, evk: EvaluationKey) -> Ciphertext:
        if c.size != 3:
            raise StateError(f"relinearize needs a size-3 ciphertext, got size {c.size}")
        level = c.level
        self._check_key(evk, level)
        mods = self._mods(level)
        cols = self._cols(mods, 2)
        out = self._new_ct(2, level, c.scale)
        with self._scratch((level, self.n)) as d, self._scratch((2, level, self.n)) as ks:
            d[...] = c.data[2]
            self._ntt(d, self._tabs(level), inverse=True)
            self._key_switch(d, evk, ks)
            _add_mod_v(c.data[0], ks[0], cols, out=out.data[0])
            _add_mod_v(c.data[1], ks[1], cols, out=out.data[1])
        return out

    def rescale(self, c: Ciphertext) -> Ciphertext:
        """Divide by the last active prime (rounded); level - 1, scale / q_last."""
        level = c.level
        if level < 2:
            raise StateError("cannot rescale a level-1 ciphertext")
        mods = self._mods(level)
        out = self._new_ct(c.size, level - 1, c.scale / mods[-1].p)
        with self._scratch(c.data.shape) as tmp:
            tmp[...] = c.data
            self._ntt(tmp, self._tabs(level), inverse=True)
            for i in range(c.size):
                out.data[i] = divide_round_by_last(tmp[i], mods)
        self._ntt(out.data, self._tabs(level - 1))
        return out

    def mod_switch(self, c: Ciphertext) -> Ciphertext:
        """Drop the last active prime without dividing; scale unchanged."""
        if c.level < 2:
            raise StateError("cannot switch modulus below level 1")
        out = self._new_ct(c.size, c.level - 1, c.scale)
        out.data[...] = c.data[:, :-1]
        return out

    def mod_switch_to(self, c: Ciphertext, level: int) -> Ciphertext:
        if level > c.level or level < 1:
            raise StateError(f"cannot switch from level {c.level} to {level}")
        out = self._new_ct(c.size, level, c.scale)
        out.data[...] = c.data[:, :level]
        return out

    def rotate(self, c: Ciphertext, k: int, galois: GaloisKeys) -> Ciphertext:
        """Cyclic left shift of the slots by k: result slot i holds input slot i + k."""
        if c.size != 2:
            raise StateError("rotate needs a size-2 ciphertext")
        g = self.galois_element(k)
        level = c.level
        out = self._new_ct(2, level, c.scale)
        if g == 1:
            out.data[...] = c.data
            return out
        key = galois.keys.get(g)
        if key is None:
            raise ParameterError(f"no Galois key for rotation step {k}")
        self._check_key(key, level)
        perm = self._galois_perm(g)
        cols = self._cols(self._mods(level), 2)
        with self._scratch((level, self.n)) as d, self._scratch((2, level, self.n)) as ks:
            np.take(c.data[1], perm, axis=1, out=d)
            self._ntt(d, self._tabs(level), inverse=True)
            self._key_switch(d, key, ks)
            np.take(c.data[0], perm, axis=1, out=out.data[0])
            _add_mod_v(out.data[0], ks[0], cols, out=out.data[0])
            out.data[1] = ks[1]
        return out

    # ---- composite routines

    def mul_lin(self, c0: Ciphertext, c1: Ciphertext, evk: EvaluationKey) -> Ciphertext:
        t = self.multiply(c0, c1)
        out = self.relinearize(t, evk)
        self.release(t)
        return out

    def mul_lin_rs(self, c0: Ciphertext, c1: Ciphertext, evk: EvaluationKey) -> Ciphertext:
        t = self.mul_lin(c0, c1, evk)
        out = self.rescale(t)
        self.release(t)
        return out

    def sqr_lin_rs(self, c: Ciphertext, evk: EvaluationKey) -> Ciphertext:
        t = self.square(c)
        r = self.relinearize(t, evk)
        out = self.rescale(r)
        self.release(t, r)
        return out

    def mul_lin_rs_modsw_add(self, c0: Ciphertext, c1: Ciphertext, c2: Ciphertext,
                             evk: EvaluationKey) -> Ciphertext:
        """mul_lin_rs(c0, c1) + c2, with c2 switched down to the product's level."""
        prod = self.mul_lin_rs(c0, c1, evk)
        if c2.level < prod.level:
            raise ParameterError("addend is below the product's level")
        c2s = self.mod_switch_to(c2, prod.level)
        out = self.add(prod, c2s)
        self.release(prod, c2s)
        return out

    def rotate_routine(self, c: Ciphertext, k: int, galois: GaloisKeys) -> Ciphertext:
        return self.rotate(c, k, galois)

    # ---- conveniences

    def encrypt_vector(self, z, pk: PublicKey, scale: float | None = None) -> Ciphertext:
        pt = self.encode(z, scale)
        ct = self.encrypt(pt, pk)
        self.release(pt)
        return ct

    def decrypt_vector(self, ct: Ciphertext, sk: SecretKey) -> np.ndarray:
        pt = self.decrypt(ct, sk)
        z = self.decode(pt)
        self.release(pt)
        return z


def _galois_permutation(n: int, g: int) -> np.ndarray:
    """NTT-domain index map for x -> x^g: out[i] = in[perm[i]]."""
    rev = bit_reverse_indices(n)
    e = 2 * rev + 1
    src = ((e * g) % (2 * n) - 1) // 2
    return rev[src]


ROUTINES = ("MulLin", "MulLinRS", "SqrLinRS", "MulLinRSModSwAdd", "Rotate")
