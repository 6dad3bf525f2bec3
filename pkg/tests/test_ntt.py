import numpy as np
import pytest
from hypothesis import given, strategies as st

from hekl import config
from hekl.errors import ParameterError
from hekl.modarith import Modulus, MulOperand
from hekl.ntt import (
    HighRadix,
    KernelProfile,
    Naive,
    Staged2,
    batch_transform,
    build_tables,
    dyadic_mad,
    dyadic_mul,
    forward_ntt,
    inverse_ntt,
    make_plan,
    negacyclic_poly_mul,
    parse_variant,
    radix8_block_round,
)
from hekl.rns import generate_primes

from conftest import negacyclic_dft, negacyclic_schoolbook

VARIANTS = [Naive(), Naive(fuse_last_round=False), Staged2(), Staged2(2), HighRadix(4), HighRadix(8),
            HighRadix(16), HighRadix(8, 2), HighRadix(16, 4)]
IDS = [f"{v.label}@{getattr(v, 'block_gap', '-')}" for v in VARIANTS]


def tables(n, bits=30):
    return build_tables(n, generate_primes(n, bits, 1)[0])


@pytest.mark.parametrize("v", VARIANTS, ids=IDS)
@pytest.mark.parametrize("n", [2, 4, 8, 16, 32, 64])
def test_matches_dft_oracle(v, n, rng):
    t = build_tables(n, Modulus(7681))
    v = v.fit(n)
    for _ in range(5):
        a = rng.integers(0, t.p, n, dtype=np.uint64)
        want = negacyclic_dft(a, t.psi, t.p)
        got = forward_ntt(a.copy(), t, v)
        assert got.tolist() == want
        assert np.array_equal(inverse_ntt(got, t, v), a)


@pytest.mark.parametrize("v", VARIANTS, ids=IDS)
def test_variants_agree_with_naive_60bit(v, rng):
    n = 1024
    t = tables(n, 60)
    a = rng.integers(0, t.p, (4, n), dtype=np.uint64)
    ref = a.copy()
    for row in ref:
        forward_ntt(row, t, Naive())
    got = a.copy()
    batch_transform(got[:, None, :], [t], v.fit(n))
    assert np.array_equal(got, ref)


@given(st.integers(1, 9), st.sampled_from(VARIANTS), st.integers(0, 2**32))
def test_roundtrip_property(logn, v, seed):
    n = 1 << logn
    t = tables(n, 50)
    a = np.random.default_rng(seed).integers(0, t.p, n, dtype=np.uint64)
    v = v.fit(n)
    assert np.array_equal(inverse_ntt(forward_ntt(a.copy(), t, v), t, v), a)


def test_output_fully_reduced_from_lazy_inputs(rng):
    n = 256
    t = tables(n, 60)
    a = rng.integers(0, 4 * t.p, n, dtype=np.uint64)
    for v in VARIANTS:
        out = forward_ntt(a.copy(), t, v.fit(n))
        assert int(out.max()) < t.p
        assert np.array_equal(out, forward_ntt(a % np.uint64(t.p), t, Naive()))


def test_negacyclic_convolution(rng):
    n = 32
    t = build_tables(n, Modulus(7681))
    a = rng.integers(0, t.p, n, dtype=np.uint64)
    b = rng.integers(0, t.p, n, dtype=np.uint64)
    assert negacyclic_poly_mul(a, b, t, HighRadix(8).fit(n)).tolist() == negacyclic_schoolbook(a, b, t.p)


def test_x_times_x_to_n_minus_1_is_minus_one():
    n = 16
    t = build_tables(n, Modulus(97))
    x = np.zeros(n, dtype=np.uint64)
    x[1] = 1
    y = np.zeros(n, dtype=np.uint64)
    y[n - 1] = 1
    out = negacyclic_poly_mul(x, y, t)
    assert out[0] == 96 and not out[1:].any()


def test_impulse_and_constant():
    t = build_tables(8, Modulus(17))
    one = np.zeros(8, dtype=np.uint64)
    one[0] = 1
    assert forward_ntt(one.copy(), t).tolist() == [1] * 8


def test_batch_threads_deterministic(rng):
    n = 512
    ps = generate_primes(n, 59, 3)
    ts = [build_tables(n, m) for m in ps]
    a = np.stack([rng.integers(0, m.p, (7, n), dtype=np.uint64) for m in ps], axis=1)
    outs = []
    for threads in (1, 2, 5):
        b = a.copy()
        batch_transform(b, ts, HighRadix(8, 64), threads)
        outs.append(b)
        c = b.copy()
        batch_transform(c, ts, HighRadix(8, 64), threads, inverse=True)
        assert np.array_equal(c, a)
    assert all(np.array_equal(outs[0], o) for o in outs[1:])


def test_batch_shape_errors():
    t = tables(64)
    with pytest.raises(ParameterError):
        batch_transform(np.zeros((3, 64), dtype=np.uint64), [t, t])
    with pytest.raises(ParameterError):
        batch_transform(np.zeros((1, 32), dtype=np.uint64), [t])
    with pytest.raises(ParameterError):
        batch_transform(np.zeros((1, 64), dtype=np.int64), [t])


def test_table_errors():
    with pytest.raises(ParameterError):
        build_tables(64, Modulus(97))  # 97 != 1 mod 128
    with pytest.raises(ParameterError):
        build_tables(48, Modulus(97))


def test_plan_validation():
    with pytest.raises(ParameterError):
        make_plan(1024, Staged2(3000))
    with pytest.raises(ParameterError):
        make_plan(1024, HighRadix(8, 1024))
    with pytest.raises(ParameterError):
        HighRadix(32)
    with pytest.raises(ParameterError):
        parse_variant("radix7")
    assert parse_variant("radix8@512") == HighRadix(8, 512)
    assert parse_variant("naive-unfused") == Naive(False)


@pytest.mark.parametrize("logn", range(1, 16))
def test_plan_covers_all_rounds(logn):
    n = 1 << logn
    for v in VARIANTS:
        plan = make_plan(n, v.fit(n))
        assert sum(plan.global_passes) + sum(plan.block_passes) == logn
        assert plan.butterflies == n // 2 * logn


def test_profile_counts_naive(rng):
    n = 1024
    t = tables(n)
    prof = KernelProfile()
    forward_ntt(rng.integers(0, t.p, n, dtype=np.uint64), t, Naive(), prof)
    assert prof.mem_elements == 2 * n * 10
    assert prof.alu_ops == n // 2 * 48 * 10
    assert prof.butterflies == n // 2 * 10
    assert prof.rounds == 10
    prof.reset()
    forward_ntt(np.zeros(n, dtype=np.uint64), t, Naive(False), prof)
    assert prof.mem_elements == 2 * n * 11


def test_profile_counts_radix8_staged():
    n = 4096
    t = tables(n)
    prof = KernelProfile()
    forward_ntt(np.zeros(n, dtype=np.uint64), t, HighRadix(8, 512), prof)
    assert prof.mem_elements == 4 * n
    assert prof.alu_ops == 4 * (n // 8) * 456


def test_radix8_block_round_matches_three_radix2_rounds(rng):
    m = Modulus(7681)
    ws = [MulOperand.make(int(w), m) for w in rng.integers(1, m.p, 7)]
    x = rng.integers(0, 4 * m.p, 8, dtype=np.uint64)
    out = radix8_block_round(x, ws, m)
    # reference: three rounds with twiddles w0 | w1 w2 | w3..w6
    v = [int(a) for a in x]
    for level, span in ((0, 4), (1, 2), (2, 1)):
        for blk in range(1 << level):
            w = ws[(1 << level) - 1 + blk].w
            base = blk * 2 * span
            for j in range(base, base + span):
                u, s = v[j], v[j + span] * w
                v[j], v[j + span] = u + s, u - s
    assert [int(o) % m.p for o in out] == [a % m.p for a in v]
    assert int(np.max(out)) < 4 * m.p


def test_dyadic_ops(rng):
    ps = generate_primes(64, 60, 2)
    a = np.stack([rng.integers(0, m.p, 64, dtype=np.uint64) for m in ps])
    b = np.stack([rng.integers(0, m.p, 64, dtype=np.uint64) for m in ps])
    c = np.stack([rng.integers(0, m.p, 64, dtype=np.uint64) for m in ps])
    prod = dyadic_mul(a, b, ps)
    mad = dyadic_mad(c, a, b, ps)
    for i, m in enumerate(ps):
        ai, bi, ci = (x[i].astype(object) for x in (a, b, c))
        assert prod[i].tolist() == ((ai * bi) % m.p).tolist()
        assert mad[i].tolist() == ((ai * bi + ci) % m.p).tolist()
    with pytest.raises(ParameterError):
        dyadic_mul(a, b[:, :32], ps)


def test_debug_mode_catches_unreduced_input():
    t = tables(16)
    config.set_debug(True)
    try:
        with pytest.raises(AssertionError):
            forward_ntt(np.full(16, 4 * t.p, dtype=np.uint64), t)
    finally:
        config.set_debug(False)
