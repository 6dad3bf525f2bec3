import numpy as np
import pytest
from hypothesis import given, strategies as st

from hekl import config
from hekl.errors import DomainError, ParameterError
from hekl.modarith import (
    Modulus,
    MulOperand,
    add_mod,
    find_primitive_2n_root,
    harvey_butterfly,
    harvey_inv_butterfly,
    inv_mod,
    mad_mod,
    mul_mod,
    mul_mod_operand,
    pow_mod,
    reduce_mod,
    sub_mod,
)
from hekl.rns import generate_primes

P60 = generate_primes(1024, 60, 1)[0]
P61 = Modulus(2305843009213693951)  # 2^61 - 1
SMALL = [Modulus(p) for p in (3, 7, 13, 17, 97, 257)]


def test_documented_examples():
    assert add_mod(3, 5, Modulus(7)) == 1
    assert sub_mod(3, 5, Modulus(7)) == 5
    assert mul_mod(10, 20, Modulus(97)) == 6
    assert mad_mod(3, 4, 5, Modulus(7)) == 3
    assert pow_mod(2, 5, Modulus(97)) == 32
    assert find_primitive_2n_root(Modulus(97), 8) == 8


def test_modulus_validation():
    for bad in (1, 2, 4, 91, 1 << 62):
        with pytest.raises(ParameterError):
            Modulus(bad)


def test_inverse():
    m = Modulus(97)
    for x in range(1, 97):
        assert x * inv_mod(x, m) % 97 == 1
    with pytest.raises(DomainError):
        inv_mod(0, m)


@pytest.mark.parametrize("m", SMALL, ids=lambda m: str(m.p))
def test_exhaustive_small(m):
    p = m.p
    xs, ys = np.meshgrid(np.arange(p, dtype=np.uint64), np.arange(p, dtype=np.uint64))
    xi, yi = xs.astype(object), ys.astype(object)
    assert np.array_equal(add_mod(xs, ys, m), (xi + yi) % p)
    assert np.array_equal(sub_mod(xs, ys, m), (xi - yi) % p)
    assert np.array_equal(mul_mod(xs, ys, m), (xi * yi) % p)
    assert np.array_equal(mad_mod(xs, ys, ys, m), (xi * yi + yi) % p)


wide = st.integers(0, (1 << 64) - 1)


@given(st.sampled_from([P60, P61]), st.data())
def test_mul_and_mad_match_bigint(m, data):
    p = m.p
    x, y, c = (data.draw(st.integers(0, p - 1)) for _ in range(3))
    assert mul_mod(x, y, m) == x * y % p
    assert mad_mod(x, y, c, m) == (x * y + c) % p
    assert add_mod(x, y, m) == (x + y) % p
    assert sub_mod(x, y, m) == (x - y) % p


@given(wide)
def test_reduce_any_word(x):
    assert reduce_mod(x, P60) == x % P60.p
    assert reduce_mod(x, P61) == x % P61.p


@given(st.integers(0, P60.p - 1), wide)
def test_shoup_multiply(w, y):
    op = MulOperand.make(w, P60)
    assert mul_mod_operand(y, op, P60) == w * y % P60.p


@given(st.sampled_from([P60, P61]), st.data())
def test_butterfly_bounds_and_congruence(m, data):
    p = m.p
    x = data.draw(st.integers(0, 4 * p - 1))
    y = data.draw(st.integers(0, 4 * p - 1))
    w = data.draw(st.integers(0, p - 1))
    X, Y = harvey_butterfly(x, y, MulOperand.make(w, m), m)
    assert 0 <= X < 4 * p and 0 <= Y < 4 * p
    assert X % p == (x + w * y) % p
    assert Y % p == (x - w * y) % p


@given(st.sampled_from([P60, P61]), st.data())
def test_inverse_butterfly(m, data):
    p = m.p
    x = data.draw(st.integers(0, 2 * p - 1))
    y = data.draw(st.integers(0, 2 * p - 1))
    w = data.draw(st.integers(0, p - 1))
    X, Y = harvey_inv_butterfly(x, y, MulOperand.make(w, m), m)
    assert 0 <= X < 2 * p and 0 <= Y < 2 * p
    assert X % p == (x + y) % p
    assert Y % p == w * (x - y) % p


def test_butterfly_examples():
    m = Modulus(17)
    assert harvey_butterfly(0, 0, MulOperand.make(3, m), m) == (0, 34)
    assert harvey_butterfly(35, 0, MulOperand.make(3, m), m) == (1, 35)


def test_debug_mode_rejects_unreduced():
    m = Modulus(97)
    config.set_debug(True)
    try:
        with pytest.raises(AssertionError):
            add_mod(97, 1, m)
        with pytest.raises(AssertionError):
            harvey_butterfly(4 * 97, 0, MulOperand.make(1, m), m)
    finally:
        config.set_debug(False)


@pytest.mark.parametrize("n", [1, 2, 4, 8, 16, 32])
def test_primitive_root_order(n):
    m = Modulus(7681)
    r = find_primitive_2n_root(m, n)
    assert pow(r, 2 * n, m.p) == 1
    assert pow(r, n, m.p) == m.p - 1
    with pytest.raises(ParameterError):
        find_primitive_2n_root(Modulus(97), 64)
