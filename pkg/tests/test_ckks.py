import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hekl.ckks import CkksContext, EncryptionParameters, _galois_permutation
from hekl.errors import EncodingOverflowError, ParameterError, StateError
from hekl.pool import BufferPool

from conftest import slots

TOL = 1e-3


def err(a, b):
    return float(np.max(np.abs(a - b)))


def test_parameter_factory(small_params):
    b = small_params.basis
    assert small_params.levels == 3
    assert b.special.p > b.primes[0].p > b.primes[1].p
    assert all(m.p > 2**40 for m in b.primes[1:])
    with pytest.raises(ParameterError):
        EncryptionParameters(256, b, 2.0**61)
    with pytest.raises(ParameterError):
        EncryptionParameters.create(100, 2)


def test_encode_decode_plain(small_ctx, rng):
    ctx, _ = small_ctx
    z = slots(rng, ctx.n)
    assert err(ctx.decode(ctx.encode(z)), z) < 1e-9
    real = rng.uniform(-1, 1, ctx.n // 2)
    assert err(ctx.decode(ctx.encode(real)), real) < 1e-9


def test_encode_large_scale_uses_wide_path(small_ctx, rng):
    ctx, _ = small_ctx
    z = slots(rng, ctx.n)
    pt = ctx.encode(z, scale=2.0**80)
    assert err(ctx.decode(pt), z) < 1e-9


def test_encode_errors(small_ctx):
    ctx, _ = small_ctx
    with pytest.raises(ParameterError):
        ctx.encode(np.zeros(ctx.n))
    with pytest.raises(EncodingOverflowError):
        ctx.encode(np.full(ctx.n // 2, 1e30))
    with pytest.raises(EncodingOverflowError):
        ctx.encode(np.full(ctx.n // 2, 1e9), level=1)


def test_encrypt_roundtrip(small_ctx, rng):
    ctx, keys = small_ctx
    z = slots(rng, ctx.n)
    ct = ctx.encrypt_vector(z, keys.pk)
    assert ct.size == 2 and ct.level == 3
    assert err(ctx.decrypt_vector(ct, keys.sk), z) < 1e-4


def test_add_and_mismatches(small_ctx, rng):
    ctx, keys = small_ctx
    a, b = slots(rng, ctx.n), slots(rng, ctx.n)
    ca, cb = ctx.encrypt_vector(a, keys.pk), ctx.encrypt_vector(b, keys.pk)
    assert err(ctx.decrypt_vector(ctx.add(ca, cb), keys.sk), a + b) < 1e-4
    with pytest.raises(ParameterError):
        ctx.add(ca, ctx.encrypt_vector(b, keys.pk, scale=2.0**39))
    with pytest.raises(ParameterError):
        ctx.add(ca, ctx.mod_switch(cb))


def test_multiply_relinearize_rescale(small_ctx, rng):
    ctx, keys = small_ctx
    a, b = slots(rng, ctx.n), slots(rng, ctx.n)
    ca, cb = ctx.encrypt_vector(a, keys.pk), ctx.encrypt_vector(b, keys.pk)
    c3 = ctx.multiply(ca, cb)
    assert c3.size == 3 and c3.scale == ca.scale * cb.scale
    with pytest.raises(StateError):
        ctx.decrypt(c3, keys.sk)
    lin = ctx.relinearize(c3, keys.evk)
    with pytest.raises(StateError):
        ctx.relinearize(lin, keys.evk)
    assert err(ctx.decrypt_vector(lin, keys.sk), a * b) < TOL
    rs = ctx.rescale(lin)
    assert rs.level == 2
    assert rs.scale == lin.scale / ctx.basis.primes[2].p
    assert err(ctx.decrypt_vector(rs, keys.sk), a * b) < TOL


def test_depth_exhaustion(small_ctx, rng):
    ctx, keys = small_ctx
    z = slots(rng, ctx.n)
    c = ctx.encrypt_vector(z, keys.pk)
    c = ctx.sqr_lin_rs(c, keys.evk)
    c = ctx.sqr_lin_rs(c, keys.evk)
    assert c.level == 1
    assert err(ctx.decrypt_vector(c, keys.sk), z**4) < TOL
    with pytest.raises(StateError):
        ctx.rescale(c)
    with pytest.raises(StateError):
        ctx.mod_switch(c)


def test_mod_switch_keeps_message(small_ctx, rng):
    ctx, keys = small_ctx
    z = slots(rng, ctx.n)
    c = ctx.encrypt_vector(z, keys.pk)
    m = ctx.mod_switch(c)
    assert m.level == 2 and m.scale == c.scale
    assert err(ctx.decrypt_vector(m, keys.sk), z) < 1e-4
    with pytest.raises(StateError):
        ctx.mod_switch_to(c, 4)


def test_mul_lin_rs_modsw_add(small_ctx, rng):
    ctx, keys = small_ctx
    a, b, c = (slots(rng, ctx.n) for _ in range(3))
    ca, cb = ctx.encrypt_vector(a, keys.pk), ctx.encrypt_vector(b, keys.pk)
    scale = ca.scale * cb.scale / ctx.basis.primes[-1].p
    cc = ctx.encrypt_vector(c, keys.pk, scale=scale)
    out = ctx.mul_lin_rs_modsw_add(ca, cb, cc, keys.evk)
    assert out.level == 2
    assert err(ctx.decrypt_vector(out, keys.sk), a * b + c) < TOL


def test_multiply_accumulate(small_ctx, rng):
    ctx, keys = small_ctx
    xs = [slots(rng, ctx.n) for _ in range(6)]
    cts = [ctx.encrypt_vector(x, keys.pk) for x in xs]
    acc = ctx.zeros_like_product(3, cts[0].scale**2)
    for i in range(3):
        ctx.multiply_accumulate(acc, cts[2 * i], cts[2 * i + 1])
    want = xs[0] * xs[1] + xs[2] * xs[3] + xs[4] * xs[5]
    assert err(ctx.decrypt_vector(ctx.relinearize(acc, keys.evk), keys.sk), want) < TOL
    with pytest.raises(ParameterError):
        ctx.multiply_accumulate(acc, ctx.mod_switch(cts[0]), ctx.mod_switch(cts[1]))


@settings(max_examples=8)
@given(st.sampled_from([1, 2, -1, 5, 0, 128, -127]))
def test_rotate_shifts_slots(small_ctx, k):
    ctx, keys = small_ctx
    z = slots(np.random.default_rng(k % 1000), ctx.n)
    r = ctx.rotate(ctx.encrypt_vector(z, keys.pk), k, keys.galois)
    assert err(ctx.decrypt_vector(r, keys.sk), np.roll(z, -k)) < TOL


def test_rotate_full_cycle_is_identity(small_ctx, rng):
    ctx, keys = small_ctx
    z = slots(rng, ctx.n)
    c = ctx.encrypt_vector(z, keys.pk)
    for _ in range(ctx.n // 2):
        c = ctx.rotate(c, 1, keys.galois)
    assert err(ctx.decrypt_vector(c, keys.sk), z) < TOL


def test_rotate_missing_key(small_ctx, rng):
    ctx, keys = small_ctx
    c = ctx.encrypt_vector(slots(rng, ctx.n), keys.pk)
    with pytest.raises(ParameterError):
        ctx.rotate(c, 3, keys.galois)


def test_foreign_key_rejected(small_ctx, rng):
    ctx, keys = small_ctx
    other = CkksContext(EncryptionParameters.create(256, 2, 40, seed=1))
    okeys = other.keygen(())
    c = ctx.encrypt_vector(slots(rng, ctx.n), keys.pk)
    with pytest.raises(ParameterError):
        ctx.relinearize(ctx.multiply(c, c), okeys.evk)


def test_galois_permutation_is_bijection():
    for g in (5, 25, 511, 3):
        perm = _galois_permutation(256, g)
        assert sorted(perm.tolist()) == list(range(256))


def test_seed_determinism(rng):
    z = slots(rng, 64)
    outs = []
    for _ in range(2):
        ctx = CkksContext(EncryptionParameters.create(64, 2, 40, seed=3))
        keys = ctx.keygen()
        outs.append(ctx.encrypt_vector(z, keys.pk).data.copy())
    assert np.array_equal(outs[0], outs[1])


def test_variant_independence(small_params, rng):
    z = slots(rng, 256)
    results = []
    for v in ("naive", "staged2", "radix4", "radix16"):
        from hekl.ntt import parse_variant
        ctx = CkksContext(small_params, variant=parse_variant(v))
        keys = ctx.keygen()
        c = ctx.encrypt_vector(z, keys.pk)
        results.append(ctx.mul_lin_rs(c, c, keys.evk).data.copy())
    assert all(np.array_equal(results[0], r) for r in results[1:])


def test_pool_steady_state_in_routine_loop(small_params, rng):
    pool = BufferPool()
    ctx = CkksContext(small_params, pool=pool)
    keys = ctx.keygen((1,))
    a, b = (ctx.encrypt_vector(slots(rng, 256), keys.pk) for _ in range(2))

    def step():
        for out in (ctx.mul_lin_rs(a, b, keys.evk), ctx.sqr_lin_rs(a, keys.evk),
                    ctx.rotate(a, 1, keys.galois), ctx.add(a, b)):
            ctx.release(out)

    step()
    warm = pool.stats.allocations
    for _ in range(5):
        step()
    assert pool.stats.allocations == warm
    assert pool.lent_count == 2  # a and b


def _centered_coeffs(ctx, rows):
    from hekl.rns import crt_compose
    return np.array(crt_compose(rows, ctx.basis.moduli(rows.shape[0]), centered=True), dtype=object)


def test_public_key_residual_is_small(small_ctx):
    ctx, keys = small_ctx
    from hekl.ntt import dyadic_mad
    L = ctx.levels
    mods = ctx.basis.moduli(L)
    res = dyadic_mad(keys.pk.data[0], keys.pk.data[1], keys.sk.ntt[:L], mods)
    ctx._ntt(res, ctx.basis.tables, inverse=True)
    e = _centered_coeffs(ctx, res)
    assert max(abs(int(v)) for v in e) <= 6 * ctx.params.error_sigma


def test_relinearize_matches_three_term_decryption(small_ctx, rng):
    ctx, keys = small_ctx
    from hekl.ntt import dyadic_mad, dyadic_mul
    from hekl.ckks import Plaintext
    from hekl.rns import Domain, RnsPolynomial
    a, b = slots(rng, ctx.n), slots(rng, ctx.n)
    c3 = ctx.multiply(ctx.encrypt_vector(a, keys.pk), ctx.encrypt_vector(b, keys.pk))
    L = c3.level
    mods = ctx.basis.moduli(L)
    s = keys.sk.ntt[:L]
    s2 = dyadic_mul(s, s, mods)
    m = dyadic_mad(dyadic_mad(c3.data[0], c3.data[1], s, mods), c3.data[2], s2, mods)
    three = ctx.decode(Plaintext(RnsPolynomial(m, Domain.NTT), c3.scale))
    lin = ctx.decrypt_vector(ctx.relinearize(c3, keys.evk), keys.sk)
    assert err(lin, three) <= 1e-4


def test_relinearize_zero_third_component_is_exact(small_ctx, rng):
    ctx, keys = small_ctx
    c = ctx.encrypt_vector(slots(rng, ctx.n), keys.pk)
    c3 = ctx.zeros_like_product(c.level, c.scale)
    c3.data[:2] = c.data
    assert np.array_equal(ctx.relinearize(c3, keys.evk).data, c.data)


def test_zero_and_constant_encodings(small_ctx):
    ctx, keys = small_ctx
    zero = ctx.encode(np.zeros(ctx.n // 2))
    assert not zero.poly.rows.any()
    assert err(ctx.decrypt_vector(ctx.encrypt(zero, keys.pk), keys.sk), 0) < 1e-6
    pt = ctx.encode(np.full(ctx.n // 2, 0.25))
    coeffs = _centered_coeffs(ctx, pt.poly.rows)
    assert coeffs[0] == round(ctx.params.delta * 0.25)
    assert max(abs(int(v)) for v in coeffs[1:]) <= 1
    twice = type(pt)(pt.poly, 2 * pt.scale)
    assert err(ctx.decode(twice), 0.125) < 1e-9


def test_multiply_by_encrypted_one(small_ctx, rng):
    ctx, keys = small_ctx
    z = slots(rng, ctx.n)
    one = ctx.encrypt_vector(np.ones(ctx.n // 2), keys.pk)
    out = ctx.mul_lin_rs(ctx.encrypt_vector(z, keys.pk), one, keys.evk)
    assert err(ctx.decrypt_vector(out, keys.sk), z) < TOL


def test_wrong_secret_key_fails_to_decrypt(small_ctx, rng):
    ctx, keys = small_ctx
    z = slots(rng, ctx.n)
    c = ctx.encrypt_vector(z, keys.pk)
    wrong = CkksContext(EncryptionParameters.create(256, 3, 40, seed=99)).keygen(())
    assert err(ctx.decrypt_vector(c, wrong.sk), z) > 1e3
