import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hekl.ckks import CkksContext, EncryptionParameters
from hekl.pool import BufferPool

settings.register_profile("hekl", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("hekl")


def negacyclic_dft(a, psi, p):
    """O(n^2) oracle in the transform's bit-reversed output order."""
    n = len(a)
    bits = n.bit_length() - 1
    out = []
    for i in range(n):
        r = int(format(i, f"0{bits}b")[::-1], 2) if bits else 0
        x = pow(psi, 2 * r + 1, p)
        acc, xp = 0, 1
        for c in a:
            acc = (acc + int(c) * xp) % p
            xp = xp * x % p
        out.append(acc)
    return out


def negacyclic_schoolbook(a, b, p):
    n = len(a)
    out = [0] * n
    for i in range(n):
        for j in range(n):
            k = i + j
            term = int(a[i]) * int(b[j])
            if k < n:
                out[k] = (out[k] + term) % p
            else:
                out[k - n] = (out[k - n] - term) % p
    return out


@pytest.fixture(scope="session")
def small_params():
    return EncryptionParameters.create(256, 3, 40, seed=7)


@pytest.fixture(scope="session")
def small_ctx(small_params):
    ctx = CkksContext(small_params, pool=BufferPool())
    keys = ctx.keygen((1, 2, -1, 5))
    return ctx, keys


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def slots(rng, n):
    return rng.uniform(-1, 1, n // 2) + 1j * rng.uniform(-1, 1, n // 2)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
