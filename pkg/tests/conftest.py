import numpy as np
import pytest

ACCEPTANCE_RESULTS: dict[int, tuple[str, str]] = {}


def random_complex(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def random_hermitian(rng, n):
    a = random_complex(rng, n)
    return 0.5 * (a + a.conj().T)


def random_positive(rng, n, spread=1.0):
    """Hermitian with eigenvalues in [exp(-spread), exp(spread)]."""
    q, _ = np.linalg.qr(random_complex(rng, n))
    w = np.exp(rng.uniform(-spread, spread, n))
    g = (q * w) @ q.conj().T
    return 0.5 * (g + g.conj().T)


def random_conditioned(rng, n, cond):
    """Invertible matrix with condition number ``cond``."""
    u, _ = np.linalg.qr(random_complex(rng, n))
    v, _ = np.linalg.qr(random_complex(rng, n))
    s = np.geomspace(1.0, 1.0 / cond, n)
    return (u * s) @ v.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        status, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {status}  {detail}")
