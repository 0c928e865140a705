import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_complex, random_hermitian
from metricops import _kernels_py, kernels
from metricops.similarity import multiset_distance

compiled = pytest.importorskip("metricops._kernels") if kernels.BACKEND == "compiled" else None
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled extension not built")

seeds = st.integers(0, 2**32 - 1)


def test_backend_is_known():
    assert kernels.BACKEND in ("compiled", "python")


def test_pure_python_switch():
    env = dict(os.environ, METRICOPS_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from metricops import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("impl", [_kernels_py, compiled], ids=["python", "compiled"])
def test_jacobi_reconstructs(impl, rng):
    if impl is None:
        pytest.skip("compiled extension not built")
    a = random_hermitian(rng, 12)
    w, v, _, ok = impl.jacobi_hermitian(a)
    assert ok
    assert np.all(np.diff(w) >= 0)
    assert np.allclose(v.conj().T @ v, np.eye(12), atol=1e-12)
    assert np.allclose((v * w) @ v.conj().T, a, atol=1e-11)
    assert np.allclose(w, np.linalg.eigvalsh(a), atol=1e-11)


@pytest.mark.parametrize("impl", [_kernels_py, compiled], ids=["python", "compiled"])
def test_qr_matches_lapack(impl, rng):
    if impl is None:
        pytest.skip("compiled extension not built")
    a = random_complex(rng, 15)
    w, _, ok = impl.hessenberg_qr_eigvals(a)
    assert ok
    assert multiset_distance(w, np.linalg.eigvals(a)) <= 1e-10


@needs_compiled
@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 10))
def test_compiled_agrees_with_python(seed, n):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, n)
    wc = compiled.jacobi_hermitian(h)[0]
    wp = _kernels_py.jacobi_hermitian(h)[0]
    assert np.allclose(wc, wp, atol=1e-11 * max(1.0, np.max(np.abs(wp))))
    g = random_complex(rng, n)
    assert multiset_distance(compiled.hessenberg_qr_eigvals(g)[0], _kernels_py.hessenberg_qr_eigvals(g)[0]) <= 1e-9
