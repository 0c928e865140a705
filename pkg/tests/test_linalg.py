import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_complex, random_hermitian, random_positive
from metricops.errors import DimensionMismatch, NotHermitian, NotPositive
from metricops.grids import Grid, x2_metric
from metricops.linalg import (
    cluster_eigenvalues,
    condition_number,
    general_eigenvalues,
    hermitian_eigen,
    matrix_from_json,
    matrix_power,
    matrix_to_json,
    min_singular_value,
    operator_norm,
    positive_eigen,
    sort_complex,
)

seeds = st.integers(0, 2**32 - 1)
BACKENDS = ["lapack", "native"]


def _hausdorff(a, b):
    d = np.abs(np.asarray(a)[:, None] - np.asarray(b)[None, :])
    return max(d.min(axis=1).max(), d.min(axis=0).max())


@pytest.mark.parametrize("backend", BACKENDS)
def test_identity_eigen(backend):
    e = hermitian_eigen(np.eye(3), backend=backend)
    assert np.array_equal(e.eigenvalues, [1.0, 1.0, 1.0])
    v = e.eigenvectors
    assert np.allclose(v.conj().T @ v, np.eye(3), atol=1e-15)


@pytest.mark.parametrize("backend", BACKENDS)
def test_diagonal_eigen_sorted(backend):
    e = hermitian_eigen(np.diag([2.0, -1.0]), backend=backend)
    assert list(e.eigenvalues) == [-1.0, 2.0]
    assert np.allclose(e.reconstruct(), np.diag([2.0, -1.0]))


@pytest.mark.parametrize("backend", BACKENDS)
def test_random_hermitian_reconstruction(backend, rng):
    m = random_hermitian(rng, 30)
    e = hermitian_eigen(m, backend=backend)
    assert np.all(np.diff(e.eigenvalues) >= 0)
    assert operator_norm(e.reconstruct() - m) <= 1e-12 * operator_norm(m)
    v = e.eigenvectors
    assert operator_norm(v.conj().T @ v - np.eye(30)) <= 30 * np.finfo(float).eps * 10


def test_not_hermitian_rejected():
    with pytest.raises(NotHermitian):
        hermitian_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))


@pytest.mark.parametrize("backend", BACKENDS)
def test_general_eigenvalues_diagonal_imaginary(backend):
    ev = general_eigenvalues(np.diag([1j, -1j]), backend=backend)
    assert np.allclose(ev, [-1j, 1j])


@pytest.mark.parametrize("backend", BACKENDS)
def test_jordan_block_double_zero(backend):
    ev = general_eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]), backend=backend)
    assert len(ev) == 2
    assert np.allclose(ev, 0.0)


@pytest.mark.parametrize("backend", BACKENDS)
def test_similarity_preserves_eigenvalues(backend, rng):
    a = random_complex(rng, 20)
    t = random_complex(rng, 20) + 5 * np.eye(20)
    b = t @ a @ np.linalg.inv(t)
    assert _hausdorff(general_eigenvalues(a, backend=backend), general_eigenvalues(b, backend=backend)) <= 1e-6


def test_general_eigenvalues_sorted_lexicographically():
    ev = general_eigenvalues(np.diag([1 + 1j, 1 - 1j, -2.0, 1.0]))
    assert list(ev) == [-2.0, 1 - 1j, 1.0, 1 + 1j]


def test_sort_complex_ties_on_real_part():
    assert list(sort_complex([2j, -1j, 0.0])) == [-1j, 0.0, 2j]


def test_matrix_power_diagonal_roots():
    assert np.array_equal(matrix_power(np.diag([4.0, 9.0]), 0.5), np.diag([2.0, 3.0]))


def test_matrix_power_zero_is_identity(rng):
    g = random_positive(rng, 6)
    assert np.array_equal(matrix_power(g, 0), np.eye(6))


def test_matrix_power_one_is_g(rng):
    g = random_positive(rng, 6)
    assert np.allclose(matrix_power(g, 1.0), g, rtol=0, atol=1e-12)


def test_x2_square_root_squared():
    g = x2_metric(Grid(10.0, 101))
    root = matrix_power(g.matrix, 0.5)
    back = root @ root
    assert operator_norm(back - g.matrix) <= 1e-10 * operator_norm(g.matrix)


def test_sqrt_of_dense_metric_squares_back(rng):
    g = random_positive(rng, 20, spread=3.0)
    r = matrix_power(g, 0.5)
    assert operator_norm(r @ r - g) <= 1e-10 * operator_norm(g)


def test_not_positive_rejected():
    with pytest.raises(NotPositive):
        matrix_power(np.diag([1.0, 0.0]), 0.5)
    with pytest.raises(NotPositive):
        positive_eigen(np.diag([1.0, -1e-3]))


def test_positivity_floor_is_relative():
    g = np.diag([1.0, 1e-13])
    with pytest.raises(NotPositive):
        positive_eigen(g)
    assert positive_eigen(g, floor=0.0).eigenvalues[0] == 1e-13


def test_norms_trivial():
    assert operator_norm(np.eye(4)) == 1.0
    assert min_singular_value(np.eye(4)) == 1.0
    assert operator_norm(np.diag([3.0, 0.0])) == 3.0
    assert min_singular_value(np.diag([3.0, 0.0])) == 0.0


def test_operator_norm_from_gram_eigenvalue(rng):
    m = random_complex(rng, 12, 9)
    top = hermitian_eigen(m.conj().T @ m).eigenvalues[-1]
    assert operator_norm(m) == pytest.approx(np.sqrt(top), rel=1e-10)


def test_min_singular_value_from_gram(rng):
    m = random_complex(rng, 10)
    low = hermitian_eigen(m.conj().T @ m).eigenvalues[0]
    assert min_singular_value(m) == pytest.approx(np.sqrt(low), rel=1e-8)


def test_condition_number_of_singular_is_inf():
    assert condition_number(np.diag([1.0, 0.0])) == float("inf")


def test_cluster_single_linkage_and_order():
    clusters = cluster_eigenvalues([1.0, 0.0, 1.0 + 1e-9, 2.0, 0.5e-9], tol=1e-8)
    assert [m for _, m in clusters] == [2, 2, 1]
    assert clusters[0][0] == pytest.approx(0.0, abs=1e-8)
    # chain: gaps within tol join clusters even when the ends are farther apart
    assert len(cluster_eigenvalues([0.0, 0.8, 1.6], tol=1.0)) == 1


def test_json_roundtrip_exact(rng):
    m = random_complex(rng, 3, 5) * 1e-300
    m[0, 0] = np.pi
    back = matrix_from_json(json.loads(json.dumps(matrix_to_json(m))))
    assert back.shape == (3, 5)
    assert np.array_equal(back, m)


def test_json_real_matrix_stays_real():
    back = matrix_from_json(matrix_to_json(np.eye(2)))
    assert back.dtype == float


def test_json_rejects_bad_counts_and_nonfinite():
    with pytest.raises(DimensionMismatch):
        matrix_from_json({"rows": 2, "cols": 2, "re": [1, 2, 3], "im": [0, 0, 0]})
    with pytest.raises(ValueError):
        matrix_from_json({"rows": 1, "cols": 1, "re": [float("nan")], "im": [0]})
    with pytest.raises(ValueError):
        matrix_from_json({"cols": 1, "re": [1.0]})


def test_nonfinite_input_rejected():
    with pytest.raises(ValueError):
        operator_norm(np.array([[np.inf]]))


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 12))
def test_hermitian_backends_agree_with_general(seed, n):
    m = random_hermitian(np.random.default_rng(seed), n)
    h = hermitian_eigen(m).eigenvalues
    for backend in BACKENDS:
        g = general_eigenvalues(m, backend=backend)
        assert np.max(np.abs(np.sort(g.real) - h)) <= 1e-8
        assert np.max(np.abs(g.imag)) <= 1e-8
    assert np.max(np.abs(hermitian_eigen(m, backend="native").eigenvalues - h)) <= 1e-10 * max(1, np.abs(h).max())


@settings(max_examples=25, deadline=None)
@given(seeds, st.sampled_from([-1, -0.5, 0.5, 1, 2]), st.sampled_from([-1, -0.5, 0.5, 1, 2]))
def test_power_composition(seed, a, b):
    g = random_positive(np.random.default_rng(seed), 8)
    lhs = matrix_power(g, a) @ matrix_power(g, b)
    rhs = matrix_power(g, a + b)
    assert operator_norm(lhs - rhs) <= 1e-10 * operator_norm(rhs)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 10), st.integers(1, 10))
def test_adjoint_norm_equal(seed, n, m):
    a = random_complex(np.random.default_rng(seed), n, m)
    assert operator_norm(a.conj().T) == pytest.approx(operator_norm(a), rel=1e-14)
