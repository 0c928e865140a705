import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_positive
from metricops.errors import DimensionMismatch, InsufficientLevels, NotHermitian, NotPositive
from metricops.grids import Grid, RefinementFamily, x2_metric
from metricops.lattice import (
    BOTTOM,
    EDGES,
    EXTREME_EDGES,
    NODE_LABELS,
    TOP,
    embedding_constant,
    graph_norm,
    identity_metric,
    inverse,
    join,
    lattice_growth,
    make_metric,
    meet,
    order_verdict,
    r_of,
    seven_lattice,
    space_norm,
)
from metricops.linalg import matrix_power, operator_norm

seeds = st.integers(0, 2**32 - 1)


def rel(a, b):
    return operator_norm(a - b) / operator_norm(b)


def metric(seed, n=8, spread=1.5):
    return make_metric(random_positive(np.random.default_rng(seed), n, spread))


def test_identity_is_valid():
    g = make_metric(np.eye(3))
    assert g.min_eigenvalue == 1.0


def test_indefinite_rejected():
    with pytest.raises(NotPositive):
        make_metric(np.diag([1.0, -1.0]))


def test_non_hermitian_rejected():
    with pytest.raises(NotHermitian):
        make_metric(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_shifted_x2_grid_eigenvalues():
    grid = Grid(5.0, 51)
    g = make_metric(np.diag(grid.x**2) + 0.01 * np.eye(51))
    assert np.allclose(g.eigenvalues, np.sort(grid.x**2 + 0.01))
    assert g.min_eigenvalue == pytest.approx(0.01)


def test_matrix_is_read_only():
    g = make_metric(np.eye(2))
    with pytest.raises(ValueError):
        g.matrix[0, 0] = 5.0


def test_r_of_examples():
    assert np.array_equal(r_of(identity_metric(3)).matrix, 2 * np.eye(3))
    x = Grid(10.0, 41).x
    g = make_metric(np.diag(x**2 + 1e-3))
    assert np.array_equal(np.diag(r_of(g).matrix), 1.0 + (x**2 + 1e-3))
    assert np.array_equal(r_of(r_of(g)).matrix, 2 * np.eye(41) + g.matrix)
    assert r_of(g).min_eigenvalue >= 1.0


def test_space_norm_examples(rng):
    xi = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    assert space_norm(identity_metric(5), xi) == pytest.approx(np.linalg.norm(xi), rel=1e-15)
    assert space_norm(make_metric(np.array([[4.0]])), np.array([1.0])) == 2.0


def test_space_norm_dimension_checked():
    with pytest.raises(DimensionMismatch):
        space_norm(identity_metric(3), np.ones(4))
    with pytest.raises(DimensionMismatch):
        meet(identity_metric(3), identity_metric(4))


def test_graph_norm_unit_identity():
    xi = np.zeros(4)
    xi[2] = 1.0
    assert graph_norm(identity_metric(4), xi) == pytest.approx(np.sqrt(2))


def test_meet_join_examples():
    g = metric(1)
    assert np.array_equal(meet(g, g).matrix, 2 * g.matrix)
    assert rel(join(g, g).matrix, g.matrix / 2) < 1e-12
    d = make_metric(np.diag([0.5, 2.0, 7.0]))
    assert np.allclose(np.diag(join(identity_metric(3), d).matrix), [0.5 / 1.5, 2.0 / 3.0, 7.0 / 8.0], rtol=1e-14)


def test_embedding_constant_examples():
    g = metric(2)
    assert embedding_constant(g, g) == pytest.approx(1.0, rel=1e-10)
    assert embedding_constant(identity_metric(1), make_metric(np.array([[9.0]]))) == 9.0


def test_embedding_constant_diagonal_matches_dense(rng):
    a = make_metric(np.diag(rng.uniform(0.1, 5, 6)))
    b = make_metric(np.diag(rng.uniform(0.1, 5, 6)))
    h = np.diag(np.diag(a.matrix) ** -0.5)
    ref = np.linalg.eigvalsh(h @ b.matrix @ h)[-1]
    assert embedding_constant(a, b) == pytest.approx(ref, rel=1e-12)


def test_embedding_constant_grows_like_l_squared():
    consts = [embedding_constant(identity_metric(n), x2_metric(Grid(L, n))) for L, n in [(5, 101), (10, 201), (20, 401)]]
    ratios = np.array(consts) / np.array([25.0, 100.0, 400.0])
    assert np.allclose(ratios, 1.0, atol=1e-3)


def test_seven_lattice_collapses_for_identity():
    lat = seven_lattice(identity_metric(3))
    assert list(lat.nodes) == list(NODE_LABELS)
    for op in lat.nodes.values():
        assert any(np.allclose(op.matrix, c * np.eye(3)) for c in (2.0, 1.0, 0.5))


def test_seven_lattice_two_by_two():
    lat = seven_lattice(make_metric(np.diag([4.0, 0.25])))
    assert np.allclose(lat.node("I∧G").matrix, np.diag([5.0, 1.25]), rtol=1e-15)
    assert np.allclose(lat.node("I∨G").matrix, np.diag([0.8, 0.2]), rtol=1e-15)


def test_edge_pattern():
    lat = seven_lattice(metric(3, n=5))
    pairs = {(e.source, e.target) for e in lat.edges}
    assert pairs == set(EDGES) and len(EDGES) == 8
    # every arrow goes from the smaller space (larger metric) to the bigger space
    for e in lat.edges:
        assert e.constant < np.inf and e.reverse_constant < np.inf
    ext = seven_lattice(metric(3, n=5), extremes=True)
    assert len(ext.edges) == 12
    assert {BOTTOM, TOP} <= set(ext.nodes)
    assert set(EXTREME_EDGES) <= {(e.source, e.target) for e in ext.edges}
    bottom, top = ext.node(BOTTOM), ext.node(TOP)
    assert rel(top.matrix, matrix_power(bottom.matrix, -1.0)) < 1e-10


def test_x2_lattice_weights():
    grid = Grid(10.0, 401)
    g = x2_metric(grid)
    w = np.diag(g.matrix)
    lat = seven_lattice(g)
    expected = {
        "G": w,
        "G⁻¹": 1.0 / w,
        "I": np.ones_like(w),
        "I∧G": 1.0 + w,
        "I∨G⁻¹": 1.0 / (1.0 + w),
        "I∧G⁻¹": 1.0 + 1.0 / w,
        "I∨G": 1.0 / (1.0 + 1.0 / w),
    }
    for label, weight in expected.items():
        np.testing.assert_allclose(np.diag(lat.node(label).matrix), weight, rtol=4 * np.finfo(float).eps)
        assert lat.node(label).diagonal


def test_x2_reverse_constants_grow_forward_bounded():
    family = RefinementFamily.default()
    lattices = [seven_lattice(x2_metric(g)) for g in family]
    rows = lattice_growth(lattices)
    assert len(rows) == 8
    for row in rows:
        assert row["forward"]["verdict"] == "bounded", row
        assert row["reverse"]["verdict"] == "growing", row
        assert row["reverse_monotone"], row


def test_lattice_growth_needs_three_levels():
    lat = seven_lattice(identity_metric(2))
    with pytest.raises(InsufficientLevels):
        lattice_growth([lat, lat])


def test_order_verdict_x2():
    family = RefinementFamily.default()
    gs = [x2_metric(g) for g in family]
    eyes = [identity_metric(g.N) for g in family]
    assert order_verdict(gs, eyes).verdict == "growing"
    assert order_verdict([r_of(g) for g in gs], eyes).verdict == "bounded"


def test_lattice_json_serializable():
    js = seven_lattice(make_metric(np.diag([4.0, 0.25]))).to_json()
    text = json.dumps(js)
    back = json.loads(text)
    assert len(back["nodes"]) == 7 and len(back["edges"]) == 8
    assert back["nodes"][1]["eigenvalue_range"] == [1.25, 5.0]


@settings(max_examples=40, deadline=None)
@given(seeds, seeds)
def test_meet_join_commutative(s1, s2):
    x, y = metric(s1), metric(s2)
    assert np.array_equal(meet(x, y).matrix, meet(y, x).matrix)
    assert rel(join(x, y).matrix, join(y, x).matrix) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(seeds, seeds, seeds)
def test_meet_join_associative(s1, s2, s3):
    x, y, z = metric(s1), metric(s2), metric(s3)
    assert rel(meet(meet(x, y), z).matrix, meet(x, meet(y, z)).matrix) <= 1e-10
    assert rel(join(join(x, y), z).matrix, join(x, join(y, z)).matrix) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(seeds, seeds)
def test_duality(s1, s2):
    x, y = metric(s1), metric(s2)
    assert rel(join(inverse(x), inverse(y)).matrix, inverse(meet(x, y)).matrix) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_meet_identity_bitwise(seed):
    g = metric(seed)
    assert np.array_equal(meet(identity_metric(g.dim), g).matrix, r_of(g).matrix)


@settings(max_examples=40, deadline=None)
@given(seeds, seeds, seeds)
def test_projective_norm_additivity(s1, s2, s3):
    x, y = metric(s1), metric(s2)
    r = np.random.default_rng(s3)
    xi = r.standard_normal(x.dim) + 1j * r.standard_normal(x.dim)
    lhs = space_norm(meet(x, y), xi) ** 2
    rhs = space_norm(x, xi) ** 2 + space_norm(y, xi) ** 2
    assert lhs == pytest.approx(rhs, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(seeds, seeds)
def test_space_norm_quadratic_form_and_root(s1, s2):
    g = metric(s1)
    r = np.random.default_rng(s2)
    xi = r.standard_normal(g.dim) + 1j * r.standard_normal(g.dim)
    n = space_norm(g, xi)
    assert n**2 == pytest.approx(np.vdot(xi, g.matrix @ xi).real, rel=1e-12)
    assert n == pytest.approx(np.linalg.norm(g.power(0.5) @ xi), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds, seeds)
def test_graph_norm_identities(s1, s2):
    g = metric(s1)
    r = np.random.default_rng(s2)
    xi = r.standard_normal(g.dim) + 1j * r.standard_normal(g.dim)
    gn = graph_norm(g, xi)
    assert gn**2 == pytest.approx(np.vdot(xi, xi).real + space_norm(g, xi) ** 2, rel=1e-12)
    assert gn == pytest.approx(space_norm(r_of(g), xi), rel=1e-12)
    big = meet(identity_metric(g.dim), g)  # >= I
    ratio = graph_norm(big, xi) / space_norm(big, xi)
    assert 1.0 - 1e-12 <= ratio <= np.sqrt(2) + 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds, seeds)
def test_embedding_constant_is_sharp(s1, s2):
    g1, g2 = metric(s1, n=6), metric(s2, n=6)
    gamma = embedding_constant(g1, g2)
    xi = np.random.default_rng(s1 ^ s2).standard_normal(6)
    assert space_norm(g2, xi) ** 2 <= gamma * space_norm(g1, xi) ** 2 * (1 + 1e-10)
    # the bound is attained by the top generalized eigenvector
    h = g1.power(-0.5)
    w, v = np.linalg.eigh(h @ g2.matrix @ h)
    top = h @ v[:, -1]
    assert space_norm(g2, top) ** 2 == pytest.approx(gamma * space_norm(g1, top) ** 2, rel=1e-8)
