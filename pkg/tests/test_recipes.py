import numpy as np
import pytest

from metricops import recipes
from metricops.errors import RecipeUnknown, ScenarioError
from metricops.grids import Grid
from metricops.lattice import MetricOperator
from metricops.linalg import matrix_to_json

G = Grid(5.0, 51)


def test_required_names_registered():
    for name in ("x2", "exp_ax", "sobolev", "projector_pair", "derivative_pair", "pt_oscillator"):
        assert name in recipes.names()


def test_names_sorted_and_filtered():
    assert recipes.names() == sorted(recipes.names())
    assert set(recipes.names("metric")) <= set(recipes.names())
    assert "x2" in recipes.names("metric") and "x2" not in recipes.names("operator")


@pytest.mark.parametrize("name", ["x2", "one_plus_x2", "inv_one_plus_x2", "exp_ax", "sobolev", "identity"])
def test_metric_recipes_build(name):
    m = recipes.metric(name, G)
    assert isinstance(m, MetricOperator) and m.dim == 51


def test_params_are_forwarded():
    m = recipes.metric({"name": "x2", "params": {"floor": 0.5}}, G)
    assert m.min_eigenvalue == pytest.approx(0.5)
    d = recipes.operator({"name": "derivative", "params": {"scheme": "spectral"}}, G)
    assert d.shape == (51, 51)


def test_bad_params_are_scenario_errors():
    with pytest.raises(ScenarioError):
        recipes.metric({"name": "x2", "params": {"bogus": 1}}, G)
    with pytest.raises(ScenarioError):
        recipes.metric({"name": "x2", "params": [1]}, G)
    with pytest.raises(ScenarioError):
        recipes.metric(42, G)


def test_unknown_recipe():
    with pytest.raises(RecipeUnknown):
        recipes.get("nope")
    with pytest.raises(RecipeUnknown):
        recipes.metric_builder("nope")


def test_kind_mismatch():
    with pytest.raises(ScenarioError):
        recipes.metric("derivative", G)
    with pytest.raises(ScenarioError):
        recipes.case("x2", G)
    with pytest.raises(ScenarioError):
        recipes.vector("x2")
    with pytest.raises(ScenarioError):
        recipes.metric("x2")


def test_inline_matrix():
    ref = {"matrix": matrix_to_json(np.diag([1.0, 2.0]))}
    assert np.array_equal(recipes.metric(ref).matrix, np.diag([1.0, 2.0]))
    assert np.array_equal(recipes.operator(ref), np.diag([1.0, 2.0]))


def test_metric_as_operator():
    assert np.array_equal(recipes.operator("one_plus_x2", G), np.diag(1 + G.x**2))


def test_cases_and_vectors():
    P, A, T = recipes.case("projector_pair", G)
    assert P.shape == A.shape == T.shape == (51, 51)
    fn = recipes.vector({"name": "power_decay", "params": {"delta": 0.25}})
    assert fn(np.array([0.0]))[0] == 1.0


def test_rank_one_is_projector():
    p = recipes.operator("rank_one", G)
    assert np.allclose(p @ p, p, atol=1e-14)
    assert np.trace(p) == pytest.approx(1.0)


def test_builders_are_lazy():
    build = recipes.metric_builder("x2")
    assert build(G).dim == 51
    assert recipes.operator_builder("position")(G).shape == (51, 51)
