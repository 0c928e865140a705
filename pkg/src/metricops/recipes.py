"""Named constructors addressable from scenario files.

A recipe reference is either ``{"name": ..., "params": {...}}`` or an inline
matrix ``{"matrix": {"rows", "cols", "re", "im"}}``. Grid recipes are
evaluated per grid; vector recipes are functions of the node array.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from metricops import grids
from metricops.errors import RecipeUnknown, ScenarioError
from metricops.lattice import MetricOperator, make_metric
from metricops.linalg import matrix_from_json
from metricops.pseudo import pt_oscillator


@dataclass(frozen=True)
class Recipe:
    name: str
    kind: str  # "metric", "operator", "case", "pair" or "vector"
    description: str
    build: Callable
    defaults: dict


def _metric_weight(fn, label):
    def build(grid, level=None):
        return grids.weight_metric(grid, fn, label=label, level=level)

    return build


def _rank_one(grid, power=1.0):
    """Euclidean projector onto ``(1+x^2)^(-power)``."""
    psi = (1.0 + grid.x**2) ** (-power)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi)


_REGISTRY: dict[str, Recipe] = {}


def register(name, kind, description, build, **defaults):
    _REGISTRY[name] = Recipe(name, kind, description, build, defaults)


register("x2", "metric", "multiplication by x^2 plus a floor (dx^2 by default)",
         lambda grid, floor=None: grids.x2_metric(grid, floor))
register("one_plus_x2", "metric", "multiplication by 1 + x^2",
         _metric_weight(lambda x: 1.0 + x**2, "1+x²"))
register("inv_one_plus_x2", "metric", "multiplication by (1 + x^2)^-1",
         _metric_weight(lambda x: 1.0 / (1.0 + x**2), "(1+x²)⁻¹"))
register("exp_ax", "metric", "multiplication by exp(a x)",
         lambda grid, a=1.0, rescale=False: grids.exp_metric(grid, a, rescale), a=1.0)
register("sobolev", "metric", "(I - D2)^(1/2) with the Dirichlet second difference",
         lambda grid: grids.sobolev_metric(grid))
register("identity", "metric", "identity", lambda grid: make_metric(np.eye(grid.N), label="I"))
register("derivative", "operator", "first derivative (central or spectral)",
         lambda grid, scheme="central": grids.derivative_op(grid, scheme))
register("position", "operator", "multiplication by x",
         lambda grid: grids.multiplication_op(grid, lambda x: x))
register("rank_one", "operator", "projector onto the normalized (1+x^2)^(-power)", _rank_one)
register("projector_pair", "case", "rank-one projector P, its partner A_phi and T = (1+x^2)^-1",
         lambda grid: grids.projector_pair(grid))
register("derivative_pair", "case", "A = D - 2x/(1+x^2), B = D, T = (1+x^2)^-1",
         lambda grid, scheme="central": grids.derivative_pair(grid, scheme))
register("pt_oscillator", "pair", "PT-symmetric oscillator with metric exp(2 alpha x)",
         lambda grid, alpha=1.0, omega=1.0: pt_oscillator(alpha, omega, grid), alpha=1.0, omega=1.0)
register("gaussian", "vector", "normalized Gaussian exp(-x^2/2) / pi^(1/4)",
         lambda: grids.gaussian)
register("power_decay", "vector", "(1 + x^2)^(-1/4 - delta)",
         lambda delta=0.05: (lambda x: (1.0 + np.asarray(x) ** 2) ** (-0.25 - delta)), delta=0.05)
register("gaussian_one_plus_x2", "vector", "(1 + x^2) times the Gaussian",
         lambda: (lambda x: (1.0 + np.asarray(x) ** 2) * grids.gaussian(x)))


def names(kind=None) -> list[str]:
    return sorted(n for n, r in _REGISTRY.items() if kind is None or r.kind == kind)


def get(name: str) -> Recipe:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise RecipeUnknown(f"unknown recipe {name!r}; known: {', '.join(names())}") from None


def _parse(ref):
    if isinstance(ref, str):
        return ref, {}
    if not isinstance(ref, dict) or "name" not in ref:
        raise ScenarioError(f"recipe reference must be a name or an object with 'name': {ref!r}")
    params = ref.get("params", {})
    if not isinstance(params, dict):
        raise ScenarioError("recipe params must be an object")
    return ref["name"], params


def _call(recipe: Recipe, *args, **params):
    try:
        return recipe.build(*args, **params)
    except TypeError as exc:
        raise ScenarioError(f"bad parameters for recipe {recipe.name!r}: {exc}") from exc


def is_inline(ref) -> bool:
    return isinstance(ref, dict) and "matrix" in ref


def metric(ref, grid=None) -> MetricOperator:
    """Resolve a metric recipe (or inline Hermitian matrix) on ``grid``."""
    if is_inline(ref):
        return make_metric(matrix_from_json(ref["matrix"]))
    name, params = _parse(ref)
    recipe = get(name)
    if recipe.kind != "metric":
        raise ScenarioError(f"recipe {name!r} is a {recipe.kind}, not a metric")
    if grid is None:
        raise ScenarioError(f"recipe {name!r} needs a grid")
    return _call(recipe, grid, **params)


def operator(ref, grid=None) -> np.ndarray:
    """Resolve an operator: operator recipes, metric recipes (their matrix)
    or inline matrices."""
    if is_inline(ref):
        return matrix_from_json(ref["matrix"])
    name, params = _parse(ref)
    recipe = get(name)
    if grid is None:
        raise ScenarioError(f"recipe {name!r} needs a grid")
    if recipe.kind == "metric":
        return np.asarray(_call(recipe, grid, **params).matrix)
    if recipe.kind == "operator":
        return _call(recipe, grid, **params)
    raise ScenarioError(f"recipe {name!r} is a {recipe.kind}, not an operator")


def case(ref, grid):
    name, params = _parse(ref)
    recipe = get(name)
    if recipe.kind != "case":
        raise ScenarioError(f"recipe {name!r} is a {recipe.kind}, not an operator triple")
    return _call(recipe, grid, **params)


def vector(ref):
    name, params = _parse(ref)
    recipe = get(name)
    if recipe.kind != "vector":
        raise ScenarioError(f"recipe {name!r} is a {recipe.kind}, not a vector")
    return _call(recipe, **params)


def _validate(ref):
    if not is_inline(ref):
        get(_parse(ref)[0])


def metric_builder(ref):
    """``grid -> MetricOperator`` closure for use with refinement families.
    Unknown names fail here rather than at first use."""
    _validate(ref)
    return lambda grid: metric(ref, grid)


def operator_builder(ref):
    _validate(ref)
    return lambda grid: operator(ref, grid)
