"""Metric operators, their norms, form-sum lattice operations and the
seven-node lattice generated by a single metric operator."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from metricops.errors import DimensionMismatch, InsufficientLevels
from metricops.growth import GROWTH_THRESHOLD, RESIDUAL_CAP, GrowthFit, fit_growth
from metricops.linalg import (
    HERMITIAN_TOL,
    POSITIVITY_FLOOR,
    HermitianEigen,
    check_hermitian,
    dagger,
    is_diagonal,
    positive_eigen,
)


@dataclass(frozen=True, eq=False)
class MetricOperator:
    """A strictly positive Hermitian matrix.

    Build instances with :func:`make_metric`, which validates the input.
    Eigendecomposition, powers and the inverse are computed lazily and
    cached; instances are otherwise immutable.
    """

    matrix: np.ndarray
    min_eigenvalue: float
    label: str = "G"
    refinement_level: int | None = None
    floor: float = 0.0
    _eig: HermitianEigen | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def diagonal(self) -> bool:
        return is_diagonal(self.matrix)

    @cached_property
    def eig(self) -> HermitianEigen:
        if self._eig is not None:
            return self._eig
        return positive_eigen(self.matrix, floor=0.0)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eig.eigenvalues

    @property
    def max_eigenvalue(self) -> float:
        return float(self.eig.eigenvalues[-1])

    def power(self, alpha: float) -> np.ndarray:
        """``matrix ** alpha``; exact identity at ``alpha == 0``."""
        alpha = float(alpha)
        cache = self._power_cache
        if alpha not in cache:
            n = self.dim
            if alpha == 0.0:
                out = np.eye(n, dtype=self.matrix.dtype)
            elif alpha == 1.0:
                out = self.matrix.copy()
            elif self.diagonal:
                out = np.diag(np.diag(self.matrix).real ** alpha).astype(self.matrix.dtype)
            else:
                out = self.eig.apply(lambda w: w**alpha)
            out.setflags(write=False)
            cache[alpha] = out
        return cache[alpha]

    @cached_property
    def _power_cache(self) -> dict:
        return {}

    def weights(self) -> np.ndarray:
        """Diagonal entries; only meaningful for diagonal metrics."""
        return np.diag(self.matrix).real.copy()

    def eigen_range(self) -> tuple[float, float]:
        w = self.eigenvalues
        return float(w[0]), float(w[-1])


def make_metric(m, floor=None, label="G", refinement_level=None, tol=HERMITIAN_TOL) -> MetricOperator:
    """Validate ``m`` as a metric operator.

    Parameters
    ----------
    m : array_like
        Square Hermitian matrix.
    floor : float, optional
        Positivity floor; the smallest eigenvalue must exceed it. Defaults
        to ``1e-12 * ||m||``.

    Raises
    ------
    NotHermitian, NotPositive
    """
    a = check_hermitian(m, tol)
    a = 0.5 * (a + dagger(a))
    if np.iscomplexobj(a) and not np.any(a.imag):
        a = a.real.copy()
    eig = positive_eigen(a, floor=floor, tol=tol)
    if floor is None:
        floor = POSITIVITY_FLOOR * float(np.max(np.abs(eig.eigenvalues)))
    a.setflags(write=False)
    return MetricOperator(
        matrix=a,
        min_eigenvalue=float(eig.eigenvalues[0]),
        label=label,
        refinement_level=refinement_level,
        floor=float(floor),
        _eig=eig,
    )


def identity_metric(n: int, refinement_level=None) -> MetricOperator:
    return make_metric(np.eye(n), label="I", refinement_level=refinement_level)


def _same_dim(x: MetricOperator, y: MetricOperator):
    if x.dim != y.dim:
        raise DimensionMismatch(f"dimensions differ: {x.dim} vs {y.dim}")


def _level(x: MetricOperator, y: MetricOperator):
    return x.refinement_level if x.refinement_level is not None else y.refinement_level


def r_of(g: MetricOperator) -> MetricOperator:
    """``I + G``."""
    return make_metric(np.eye(g.dim) + g.matrix, floor=0.0, label=f"I∧{g.label}",
                       refinement_level=g.refinement_level)


def inverse(g: MetricOperator, label=None) -> MetricOperator:
    """``G^{-1}`` through the eigendecomposition, so the result stays Hermitian."""
    return make_metric(g.power(-1.0), floor=0.0, label=label or f"{g.label}⁻¹",
                       refinement_level=g.refinement_level)


def meet(x: MetricOperator, y: MetricOperator, label=None) -> MetricOperator:
    """Form sum ``X + Y``: the operator of the intersection space."""
    _same_dim(x, y)
    return make_metric(x.matrix + y.matrix, floor=0.0, label=label or f"{x.label}∧{y.label}",
                       refinement_level=_level(x, y))


def join(x: MetricOperator, y: MetricOperator, label=None) -> MetricOperator:
    """``(X^{-1} + Y^{-1})^{-1}``: the operator of the sum space."""
    _same_dim(x, y)
    s = make_metric(x.power(-1.0) + y.power(-1.0), floor=0.0)
    return make_metric(s.power(-1.0), floor=0.0, label=label or f"{x.label}∨{y.label}",
                       refinement_level=_level(x, y))


def _vector(g: MetricOperator, xi) -> np.ndarray:
    v = np.asarray(xi)
    if v.ndim != 1 or v.shape[0] != g.dim:
        raise DimensionMismatch(f"vector of shape {v.shape} does not match dimension {g.dim}")
    return v


def space_norm(g: MetricOperator, xi, weights=None) -> float:
    """``sqrt(<G xi, xi>)``.

    ``weights`` folds quadrature weights into the inner product; this is
    only consistent for diagonal ``G``, where it gives the weighted
    ``L^2`` norm with weight ``g(x)``.
    """
    v = _vector(g, xi)
    gv = g.matrix @ v
    if weights is None:
        q = np.vdot(v, gv).real
    else:
        q = np.sum(np.asarray(weights) * (gv * v.conj()).real)
    return float(np.sqrt(max(q, 0.0)))


def graph_norm(g: MetricOperator, xi, weights=None) -> float:
    """``sqrt(||xi||^2 + ||xi||_G^2)``."""
    v = _vector(g, xi)
    if weights is None:
        base = np.vdot(v, v).real
    else:
        base = np.sum(np.asarray(weights) * np.abs(v) ** 2)
    return float(np.sqrt(base + space_norm(g, v, weights) ** 2))


def embedding_constant(g1: MetricOperator, g2: MetricOperator) -> float:
    """Smallest ``gamma`` with ``||xi||_{G2}^2 <= gamma ||xi||_{G1}^2``.

    Equal to the largest eigenvalue of ``G1^{-1/2} G2 G1^{-1/2}``.
    """
    _same_dim(g1, g2)
    if g1.diagonal and g2.diagonal:
        return float(np.max(g2.weights() / g1.weights()))
    h = g1.power(-0.5)
    m = h @ g2.matrix @ h
    m = 0.5 * (m + dagger(m))
    return float(np.linalg.eigvalsh(m)[-1])


# node labels, in the order the lattice is reported
BOTTOM = "I∧G∧G⁻¹"
TOP = "I∨G∨G⁻¹"
NODE_LABELS = ("I∧G⁻¹", "I∧G", "I", "G⁻¹", "G", "I∨G⁻¹", "I∨G")

# inclusion arrows X -> Y mean H(X) embeds continuously into H(Y)
EDGES = (
    ("I∧G", "I"),
    ("I∧G⁻¹", "G⁻¹"),
    ("I∧G", "G"),
    ("I∧G⁻¹", "I"),
    ("I", "I∨G⁻¹"),
    ("G", "I∨G"),
    ("I", "I∨G"),
    ("G⁻¹", "I∨G⁻¹"),
)
EXTREME_EDGES = (
    (BOTTOM, "I∧G"),
    (BOTTOM, "I∧G⁻¹"),
    ("I∨G", TOP),
    ("I∨G⁻¹", TOP),
)


@dataclass(frozen=True)
class LatticeEdge:
    source: str
    target: str
    constant: float
    reverse_constant: float

    def to_json(self) -> dict:
        return {
            "from": self.source,
            "to": self.target,
            "embedding_constant": self.constant,
            "reverse_constant": self.reverse_constant,
        }


@dataclass(frozen=True)
class SpaceLattice:
    """Nodes keyed by label plus the inclusion arrows with their constants."""

    nodes: dict
    edges: tuple[LatticeEdge, ...]
    refinement_level: int | None = None

    def node(self, label: str) -> MetricOperator:
        return self.nodes[label]

    def norm(self, label: str, xi, weights=None) -> float:
        return space_norm(self.nodes[label], xi, weights)

    def to_json(self) -> dict:
        return {
            "refinement_level": self.refinement_level,
            "nodes": [
                {"label": k, "eigenvalue_range": list(op.eigen_range())}
                for k, op in self.nodes.items()
            ],
            "edges": [e.to_json() for e in self.edges],
        }


def seven_lattice(g: MetricOperator, extremes=False) -> SpaceLattice:
    """The lattice generated by ``G``, optionally with its two extreme nodes."""
    n = g.dim
    eye = identity_metric(n, g.refinement_level)
    g = replace(g, label="G")
    g_inv = inverse(g, label="G⁻¹")
    nodes = {
        "I∧G⁻¹": meet(eye, g_inv, label="I∧G⁻¹"),
        "I∧G": meet(eye, g, label="I∧G"),
        "I": eye,
        "G⁻¹": g_inv,
        "G": g,
        "I∨G⁻¹": join(eye, g_inv, label="I∨G⁻¹"),
        "I∨G": join(eye, g, label="I∨G"),
    }
    pairs = list(EDGES)
    if extremes:
        bottom = meet(nodes["I∧G"], g_inv, label=BOTTOM)
        nodes = {BOTTOM: bottom, **nodes, TOP: inverse(bottom, label=TOP)}
        pairs += list(EXTREME_EDGES)
    edges = tuple(
        LatticeEdge(
            a,
            b,
            embedding_constant(nodes[a], nodes[b]),
            embedding_constant(nodes[b], nodes[a]),
        )
        for a, b in pairs
    )
    return SpaceLattice(nodes=nodes, edges=edges, refinement_level=g.refinement_level)


@dataclass(frozen=True)
class OrderVerdict:
    """Embedding constants of ``H(G1) -> H(G2)`` across refinement levels."""

    fit: GrowthFit

    @property
    def verdict(self) -> str:
        return self.fit.verdict

    def to_json(self) -> dict:
        return self.fit.to_json()


def order_verdict(family1, family2, threshold=GROWTH_THRESHOLD, residual_cap=RESIDUAL_CAP) -> OrderVerdict:
    """Growth of ``embedding_constant(G1_k, G2_k)`` along two matched families.

    ``"bounded"`` is the finite-dimensional reading of a continuous
    embedding ``H(G1) ⊂ H(G2)``.
    """
    family1, family2 = list(family1), list(family2)
    if len(family1) != len(family2):
        raise DimensionMismatch("families have different numbers of levels")
    if len(family1) < 3:
        raise InsufficientLevels("need at least 3 refinement levels")
    consts = [embedding_constant(a, b) for a, b in zip(family1, family2)]
    fit = fit_growth([a.dim for a in family1], consts, threshold, residual_cap)
    return OrderVerdict(fit)


def lattice_growth(lattices, threshold=GROWTH_THRESHOLD, residual_cap=RESIDUAL_CAP) -> list[dict]:
    """For every arrow, fit the forward and the reversed constants across levels."""
    lattices = list(lattices)
    if len(lattices) < 3:
        raise InsufficientLevels("need at least 3 refinement levels")
    dims = [lat.nodes["I"].dim for lat in lattices]
    rows = []
    for k, edge in enumerate(lattices[0].edges):
        fwd = [lat.edges[k].constant for lat in lattices]
        rev = [lat.edges[k].reverse_constant for lat in lattices]
        rows.append({
            "from": edge.source,
            "to": edge.target,
            "forward": fit_growth(dims, fwd, threshold, residual_cap).to_json(),
            "reverse": fit_growth(dims, rev, threshold, residual_cap).to_json(),
            "reverse_monotone": all(b > a for a, b in zip(rev, rev[1:])),
        })
    return rows
