"""Operators on the scale generated by a metric operator.

An operator ``A`` maps the space at exponent ``beta`` continuously into the
one at ``alpha`` exactly when ``G^{alpha/2} A G^{-beta/2}`` is bounded. At
fixed dimension every such matrix is bounded, so boundedness is decided
from the growth of its norm along a refinement family.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from metricops.errors import InsufficientLevels, NotSymmetric, VerdictUnavailable
from metricops.growth import GROWTH_THRESHOLD, RESIDUAL_CAP, GrowthFit, fit_growth
from metricops.lattice import MetricOperator, embedding_constant
from metricops.linalg import (
    as_matrix,
    dagger,
    hermiticity_defect,
    min_singular_value,
    operator_norm,
)
from metricops.scale import DEFAULT_EXPONENTS

SYMMETRY_TOL = 1e-10


def _sandwich(A, G: MetricOperator, alpha: float, beta: float) -> np.ndarray:
    """``G^{alpha/2} A G^{-beta/2}``; diagonal metrics scale rows and columns."""
    if G.diagonal:
        g = G.weights()
        return (g ** (0.5 * alpha))[:, None] * A * (g ** (-0.5 * beta))[None, :]
    return G.power(0.5 * alpha) @ A @ G.power(-0.5 * beta)


def representative_norm(A, G: MetricOperator, alpha: float, beta: float) -> float:
    """``||G^{alpha/2} A G^{-beta/2}||``, the norm of ``A`` as a map from the
    space at ``beta`` to the space at ``alpha``."""
    A = as_matrix(A, "A")
    return operator_norm(_sandwich(A, G, alpha, beta))


@dataclass(frozen=True)
class JayMap:
    """Representative norms for every exponent pair across refinement levels."""

    alpha_grid: tuple[float, ...]
    dims: tuple[int, ...]
    entries: dict
    threshold: float
    residual_cap: float

    def fit(self, alpha: float, beta: float) -> GrowthFit:
        return self.entries[(float(alpha), float(beta))]

    def verdict(self, alpha: float, beta: float) -> str:
        return self.fit(alpha, beta).verdict

    def s_set(self) -> tuple[float, ...]:
        """Exponents ``alpha`` with a bounded diagonal entry ``(alpha, alpha)``."""
        return tuple(a for a in self.alpha_grid
                     if (a, a) in self.entries and self.verdict(a, a) == "bounded")

    def s_symmetric(self) -> bool:
        """Whether the diagonal verdicts are invariant under ``alpha -> -alpha``
        (checked on the exponents whose negation is also in the grid)."""
        diag = {a for a in self.alpha_grid if (a, a) in self.entries}
        return all(self.verdict(a, a) == self.verdict(-a, -a) for a in diag if -a in diag)

    def to_json(self) -> dict:
        return {
            "alpha_grid": list(self.alpha_grid),
            "dims": list(self.dims),
            "threshold": self.threshold,
            "residual_cap": self.residual_cap,
            "s_set": list(self.s_set()),
            "s_symmetric": self.s_symmetric(),
            "entries": [
                {"alpha": a, "beta": b, **fit.to_json()}
                for (a, b), fit in sorted(self.entries.items())
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "beta", "level", "dim", "norm", "fitted_exponent", "verdict"])
        for (a, b), fit in sorted(self.entries.items()):
            for k, (d, v) in enumerate(zip(fit.dims, fit.values)):
                w.writerow([repr(a), repr(b), k, d, repr(v), repr(fit.exponent), fit.verdict])
        return buf.getvalue()


def jay_scan(a_recipe, g_recipe, family, alpha_grid=DEFAULT_EXPONENTS, pairs=None,
             threshold=GROWTH_THRESHOLD, residual_cap=RESIDUAL_CAP) -> JayMap:
    """Fill the map of representative norms over ``alpha_grid x alpha_grid``.

    Parameters
    ----------
    a_recipe, g_recipe : callable
        ``grid -> matrix`` and ``grid -> MetricOperator``.
    family : RefinementFamily
    pairs : iterable of (alpha, beta), optional
        Restrict the scan, e.g. to the diagonal; defaults to the full product.

    Raises
    ------
    InsufficientLevels
        If the family has fewer than three levels.
    """
    levels = list(family)
    if len(levels) < 3:
        raise InsufficientLevels("jay_scan needs at least 3 refinement levels")
    grid_a = tuple(sorted({float(a) for a in alpha_grid}))
    if pairs is None:
        pairs = [(a, b) for a in grid_a for b in grid_a]
    pairs = [(float(a), float(b)) for a, b in pairs]
    norms = {p: [] for p in pairs}
    for grid in levels:
        A = as_matrix(a_recipe(grid), "A")
        G = g_recipe(grid)
        for a, b in pairs:
            norms[(a, b)].append(representative_norm(A, G, a, b))
    dims = tuple(g.N for g in levels)
    entries = {p: fit_growth(dims, v, threshold, residual_cap) for p, v in norms.items()}
    return JayMap(grid_a, dims, entries, float(threshold), float(residual_cap))


@dataclass(frozen=True)
class Compatibility:
    """Partial inner product ``<G^{alpha/2} f, G^{-alpha/2} g>`` per level."""

    alpha: float
    values: tuple[complex, ...]
    f_fit: GrowthFit
    g_fit: GrowthFit

    @property
    def compatible(self) -> bool:
        return self.f_fit.bounded and self.g_fit.bounded

    @property
    def value(self) -> complex:
        return self.values[-1]

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "compatible": self.compatible,
            "values": [[v.real, v.imag] for v in self.values],
            "f_factor": self.f_fit.to_json(),
            "g_factor": self.g_fit.to_json(),
        }


def compatibility(f, g, g_recipe, alpha: float, family, threshold=GROWTH_THRESHOLD,
                  residual_cap=RESIDUAL_CAP) -> Compatibility:
    """Evaluate the partial inner product of two continuum functions.

    ``f`` and ``g`` are callables on node arrays. The pair counts as
    compatible at ``alpha`` when both ``||G^{alpha/2} f||`` and
    ``||G^{-alpha/2} g||`` (quadrature norms) stay bounded.
    """
    values, fn, gn, dims = [], [], [], []
    for grid in family:
        G = g_recipe(grid)
        w = grid.weights
        uf = G.power(0.5 * alpha) @ grid.sample(f)
        ug = G.power(-0.5 * alpha) @ grid.sample(g)
        values.append(complex(np.sum(w * uf * np.conj(ug))))
        fn.append(float(np.sqrt(np.sum(w * np.abs(uf) ** 2))))
        gn.append(float(np.sqrt(np.sum(w * np.abs(ug) ** 2))))
        dims.append(grid.N)
    return Compatibility(
        float(alpha),
        tuple(values),
        fit_growth(dims, fn, threshold, residual_cap),
        fit_growth(dims, gn, threshold, residual_cap),
    )


@dataclass(frozen=True)
class KlmnLevel:
    """Certificate data at one refinement level."""

    lam: float
    min_singular_value: float
    symmetry_residual: float
    spectral_distance: float
    dim: int

    def to_json(self) -> dict:
        return {
            "lambda": self.lam,
            "min_singular_value": self.min_singular_value,
            "symmetry_residual": self.symmetry_residual,
            "spectral_distance": self.spectral_distance,
            "dim": self.dim,
        }


@dataclass(frozen=True)
class KlmnCertificate:
    """Invertibility of ``G^{1/2} (A - lam) G^{1/2}`` across levels.

    Passes when the smallest singular value stays at or above ``sv_floor``
    at every level and ``A`` is symmetric within ``tol`` at every level.
    """

    lam: float
    levels: tuple[KlmnLevel, ...]
    sv_floor: float
    tol: float

    @property
    def min_singular_value(self) -> float:
        return min(lv.min_singular_value for lv in self.levels)

    @property
    def symmetry_residual(self) -> float:
        return max(lv.symmetry_residual for lv in self.levels)

    @property
    def spectral_distance(self) -> float:
        return min(lv.spectral_distance for lv in self.levels)

    @property
    def passed(self) -> bool:
        return self.min_singular_value >= self.sv_floor and self.symmetry_residual <= self.tol

    def to_json(self) -> dict:
        return {
            "lambda": self.lam,
            "min_singular_value": self.min_singular_value,
            "symmetry_residual": self.symmetry_residual,
            "spectral_distance": self.spectral_distance,
            "sv_floor": self.sv_floor,
            "tol": self.tol,
            "verdict": "pass" if self.passed else "fail",
            "levels": [lv.to_json() for lv in self.levels],
            "note": "restriction domains are total at fixed dimension",
        }


def klmn_level(A, G: MetricOperator, lam: float, tol=SYMMETRY_TOL) -> KlmnLevel:
    """Certificate data for one matrix pair.

    Raises
    ------
    NotSymmetric
        If ``A`` is not Hermitian within ``tol``.
    """
    A = as_matrix(A, "A")
    defect = hermiticity_defect(A)
    if defect > tol:
        raise NotSymmetric(f"A is not symmetric (relative defect {defect:.3e})")
    n = A.shape[0]
    shifted = A - lam * np.eye(n)
    rep = _sandwich(shifted, G, 1.0, -1.0)
    eig = np.linalg.eigvalsh(0.5 * (A + dagger(A)))
    return KlmnLevel(
        lam=float(lam),
        min_singular_value=min_singular_value(rep),
        symmetry_residual=defect,
        spectral_distance=float(np.min(np.abs(eig - lam))),
        dim=n,
    )


def klmn_restrict(A, G, lam: float, family=None, sv_floor=1e-8, tol=SYMMETRY_TOL) -> KlmnCertificate:
    """Certificate for ``A`` relative to the metric ``G`` at the shift ``lam``.

    Without ``family``, ``A`` is a Hermitian matrix and ``G`` a metric
    operator, giving a one-level certificate. With a refinement family,
    ``A`` and ``G`` are recipes ``grid -> matrix`` and
    ``grid -> MetricOperator`` evaluated on every level.

    Raises
    ------
    NotSymmetric
        If ``A`` is not Hermitian within ``tol`` on some level.
    """
    if family is None:
        levels = (klmn_level(A, G, lam, tol),)
    else:
        levels = tuple(klmn_level(A(grid), G(grid), lam, tol) for grid in family)
    return KlmnCertificate(float(lam), levels, float(sv_floor), float(tol))


APPLICABILITY = ("applies-with-inclusion", "applies-unconditionally", "does-not-apply")


@dataclass(frozen=True)
class KlmnApplicability:
    verdict: str
    g1_fit: GrowthFit
    g2_fit: GrowthFit
    embedding_fit: GrowthFit | None

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "g1_norm": self.g1_fit.to_json(),
            "g2_norm": self.g2_fit.to_json(),
            "embedding": None if self.embedding_fit is None else self.embedding_fit.to_json(),
        }


def klmn_applicability(family1, family2, threshold=GROWTH_THRESHOLD, residual_cap=RESIDUAL_CAP) -> KlmnApplicability:
    """Decide which case of the KLMN analysis a pair of metric families falls in.

    ``family1`` and ``family2`` are matched sequences of metric operators.
    An unbounded ``G1`` with a bounded ``G2`` always works; the reverse never
    does; when both have the same boundedness type the answer depends on
    whether ``H(G1)`` embeds continuously into ``H(G2)``.

    Raises
    ------
    VerdictUnavailable
        If fewer than three matched levels are supplied.
    """
    family1, family2 = list(family1), list(family2)
    if len(family1) != len(family2) or len(family1) < 3:
        raise VerdictUnavailable("need two matched families of at least 3 levels")
    dims = [g.dim for g in family1]
    f1 = fit_growth(dims, [g.max_eigenvalue for g in family1], threshold, residual_cap)
    f2 = fit_growth(dims, [g.max_eigenvalue for g in family2], threshold, residual_cap)
    if not f1.bounded and f2.bounded:
        return KlmnApplicability("applies-unconditionally", f1, f2, None)
    if f1.bounded and not f2.bounded:
        return KlmnApplicability("does-not-apply", f1, f2, None)
    emb = fit_growth(dims, [embedding_constant(a, b) for a, b in zip(family1, family2)],
                     threshold, residual_cap)
    return KlmnApplicability("applies-with-inclusion" if emb.bounded else "does-not-apply", f1, f2, emb)
