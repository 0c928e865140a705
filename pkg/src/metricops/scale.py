"""Scales of Hilbert spaces built on powers of a metric operator.

The member at exponent ``alpha`` carries the norm ``||G^{alpha/2} xi||``.
When ``G`` is not bounded below by the identity, the scale is built on
``R_G = I + G`` instead, so that the scale stays ordered.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass

import numpy as np

from metricops.errors import DimensionMismatch
from metricops.growth import GROWTH_THRESHOLD, RESIDUAL_CAP, fit_growth
from metricops.lattice import MetricOperator, r_of

DEFAULT_EXPONENTS = (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0)
GE_IDENTITY_TOL = 1e-12


class ScaleModeWarning(UserWarning):
    """The base operator was replaced by ``I + G``."""


@dataclass(frozen=True, eq=False)
class ScaleFamily:
    """Powers ``base^(alpha/2)`` for a finite ascending list of exponents.

    ``base`` is ``G`` in ``"G"`` mode and ``I + G`` in ``"R_G"`` mode;
    ``source`` is always the operator the caller passed in.
    """

    source: MetricOperator
    base: MetricOperator
    exponents: tuple[float, ...]
    mode: str

    def operator(self, alpha: float) -> np.ndarray:
        """``base^(alpha/2)``; exponents outside the list are computed on demand."""
        return self.base.power(0.5 * float(alpha))

    @property
    def operators(self) -> dict:
        return {a: self.operator(a) for a in self.exponents}

    def norm(self, alpha: float, xi, weights=None) -> float:
        v = np.asarray(xi)
        if v.shape != (self.base.dim,):
            raise DimensionMismatch(f"vector of shape {v.shape} does not match dimension {self.base.dim}")
        y = self.operator(alpha) @ v
        if weights is None:
            return float(np.linalg.norm(y))
        return float(np.sqrt(np.sum(np.asarray(weights) * np.abs(y) ** 2)))

    def equivalence_constants(self, alpha: float, beta: float) -> tuple[float, float]:
        """Sharp ``(c, C)`` with ``c ||xi||_alpha <= ||xi||_beta <= C ||xi||_alpha``."""
        w = self.base.eigenvalues ** (0.5 * (beta - alpha))
        return float(np.min(w)), float(np.max(w))


def build_scale(g: MetricOperator, exponents=DEFAULT_EXPONENTS, mode="auto") -> ScaleFamily:
    """Build the scale generated by ``g``.

    Parameters
    ----------
    mode : {"auto", "G", "R_G"}
        ``"auto"`` uses ``g`` when its smallest eigenvalue is at least 1 and
        otherwise switches to ``I + g`` with a :class:`ScaleModeWarning`.
    """
    exps = sorted({float(a) for a in exponents} | {0.0})
    if not all(np.isfinite(exps)):
        raise ValueError("exponents must be finite")
    if mode == "auto":
        if g.min_eigenvalue >= 1.0 - GE_IDENTITY_TOL:
            mode = "G"
        else:
            warnings.warn(
                f"smallest eigenvalue {g.min_eigenvalue:.3g} < 1; building the scale on I + G",
                ScaleModeWarning,
                stacklevel=2,
            )
            mode = "R_G"
    if mode == "G":
        base = g
    elif mode == "R_G":
        base = r_of(g)
    else:
        raise ValueError(f"unknown scale mode {mode!r}")
    return ScaleFamily(source=g, base=base, exponents=tuple(exps), mode=mode)


@dataclass(frozen=True)
class DualityCheck:
    alpha: float
    samples: int
    min_slack: float
    max_ratio: float

    @property
    def passed(self) -> bool:
        return self.min_slack >= 0.0

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "samples": self.samples, "min_slack": self.min_slack,
                "max_ratio": self.max_ratio, "verdict": "pass" if self.passed else "fail"}


def duality_pair(scale: ScaleFamily, alpha: float, samples=100, rng=None, rtol=1e-12) -> DualityCheck:
    """Check ``|<f, g>| <= ||f||_alpha ||g||_{-alpha}`` on random pairs.

    Slack is ``||f||_alpha ||g||_{-alpha} (1 + rtol) - |<f, g>|``, so
    saturated pairs count as passing.
    """
    rng = np.random.default_rng(rng)
    n = scale.base.dim
    min_slack = np.inf
    max_ratio = 0.0
    for _ in range(samples):
        f = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        pairing = abs(np.vdot(h, f))
        bound = scale.norm(alpha, f) * scale.norm(-alpha, h)
        min_slack = min(min_slack, bound * (1.0 + rtol) - pairing)
        if bound > 0:
            max_ratio = max(max_ratio, pairing / bound)
    return DualityCheck(float(alpha), samples, float(min_slack), float(max_ratio))


@dataclass(frozen=True)
class EndSpaceDiagnostic:
    """Norms ``||base^(alpha/2) xi||`` per exponent and level with fitted growth."""

    exponents: tuple[float, ...]
    dims: tuple[int, ...]
    norms: dict
    fits: dict
    modes: tuple[str, ...]

    def verdict(self, alpha: float) -> str:
        return self.fits[float(alpha)].verdict

    def to_json(self) -> dict:
        return {
            "exponents": list(self.exponents),
            "dims": list(self.dims),
            "modes": list(self.modes),
            "rows": [
                {"alpha": a, "norms": list(self.norms[a]), "fit": self.fits[a].to_json()}
                for a in self.exponents
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "level", "dim", "norm", "fitted_exponent"])
        for a in self.exponents:
            for k, (d, v) in enumerate(zip(self.dims, self.norms[a])):
                w.writerow([repr(a), k, d, repr(v), repr(self.fits[a].exponent)])
        return buf.getvalue()


def end_space_diagnostic(family, metric_recipe, vector_recipe, exponents=DEFAULT_EXPONENTS,
                         mode="auto", threshold=GROWTH_THRESHOLD, residual_cap=RESIDUAL_CAP):
    """Track quadrature norms of one continuum vector across a refinement family.

    Parameters
    ----------
    family : RefinementFamily
    metric_recipe : callable
        ``grid -> MetricOperator``.
    vector_recipe : callable
        ``x -> values``, evaluated on each grid's nodes.
    """
    exps = tuple(sorted({float(a) for a in exponents}))
    norms = {a: [] for a in exps}
    modes = []
    for grid in family:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ScaleModeWarning)
            scale = build_scale(metric_recipe(grid), exps, mode=mode)
        modes.append(scale.mode)
        xi = grid.sample(vector_recipe)
        for a in exps:
            norms[a].append(scale.norm(a, xi, grid.weights))
    dims = tuple(family.dims)
    fits = {a: fit_growth(dims, norms[a], threshold, residual_cap) for a in exps}
    return EndSpaceDiagnostic(exps, dims, {a: tuple(v) for a, v in norms.items()}, fits, tuple(modes))
