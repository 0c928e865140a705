"""Growth detection across refinement levels.

A quantity that stays bounded in the continuum limit shows a flat log-log
profile against the discretization dimension; an unbounded one shows a
positive slope. The fit needs at least three levels so that a two-point
slope is never mistaken for a trend.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from metricops.errors import InsufficientLevels

GROWTH_THRESHOLD = 0.1
RESIDUAL_CAP = 0.2
_TINY = 1e-300


@dataclass(frozen=True)
class GrowthFit:
    """Least-squares fit of ``log(value) = c + exponent * log(dim)``.

    ``residual`` is the root-mean-square deviation of the fit in log space.
    ``verdict`` is ``"bounded"`` only when the exponent is at most the
    threshold and the residual is under the cap.
    """

    dims: tuple[int, ...]
    values: tuple[float, ...]
    exponent: float
    residual: float
    threshold: float
    residual_cap: float

    @property
    def verdict(self) -> str:
        if self.exponent <= self.threshold and self.residual <= self.residual_cap:
            return "bounded"
        return "growing"

    @property
    def bounded(self) -> bool:
        return self.verdict == "bounded"

    @property
    def monotone_increasing(self) -> bool:
        v = self.values
        return all(b > a for a, b in zip(v, v[1:]))

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "values": list(self.values),
            "exponent": self.exponent,
            "residual": self.residual,
            "threshold": self.threshold,
            "residual_cap": self.residual_cap,
            "verdict": self.verdict,
        }


def fit_growth(dims, values, threshold=GROWTH_THRESHOLD, residual_cap=RESIDUAL_CAP) -> GrowthFit:
    """Fit the log-log growth exponent of ``values`` against ``dims``.

    Raises
    ------
    InsufficientLevels
        If fewer than three levels are supplied.
    """
    dims = [int(d) for d in dims]
    values = [float(v) for v in values]
    if len(dims) != len(values):
        raise ValueError("dims and values differ in length")
    if len(dims) < 3:
        raise InsufficientLevels(f"growth fit needs >= 3 levels, got {len(dims)}")
    lx = np.log(np.asarray(dims, dtype=float))
    ly = np.log(np.maximum(np.asarray(values, dtype=float), _TINY))
    design = np.column_stack([np.ones_like(lx), lx])
    coef, *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - design @ coef
    return GrowthFit(
        dims=tuple(dims),
        values=tuple(values),
        exponent=float(coef[1]),
        residual=float(np.sqrt(np.mean(resid**2))),
        threshold=float(threshold),
        residual_cap=float(residual_cap),
    )
