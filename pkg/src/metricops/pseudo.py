"""Quasi-Hermitian operators: ``H* G = G H`` for a metric operator ``G``.

Such an ``H`` is similar to the Hermitian matrix ``h = W H W^{-1}`` with
``W = G^{1/2}``, so its spectrum is real. The module also builds the
PT-symmetric oscillator ``1/2 (p - i alpha)^2 + 1/2 omega^2 x^2`` on a grid.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass

import numpy as np

from metricops.errors import DimensionMismatch, GridTooCoarse, NotQuasiHermitian
from metricops.grids import Grid, derivative_op, second_difference
from metricops.lattice import MetricOperator, make_metric, space_norm
from metricops.linalg import as_matrix, dagger, operator_norm
from metricops.similarity import SpectrumReport, spectrum_report

PAIR_TOL = 1e-8
STABILITY_CAP = 1.0


class QuasiHermitianWarning(UserWarning):
    """The pair's residual exceeds its tolerance."""


def dieudonne_residual(H, G) -> float:
    """``||H* G - G H|| / (||H|| ||G||)``.

    Raises
    ------
    DimensionMismatch
    """
    H = as_matrix(H, "H")
    g = G.matrix if isinstance(G, MetricOperator) else as_matrix(G, "G")
    if H.shape[0] != H.shape[1] or H.shape != g.shape:
        raise DimensionMismatch(f"H {H.shape} and G {g.shape} do not match")
    den = operator_norm(H) * operator_norm(g)
    if den == 0.0:
        return 0.0
    return operator_norm(dagger(H) @ g - g @ H) / den


@dataclass(frozen=True, eq=False)
class QuasiHermitianPair:
    """``H`` with a metric ``G``.

    ``tol`` is the residual below which the pair counts as valid; ``scale``
    is the positive factor ``G`` was divided by, if any.
    """

    H: np.ndarray
    G: MetricOperator
    dieudonne_residual: float
    tol: float = PAIR_TOL
    scale: float = 1.0

    @property
    def valid(self) -> bool:
        return self.dieudonne_residual <= self.tol


def make_pair(H, G: MetricOperator, tol=PAIR_TOL, scale=1.0) -> QuasiHermitianPair:
    H = as_matrix(H, "H")
    return QuasiHermitianPair(H, G, dieudonne_residual(H, G), float(tol), float(scale))


@dataclass(frozen=True, eq=False)
class PhysicalSystem:
    """``h = W H W^{-1}`` with ``W = G^{1/2}`` and the spectrum of ``h``."""

    h: np.ndarray
    W: np.ndarray
    spectrum: SpectrumReport
    hermiticity_residual: float
    dieudonne_residual: float
    max_imag: float
    scale: float
    tol: float

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.eigenvalues

    def lowest(self, k: int) -> np.ndarray:
        return np.sort(self.eigenvalues.real)[:k]

    def to_json(self, max_eigenvalues=None) -> dict:
        ev = self.eigenvalues if max_eigenvalues is None else self.eigenvalues[:max_eigenvalues]
        return {
            "dim": int(self.h.shape[0]),
            "hermiticity_residual": self.hermiticity_residual,
            "dieudonne_residual": self.dieudonne_residual,
            "max_abs_imag": self.max_imag,
            "metric_scale": self.scale,
            "tol": self.tol,
            "eigenvalues": [[float(z.real), float(z.imag)] for z in ev],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "re", "im"])
        for k, z in enumerate(self.eigenvalues):
            w.writerow([k, repr(float(z.real)), repr(float(z.imag))])
        return buf.getvalue()


def physical_hamiltonian(pair: QuasiHermitianPair, strict=False) -> PhysicalSystem:
    """Transform ``H`` to ``h = G^{1/2} H G^{-1/2}``.

    Raises
    ------
    NotQuasiHermitian
        In strict mode, if the pair's residual exceeds its tolerance.
        Otherwise a :class:`QuasiHermitianWarning` is emitted.
    """
    if not pair.valid:
        msg = f"Dieudonne residual {pair.dieudonne_residual:.3e} exceeds {pair.tol:.1e}"
        if strict:
            raise NotQuasiHermitian(msg)
        warnings.warn(msg, QuasiHermitianWarning, stacklevel=2)
    G = pair.G
    if G.diagonal:
        w = np.sqrt(G.weights())
        h = w[:, None] * pair.H / w[None, :]
        W = np.diag(w)
    else:
        W = G.power(0.5)
        h = W @ pair.H @ G.power(-0.5)
    hn = operator_norm(h)
    herm = operator_norm(h - dagger(h)) / hn if hn > 0 else 0.0
    spec = spectrum_report(h)
    return PhysicalSystem(
        h=h,
        W=W,
        spectrum=spec,
        hermiticity_residual=herm,
        dieudonne_residual=pair.dieudonne_residual,
        max_imag=float(np.max(np.abs(spec.eigenvalues.imag))),
        scale=pair.scale,
        tol=pair.tol,
    )


@dataclass(frozen=True)
class AnalyticVectorDiagnostic:
    """Partial sums of ``sum_n ||H^n phi||_G t^n / n!``.

    ``norm_ratios[n]`` is ``||H^{n+1} phi||_G / ||H^n phi||_G`` and
    ``term_ratios[n]`` the ratio of consecutive series terms, i.e.
    ``norm_ratios[n] * t / (n + 1)``. ``radius_estimate`` is the largest
    ``t`` for which the last term ratio would still be below 1.
    """

    t: float
    partial_sums: tuple[float, ...]
    norm_ratios: tuple[float, ...]
    term_ratios: tuple[float, ...]
    radius_estimate: float

    @property
    def converges(self) -> bool:
        tail = self.term_ratios[-3:]
        return all(r < 1.0 for r in tail)

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "partial_sums": list(self.partial_sums),
            "norm_ratios": list(self.norm_ratios),
            "term_ratios": list(self.term_ratios),
            "radius_estimate": self.radius_estimate if math.isfinite(self.radius_estimate) else "inf",
            "verdict": "converges" if self.converges else "inconclusive",
        }


def analytic_vector_diagnostic(H, G: MetricOperator, phi, t: float, n_max: int = 30) -> AnalyticVectorDiagnostic:
    """Series diagnostic for ``phi`` being an analytic vector of ``H``.

    In finite dimension the series always converges; the ratios and the
    radius estimate are what is worth comparing across refinement levels.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    if n_max < 3:
        raise ValueError("n_max must be at least 3")
    H = as_matrix(H, "H")
    v = np.asarray(phi, dtype=complex)
    norms = [space_norm(G, v)]
    for _ in range(n_max):
        v = H @ v
        norms.append(space_norm(G, v))
    sums, term, total = [], norms[0], 0.0
    for n in range(n_max + 1):
        if n > 0:
            term = norms[n] * t**n / math.factorial(n)
        total += term
        sums.append(total)
    norm_ratios = tuple(b / a if a > 0 else 0.0 for a, b in zip(norms, norms[1:]))
    term_ratios = tuple(r * t / (n + 1) for n, r in enumerate(norm_ratios))
    last = norm_ratios[-1]
    radius = n_max / last if last > 0 else math.inf
    return AnalyticVectorDiagnostic(float(t), tuple(sums), norm_ratios, term_ratios, float(radius))


def pt_hamiltonian(alpha: float, omega: float, grid: Grid, scheme: str = "central4") -> np.ndarray:
    """Matrix of ``-1/2 f'' - alpha f' - alpha^2/2 f + omega^2 x^2 f / 2``.

    ``"central4"`` pairs the five-point second difference with the
    five-point antisymmetric first difference; ``"central"`` uses the
    three-point versions. ``"spectral"`` squares the Fourier matrix.
    Compact second differences are used rather than squaring ``D``, whose
    wide stencil decouples odd and even nodes.
    """
    x = grid.x
    if scheme in ("central", "central4"):
        order = 4 if scheme == "central4" else 2
        d = derivative_op(grid, scheme)
        d2 = second_difference(grid, order)
    elif scheme == "spectral":
        d = derivative_op(grid, "spectral")
        d2 = d @ d
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    n = grid.N
    return -0.5 * d2 - alpha * d - 0.5 * alpha**2 * np.eye(n) + np.diag(0.5 * omega**2 * x**2)


def pt_oscillator(alpha: float, omega: float, grid: Grid, scheme: str = "central4",
                  stability_cap: float = STABILITY_CAP, tol=None) -> QuasiHermitianPair:
    """PT-symmetric oscillator with its metric ``G = exp(2 alpha x)``.

    ``G`` is divided by its largest entry to avoid overflow; the factor is
    kept in ``pair.scale``. The default pair tolerance is ``dx^2``, the
    order of the discretization error in the Dieudonne relation.

    Raises
    ------
    GridTooCoarse
        If ``dx * max(|alpha|, omega L)`` exceeds ``stability_cap``.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    if grid.dx * max(abs(alpha), omega * grid.L) > stability_cap:
        raise GridTooCoarse(
            f"dx * max(|alpha|, omega L) = {grid.dx * max(abs(alpha), omega * grid.L):.3g} > {stability_cap}"
        )
    H = pt_hamiltonian(alpha, omega, grid, scheme)
    e = 2.0 * alpha * grid.x
    top = float(np.max(e))
    G = make_metric(np.diag(np.exp(e - top)), floor=0.0, label="exp(2 alpha x)")
    tol = grid.dx**2 if tol is None else tol
    return make_pair(H, G, tol=tol, scale=math.exp(top))
