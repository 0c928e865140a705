"""Intertwining relations ``B T = T A`` and what they preserve.

A case is classified by the intertwining operator ``T``: unitary, boundedly
invertible (``cond(T) <= kappa_max``), or invertible only with a huge
condition number, which is how an unbounded inverse shows up at fixed
dimension. A second operator ``S`` with ``B T = S A`` gives the two-space
(semi-similar) variant.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from metricops.errors import (
    DimensionMismatch,
    LambdaInSpectrum,
    NotHermitian,
    NotIntertwined,
    TNotInvertible,
)
from metricops.growth import fit_growth
from metricops.lattice import MetricOperator
from metricops.linalg import (
    CLUSTER_TOL,
    as_matrix,
    check_hermitian,
    cluster_eigenvalues,
    dagger,
    general_eigenvalues,
    hermiticity_defect,
    matrix_power,
    operator_norm,
)

KAPPA_MAX = 1e6
UNITARY_TOL = 1e-10
INTERTWINE_TOL = 1e-10
RESOLVENT_FLOOR = 1e-8
INVERTIBILITY_FLOOR = 1e-14


def _normalized_residual(lhs_a, lhs_b, rhs_a, rhs_b) -> float:
    """``||lhs_a lhs_b - rhs_a rhs_b|| / (||lhs_a|| ||lhs_b|| + ||rhs_a|| ||rhs_b||)``."""
    num = operator_norm(lhs_a @ lhs_b - rhs_a @ rhs_b)
    den = operator_norm(lhs_a) * operator_norm(lhs_b) + operator_norm(rhs_a) * operator_norm(rhs_b)
    return num / den if den > 0 else 0.0


def _singular_values(t):
    return np.linalg.svd(t, compute_uv=False)


@dataclass(frozen=True, eq=False)
class IntertwiningCase:
    """Operators ``A`` (space 1), ``B`` (space 2), ``T`` and optionally ``S``.

    ``intertwine_residual`` is the normalized ``||B T - T A||``; with ``S``
    supplied, ``semi_residual`` is the normalized ``||B T - S A||``.
    """

    A: np.ndarray
    B: np.ndarray
    T: np.ndarray
    S: np.ndarray | None
    intertwine_residual: float
    semi_residual: float | None
    cond_T: float
    unitarity_defect: float
    t_singular_range: tuple[float, float] = field(default=(0.0, 0.0))

    def to_json(self) -> dict:
        return {
            "dims": {"A": list(self.A.shape), "B": list(self.B.shape), "T": list(self.T.shape)},
            "intertwine_residual": self.intertwine_residual,
            "semi_residual": self.semi_residual,
            "cond_T": _finite_or_str(self.cond_T),
            "unitarity_defect": self.unitarity_defect,
        }


def _finite_or_str(v: float):
    return v if np.isfinite(v) else "inf"


def make_case(A, B, T, S=None) -> IntertwiningCase:
    """Assemble a case and compute its residuals and the conditioning of ``T``.

    Raises
    ------
    DimensionMismatch
        If ``T`` does not map the space of ``A`` into the space of ``B``.
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    T = as_matrix(T, "T")
    if A.shape[0] != A.shape[1] or B.shape[0] != B.shape[1]:
        raise DimensionMismatch("A and B must be square")
    if T.shape != (B.shape[0], A.shape[0]):
        raise DimensionMismatch(f"T has shape {T.shape}, expected {(B.shape[0], A.shape[0])}")
    semi = None
    if S is not None:
        S = as_matrix(S, "S")
        if S.shape != T.shape:
            raise DimensionMismatch("S must have the shape of T")
        semi = _normalized_residual(B, T, S, A)
    sv = _singular_values(T)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    eye = np.eye(T.shape[1])
    return IntertwiningCase(
        A=A,
        B=B,
        T=T,
        S=S,
        intertwine_residual=_normalized_residual(B, T, T, A),
        semi_residual=semi,
        cond_T=cond,
        unitarity_defect=operator_norm(dagger(T) @ T - eye),
        t_singular_range=(float(sv[-1]), float(sv[0])),
    )


@dataclass(frozen=True)
class IntertwiningCheck:
    residual: float
    tol: float
    mode: str

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol

    def to_json(self) -> dict:
        return {"residual": self.residual, "tol": self.tol, "mode": self.mode,
                "verdict": "pass" if self.passed else "fail"}


def check_intertwining(A, B, T, tol=INTERTWINE_TOL, probe=None, weights=None, rows=None) -> IntertwiningCheck:
    """Residual of ``B T = T A``.

    Without ``probe`` this is the normalized operator-norm residual. With a
    probe vector ``f`` it is ``||(B T - T A) f|| / ||f||`` in the (optionally
    weighted) vector norm, restricted to ``rows`` when given. Discretized
    differential operators only intertwine up to truncation error on smooth
    vectors, so the probe form is the one that converges under refinement.
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    T = as_matrix(T, "T")
    if T.shape != (B.shape[0], A.shape[0]):
        raise DimensionMismatch(f"T has shape {T.shape}, expected {(B.shape[0], A.shape[0])}")
    if probe is None:
        return IntertwiningCheck(_normalized_residual(B, T, T, A), tol, "operator")
    f = np.asarray(probe)
    r = B @ (T @ f) - T @ (A @ f)
    w = np.ones(len(r)) if weights is None else np.asarray(weights)
    wf = np.ones(len(f)) if weights is None else np.asarray(weights)
    if rows is not None:
        r, w = r[rows], w[rows]
    num = np.sqrt(np.sum(w * np.abs(r) ** 2))
    den = np.sqrt(np.sum(wf * np.abs(f) ** 2))
    return IntertwiningCheck(float(num / den), tol, "probe")


VERDICT_ORDER = ("unitary-equivalent", "similar", "quasi-similar", "semi-similar", "not-intertwined")


@dataclass(frozen=True)
class SimilarityVerdict:
    cls: str
    intertwine_residual: float
    semi_residual: float | None
    cond_T: float
    unitarity_defect: float
    kappa_max: float
    unitary_tol: float
    tol: float

    def to_json(self) -> dict:
        return {
            "class": self.cls,
            "evidence": {
                "intertwine_residual": self.intertwine_residual,
                "semi_residual": self.semi_residual,
                "cond_T": _finite_or_str(self.cond_T),
                "unitarity_defect": self.unitarity_defect,
            },
            "tolerances": {"kappa_max": self.kappa_max, "unitary_tol": self.unitary_tol, "tol": self.tol},
        }


def classify(case: IntertwiningCase, kappa_max=KAPPA_MAX, unitary_tol=UNITARY_TOL,
             tol=INTERTWINE_TOL) -> SimilarityVerdict:
    """Place a case in the similarity hierarchy.

    When ``S`` is present the case is semi-similar if ``B T = S A`` holds.
    Otherwise ``B T = T A`` must hold and ``T`` decides: unitary, then
    bounded condition number, then merely invertible.

    Raises
    ------
    NotIntertwined
        If the relevant residual exceeds ``tol``.
    TNotInvertible
        If ``T`` is numerically singular (square, no ``S``).
    """

    def verdict(cls):
        return SimilarityVerdict(cls, case.intertwine_residual, case.semi_residual, case.cond_T,
                                 case.unitarity_defect, kappa_max, unitary_tol, tol)

    if case.S is not None:
        if case.semi_residual > tol:
            raise NotIntertwined(f"||BT - SA|| residual {case.semi_residual:.3e} > {tol:.1e}")
        return verdict("semi-similar")
    if case.intertwine_residual > tol:
        raise NotIntertwined(f"||BT - TA|| residual {case.intertwine_residual:.3e} > {tol:.1e}")
    if case.unitarity_defect <= unitary_tol:
        return verdict("unitary-equivalent")
    lo, hi = case.t_singular_range
    if case.T.shape[0] != case.T.shape[1] or not lo > INVERTIBILITY_FLOOR * hi:
        raise TNotInvertible(f"T is numerically singular (cond {case.cond_T:.3e})")
    if case.cond_T <= kappa_max:
        return verdict("similar")
    return verdict("quasi-similar")


def cond_growth(cases, dims=None):
    """Growth fit of ``cond(T)`` along a refinement family of cases. A
    growing condition number is the family-level sign of an unbounded
    inverse."""
    cases = list(cases)
    dims = dims or [c.T.shape[1] for c in cases]
    return fit_growth(dims, [c.cond_T for c in cases])


def adjoint_case(case: IntertwiningCase) -> IntertwiningCase:
    """The case ``(B*, A*, T*)``: if ``B T = T A`` then ``A* T* = T* B*``."""
    S = None if case.S is None else dagger(case.S)
    if S is not None:
        # B T = S A  gives  T* B* = A* S*, i.e. (B*, A*) with couple (S*, T*)
        return make_case(dagger(case.B), dagger(case.A), S, dagger(case.T))
    return make_case(dagger(case.B), dagger(case.A), dagger(case.T))


def _metric_parts(G):
    if isinstance(G, MetricOperator):
        return G.matrix, G.power(-1.0)
    g = check_hermitian(G)
    return g, matrix_power(g, -1.0)


def star_G(A, G) -> np.ndarray:
    """``G^{-1} A* G``, the adjoint of ``A`` in the inner product ``<G., .>``."""
    A = as_matrix(A, "A")
    g, g_inv = _metric_parts(G)
    return g_inv @ dagger(A) @ g


def b_zero(A, G) -> np.ndarray:
    """``(star_G(A))* = G A G^{-1}``, which satisfies ``B G = G A``."""
    A = as_matrix(A, "A")
    g, g_inv = _metric_parts(G)
    return g @ A @ g_inv


def _check_invertible(T):
    sv = _singular_values(T)
    if T.shape[0] != T.shape[1] or not sv[-1] > INVERTIBILITY_FLOOR * sv[0]:
        raise TNotInvertible("T is not invertible at the working floor")


def _check_resolvent(M, lam, floor, name):
    eig = general_eigenvalues(M, validate=False)
    dist = float(np.min(np.abs(eig - lam)))
    scale = max(operator_norm(M), np.finfo(float).tiny)
    if dist < floor * scale:
        raise LambdaInSpectrum(f"lambda={lam} is within {dist:.3e} of the spectrum of {name}")
    return dist


def resolvent_X(case: IntertwiningCase, lam: complex, floor=RESOLVENT_FLOOR) -> np.ndarray:
    """``X = T (A - lam)^{-1} T^{-1}``, a right inverse of ``B - lam``.

    Raises
    ------
    LambdaInSpectrum
        If ``lam`` is closer than ``floor * ||A||`` to an eigenvalue of ``A``.
    TNotInvertible
    """
    _check_invertible(case.T)
    _check_resolvent(case.A, lam, floor, "A")
    n = case.A.shape[0]
    t_inv = np.linalg.inv(case.T)
    return case.T @ np.linalg.solve(case.A - lam * np.eye(n), t_inv)


def resolvent_Y(case: IntertwiningCase, lam: complex, floor=RESOLVENT_FLOOR) -> np.ndarray:
    """``Y = T^{-1} (B - lam)^{-1} T``, a left inverse of ``A - lam``.

    Raises
    ------
    LambdaInSpectrum
        If ``lam`` is closer than ``floor * ||B||`` to an eigenvalue of ``B``.
    TNotInvertible
    """
    _check_invertible(case.T)
    _check_resolvent(case.B, lam, floor, "B")
    n = case.B.shape[0]
    return np.linalg.solve(case.T, np.linalg.solve(case.B - lam * np.eye(n), case.T))


def resolvent_identities(case: IntertwiningCase, lam: complex, floor=RESOLVENT_FLOOR) -> dict:
    """Residuals of ``(B-lam) X = I``, ``X (B-lam) = I`` and ``Y (A-lam) = I``."""
    n = case.A.shape[0]
    eye = np.eye(n)
    X = resolvent_X(case, lam, floor)
    Y = resolvent_Y(case, lam, floor)
    bl = case.B - lam * eye
    al = case.A - lam * eye
    return {
        "lambda": [float(np.real(lam)), float(np.imag(lam))],
        "X_right": operator_norm(bl @ X - eye),
        "X_left": operator_norm(X @ bl - eye),
        "Y_left": operator_norm(Y @ al - eye),
    }


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalue clusters ``(value, multiplicity)`` of a square matrix."""

    clusters: tuple[tuple[complex, int], ...]
    dim: int
    cluster_tol: float
    eigenvalues: np.ndarray = field(repr=False, default=None)

    def values(self) -> np.ndarray:
        return np.array([c[0] for c in self.clusters], dtype=complex)

    def multiplicity(self, value: complex, tol=None) -> int:
        tol = self.cluster_tol if tol is None else tol
        return sum(m for v, m in self.clusters if abs(v - value) <= tol)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "cluster_tol": self.cluster_tol,
            "clusters": [{"re": v.real, "im": v.imag, "multiplicity": m} for v, m in self.clusters],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "re", "im"])
        for k, z in enumerate(self.eigenvalues):
            w.writerow([k, repr(float(z.real)), repr(float(z.imag))])
        return buf.getvalue()


def spectrum_report(M, cluster_tol=None, backend="lapack", validate=True) -> SpectrumReport:
    """Eigenvalues of ``M`` grouped into clusters.

    ``cluster_tol`` defaults to ``1e-7 * ||M||``.
    """
    M = as_matrix(M)
    eig = general_eigenvalues(M, backend=backend, validate=validate)
    if cluster_tol is None:
        cluster_tol = CLUSTER_TOL * max(operator_norm(M), np.finfo(float).tiny)
    clusters = tuple(cluster_eigenvalues(eig, cluster_tol))
    return SpectrumReport(clusters, M.shape[0], float(cluster_tol), eig)


def report_from_clusters(clusters, cluster_tol=1e-12) -> SpectrumReport:
    """Build a report directly from ``(value, multiplicity)`` pairs."""
    cl = sorted(((complex(v), int(m)) for v, m in clusters), key=lambda c: (c[0].real, c[0].imag))
    eig = np.repeat(np.array([c[0] for c in cl], dtype=complex), [c[1] for c in cl])
    return SpectrumReport(tuple(cl), int(sum(c[1] for c in cl)), float(cluster_tol), eig)


@dataclass(frozen=True)
class InclusionReport:
    """Greedy nearest matching of the clusters of one report into another."""

    matches: tuple[dict, ...]
    tol: float

    @property
    def holds(self) -> bool:
        return all(m["ok"] for m in self.matches)

    @property
    def max_distance(self) -> float:
        return max((m["distance"] for m in self.matches), default=0.0)

    def to_json(self) -> dict:
        return {"tol": self.tol, "holds": self.holds, "max_distance": self.max_distance,
                "matches": list(self.matches)}


def spectral_inclusion(rA: SpectrumReport, rB: SpectrumReport, tol=1e-6) -> InclusionReport:
    """Check that every cluster of ``rA`` appears in ``rB`` with at least
    the same multiplicity.

    Clusters of ``rA`` are visited in (real, imag) order. Each takes the
    nearest ``rB`` cluster that still has capacity, and consumes up to its
    own multiplicity of that capacity.
    """
    capacity = [m for _, m in rB.clusters]
    b_values = np.array([v for v, _ in rB.clusters], dtype=complex)
    matches = []
    for value, mult in rA.clusters:
        avail = [k for k, c in enumerate(capacity) if c > 0]
        if not avail:
            matches.append({"value": [value.real, value.imag], "m_A": mult, "match": None,
                            "m_B": 0, "distance": float("inf"), "ok": False})
            continue
        d = np.abs(b_values[avail] - value)
        k = avail[int(np.argmin(d))]
        dist = float(np.min(d))
        m_b = capacity[k]
        capacity[k] -= min(mult, m_b)
        matches.append({
            "value": [value.real, value.imag],
            "m_A": mult,
            "match": [b_values[k].real, b_values[k].imag],
            "m_B": m_b,
            "distance": dist,
            "ok": bool(dist <= tol and mult <= m_b),
        })
    return InclusionReport(tuple(matches), float(tol))


def multiset_distance(a, b) -> float:
    """Largest distance in a greedy one-to-one matching of two eigenvalue
    lists of equal length (infinite when the lengths differ)."""
    a = sort_pairs(a)
    b = list(sort_pairs(b))
    if len(a) != len(b):
        return float("inf")
    worst = 0.0
    remaining = np.array(b, dtype=complex)
    used = np.zeros(len(b), dtype=bool)
    for z in a:
        d = np.where(used, np.inf, np.abs(remaining - z))
        k = int(np.argmin(d))
        used[k] = True
        worst = max(worst, float(d[k]))
    return worst


def sort_pairs(values) -> np.ndarray:
    z = np.asarray(values, dtype=complex)
    return z[np.lexsort((z.imag, z.real))]


@dataclass(frozen=True)
class RealSpectrumCheck:
    max_imag: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_imag <= self.tol

    def to_json(self) -> dict:
        return {"max_abs_imag": self.max_imag, "tol": self.tol, "verdict": "pass" if self.passed else "fail"}


def real_spectrum_check(B, tol=1e-8, reference=None, eigenvalues=None) -> RealSpectrumCheck:
    """Largest ``|Im l|`` over the eigenvalues of ``B``.

    ``B`` may be a matrix or an :class:`IntertwiningCase`; for a case the
    reference operator ``A`` must be Hermitian, and ``B`` is taken from the
    case. ``reference`` serves the same purpose for a bare matrix.

    Raises
    ------
    NotHermitian
        If the self-adjoint reference is not Hermitian.
    """
    if isinstance(B, IntertwiningCase):
        reference = B.A
        B = B.B
    if reference is not None and hermiticity_defect(as_matrix(reference)) > 1e-10:
        raise NotHermitian("reference operator is not Hermitian")
    eig = general_eigenvalues(B) if eigenvalues is None else np.asarray(eigenvalues)
    return RealSpectrumCheck(float(np.max(np.abs(eig.imag))), float(tol))
