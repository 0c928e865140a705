"""Dense complex linear algebra: Hermitian and general eigenvalues, functional
calculus on positive matrices, norms, eigenvalue clustering and the JSON
matrix format.

Two eigen backends are available. ``"lapack"`` (default) goes through
numpy; ``"native"`` runs the package's own Jacobi and Hessenberg-QR kernels
(compiled when the extension was built). The native path is meant for small
matrices and for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from metricops import kernels
from metricops.errors import DimensionMismatch, NoConvergence, NotHermitian, NotPositive

HERMITIAN_TOL = 1e-10
POSITIVITY_FLOOR = 1e-12
CLUSTER_TOL = 1e-7
EIGEN_RESIDUAL_TOL = 1e-8


def as_matrix(m, name="matrix") -> np.ndarray:
    """Return ``m`` as a finite 2-D float or complex array."""
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.iscomplexobj(a):
        a = a.astype(float, copy=False)
    else:
        a = a.astype(complex, copy=False)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def _square(m, name="matrix") -> np.ndarray:
    a = as_matrix(m, name)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def is_diagonal(m: np.ndarray) -> bool:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return not np.any(m - np.diag(np.diag(m)))


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest entry of ``|M - M*|`` relative to the largest entry of ``|M|``."""
    scale = np.max(np.abs(m))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(m - dagger(m))) / scale)


def check_hermitian(m, tol=HERMITIAN_TOL, name="matrix") -> np.ndarray:
    a = _square(m, name)
    defect = hermiticity_defect(a)
    if defect > tol:
        raise NotHermitian(f"{name} is not Hermitian (relative defect {defect:.3e} > {tol:.1e})")
    return a


@dataclass(frozen=True)
class HermitianEigen:
    """Eigenvalues in ascending order with the matching unitary eigenvector matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)

    def apply(self, fn) -> np.ndarray:
        """Matrix function ``V diag(fn(w)) V*``, made exactly Hermitian."""
        v = self.eigenvectors
        out = (v * fn(self.eigenvalues)) @ dagger(v)
        return 0.5 * (out + dagger(out))


def hermitian_eigen(m, backend="lapack", tol=HERMITIAN_TOL, max_sweeps=100) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix.

    Diagonal input is handled exactly: the eigenvalues are the sorted
    diagonal and the eigenvector matrix is a permutation.

    Raises
    ------
    NotHermitian
        If the relative hermiticity defect exceeds ``tol``.
    NoConvergence
        If the native Jacobi kernel exhausts ``max_sweeps``.
    """
    a = check_hermitian(m, tol)
    a = 0.5 * (a + dagger(a))
    n = a.shape[0]
    if is_diagonal(a):
        d = np.diag(a).real
        order = np.argsort(d, kind="stable")
        v = np.zeros((n, n), dtype=a.dtype)
        v[order, np.arange(n)] = 1.0
        return HermitianEigen(d[order].copy(), v)
    if backend == "lapack":
        w, v = np.linalg.eigh(a)
        return HermitianEigen(w, v)
    if backend == "native":
        w, v, sweeps, ok = kernels.jacobi_hermitian(a, max_sweeps=max_sweeps)
        if not ok:
            raise NoConvergence(f"Jacobi did not converge in {sweeps} sweeps")
        return HermitianEigen(w, v)
    raise ValueError(f"unknown backend {backend!r}")


def sort_complex(values) -> np.ndarray:
    """Sort by real part, then imaginary part."""
    z = np.asarray(values, dtype=complex)
    order = np.lexsort((z.imag, z.real))
    return z[order]


def general_eigenvalues(m, backend="lapack", validate=True, residual_tol=EIGEN_RESIDUAL_TOL) -> np.ndarray:
    """Eigenvalues of a general square matrix, repeated by algebraic
    multiplicity and sorted by (real, imag).

    With the LAPACK backend every eigenpair is validated through the
    relative residual ``||(M - l I) v|| / ||M||``. The native backend
    validates through the smallest singular value of ``M - l I``, which is
    only affordable for small matrices.

    Raises
    ------
    NoConvergence
        If the QR iteration stalls or a reported eigenvalue fails validation.
    """
    a = _square(m)
    n = a.shape[0]
    scale = operator_norm(a)
    if scale == 0.0:
        return np.zeros(n, dtype=complex)
    if backend == "lapack":
        if validate:
            w, v = np.linalg.eig(a)
            res = np.linalg.norm(a @ v - v * w, axis=0) / (np.linalg.norm(v, axis=0) * scale)
            worst = float(np.max(res))
        else:
            w = np.linalg.eigvals(a)
            worst = 0.0
    elif backend == "native":
        w, its, ok = kernels.hessenberg_qr_eigvals(a)
        if not ok:
            raise NoConvergence(f"QR iteration stalled after {its} iterations")
        worst = 0.0
        if validate:
            eye = np.eye(n)
            worst = max(min_singular_value(a - lam * eye) / scale for lam in w)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    if worst > residual_tol:
        raise NoConvergence(f"eigenpair residual {worst:.3e} exceeds {residual_tol:.1e}")
    return sort_complex(w)


def operator_norm(m) -> float:
    """Largest singular value."""
    a = as_matrix(m)
    if is_diagonal(a):
        return float(np.max(np.abs(np.diag(a))))
    return float(np.linalg.svd(a, compute_uv=False)[0])


def min_singular_value(m) -> float:
    """Smallest singular value (of the square part for rectangular input)."""
    a = as_matrix(m)
    if is_diagonal(a):
        return float(np.min(np.abs(np.diag(a))))
    return float(np.linalg.svd(a, compute_uv=False)[-1])


def condition_number(m) -> float:
    s = np.linalg.svd(as_matrix(m), compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")


def positive_eigen(m, floor=None, tol=HERMITIAN_TOL, backend="lapack") -> HermitianEigen:
    """Hermitian eigendecomposition that also checks strict positivity.

    ``floor`` defaults to ``1e-12 * ||M||``.

    Raises
    ------
    NotPositive
        If the smallest eigenvalue is at or below the floor.
    """
    eig = hermitian_eigen(m, backend=backend, tol=tol)
    top = float(np.max(np.abs(eig.eigenvalues)))
    if floor is None:
        floor = POSITIVITY_FLOOR * top
    lo = float(eig.eigenvalues[0])
    if not lo > floor:
        raise NotPositive(f"smallest eigenvalue {lo:.6g} is not above the floor {floor:.3g}")
    return eig


def matrix_power(g, alpha: float, floor=None) -> np.ndarray:
    """``G**alpha`` for a strictly positive Hermitian ``G``.

    ``G`` may be an array or a :class:`~metricops.lattice.MetricOperator`;
    the latter reuses its cached eigendecomposition. ``alpha == 0`` returns
    the identity exactly and diagonal input is powered entrywise.
    """
    power = getattr(g, "power", None)
    if power is not None:
        return power(alpha)
    a = check_hermitian(g)
    n = a.shape[0]
    if alpha == 0:
        return np.eye(n, dtype=a.dtype)
    eig = positive_eigen(a, floor=floor)
    if is_diagonal(a):
        return np.diag(np.diag(a).real ** alpha).astype(a.dtype)
    return eig.apply(lambda w: w**alpha)


def cluster_eigenvalues(values, tol: float) -> list[tuple[complex, int]]:
    """Group eigenvalues whose chain distance is within ``tol``.

    Single linkage: two eigenvalues share a cluster when a chain of
    eigenvalues joins them with consecutive gaps at most ``tol``. Each
    cluster is reported as (mean value, size), sorted by (real, imag).
    """
    z = sort_complex(values)
    n = len(z)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        # z is sorted by real part, so only a forward window can be within tol
        j = i + 1
        while j < n and z[j].real - z[i].real <= tol:
            if abs(z[j] - z[i]) <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
            j += 1
    groups: dict[int, list[complex]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(z[i])
    clusters = [(complex(np.mean(g)), len(g)) for g in groups.values()]
    clusters.sort(key=lambda c: (c[0].real, c[0].imag))
    return clusters


def matrix_to_json(m) -> dict:
    """``{rows, cols, re, im}`` with row-major entries; round-trips exactly."""
    a = as_matrix(m)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "re": [float(v) for v in a.real.ravel()],
        "im": [float(v) for v in np.imag(a).ravel()],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", [0.0] * (rows * cols)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from exc
    if rows < 1 or cols < 1 or re.size != rows * cols or im.size != rows * cols:
        raise DimensionMismatch("matrix entry count does not match rows * cols")
    if not (np.all(np.isfinite(re)) and np.all(np.isfinite(im))):
        raise ValueError("matrix has non-finite entries")
    if np.any(im):
        return (re + 1j * im).reshape(rows, cols)
    return re.reshape(rows, cols)
