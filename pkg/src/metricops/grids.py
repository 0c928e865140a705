"""Uniform grids on [-L, L] standing in for L^2(R), multiplication and
derivative operators on them, and constructors for the concrete examples.

Functions on a grid are extended by zero outside it. Inner products use
trapezoidal weights, so ``Grid.inner`` approximates the continuum pairing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from metricops.errors import GridTooCoarse, InsufficientLevels, NonFiniteWeight, NotNormalized
from metricops.lattice import MetricOperator, make_metric
from metricops.linalg import check_hermitian, hermitian_eigen

DEFAULT_LEVELS = ((10.0, 401), (14.0, 801), (20.0, 1601))


@dataclass(frozen=True, eq=False)
class Grid:
    """``N`` equispaced nodes on ``[-L, L]`` with trapezoidal weights."""

    L: float
    N: int

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("half width must be positive")
        if self.N < 3:
            raise ValueError("a grid needs at least 3 points")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / (self.N - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(-self.L, self.L, self.N)

    @property
    def weights(self) -> np.ndarray:
        w = np.full(self.N, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        return w

    @property
    def interior(self) -> slice:
        return slice(1, self.N - 1)

    def inner(self, f, g) -> complex:
        """Quadrature ``<f, g> = sum_j w_j f_j conj(g_j)``."""
        return complex(np.sum(self.weights * np.asarray(f) * np.conj(g)))

    def norm(self, f, interior=False) -> float:
        f = np.asarray(f)
        w = self.weights
        if interior:
            sl = self.interior
            f, w = f[sl], w[sl]
        return float(np.sqrt(np.sum(w * np.abs(f) ** 2)))

    def sample(self, fn) -> np.ndarray:
        values = np.asarray(fn(self.x))
        if values.shape != (self.N,):
            values = np.broadcast_to(values, (self.N,)).copy()
        return values

    def to_json(self) -> dict:
        return {"L": self.L, "N": self.N, "dx": self.dx}


@dataclass(frozen=True)
class RefinementFamily:
    """Grids of strictly increasing size (and non-decreasing width)."""

    levels: tuple[Grid, ...]

    def __post_init__(self):
        if len(self.levels) < 3:
            raise InsufficientLevels(f"a refinement family needs >= 3 levels, got {len(self.levels)}")
        for a, b in zip(self.levels, self.levels[1:]):
            if not (b.N > a.N and b.L >= a.L):
                raise ValueError("levels must increase strictly in N and weakly in L")

    @classmethod
    def from_pairs(cls, pairs) -> "RefinementFamily":
        return cls(tuple(Grid(float(L), int(N)) for L, N in pairs))

    @classmethod
    def default(cls, levels: int = 3) -> "RefinementFamily":
        """``(10, 401), (14, 801), (20, 1601)``; further levels keep
        doubling the interval count and widen ``L`` by a factor sqrt(2)."""
        pairs = list(DEFAULT_LEVELS[:levels])
        while len(pairs) < levels:
            L, N = pairs[-1]
            pairs.append((round(L * np.sqrt(2.0), 6), 2 * (N - 1) + 1))
        return cls.from_pairs(pairs)

    @classmethod
    def fixed_width(cls, L: float, sizes) -> "RefinementFamily":
        return cls.from_pairs([(L, n) for n in sizes])

    def __iter__(self):
        return iter(self.levels)

    def __len__(self):
        return len(self.levels)

    @property
    def dims(self) -> list[int]:
        return [g.N for g in self.levels]

    def to_json(self) -> list:
        return [g.to_json() for g in self.levels]


def gaussian(x):
    return np.exp(-0.5 * np.asarray(x) ** 2) / np.pi**0.25


def default_phi(grid: Grid) -> np.ndarray:
    """Gaussian normalized under the grid's quadrature weights."""
    phi = grid.sample(gaussian)
    return phi / grid.norm(phi)


def multiplication_op(grid: Grid, weight) -> np.ndarray:
    """Diagonal matrix of ``weight(x_j)``.

    Raises
    ------
    NonFiniteWeight
        If the weight is NaN or infinite at some node.
    """
    with np.errstate(all="ignore"):
        values = grid.sample(weight) if callable(weight) else np.broadcast_to(weight, (grid.N,))
    if not np.all(np.isfinite(values)):
        raise NonFiniteWeight("weight is not finite on every node")
    return np.diag(np.asarray(values))


def _banded(n: int, coefs: dict) -> np.ndarray:
    m = np.zeros((n, n))
    for offset, c in coefs.items():
        m += c * np.eye(n, k=offset)
    return m


def central_difference(grid: Grid, order: int = 2) -> np.ndarray:
    """Antisymmetric central first difference with zero extension.

    ``order=4`` uses the five-point stencil ``(-1, 8, 0, -8, 1) / 12``.
    """
    if order == 2:
        return _banded(grid.N, {-1: -0.5, 1: 0.5}) / grid.dx
    if order == 4:
        return _banded(grid.N, {-2: 1 / 12, -1: -8 / 12, 1: 8 / 12, 2: -1 / 12}) / grid.dx
    raise ValueError(f"unsupported difference order {order}")


def spectral_derivative(grid: Grid) -> np.ndarray:
    """Fourier differentiation matrix on the grid nodes, periodic with
    period ``N * dx``. Antisymmetric like the central scheme."""
    n = grid.N
    k = np.arange(n)
    diff = k[:, None] - k[None, :]
    period = n * grid.dx
    off = diff != 0
    d = np.zeros((n, n))
    t = np.pi * diff[off] / n
    sign = np.where(diff[off] % 2 == 0, 1.0, -1.0)
    if n % 2 == 0:
        d[off] = 0.5 * sign / np.tan(t)
    else:
        d[off] = 0.5 * sign / np.sin(t)
    return d * (2.0 * np.pi / period)


def derivative_op(grid: Grid, scheme: str = "central") -> np.ndarray:
    """First-derivative matrix.

    Parameters
    ----------
    scheme : {"central", "central4", "spectral"}
        ``"central"`` is the second-order antisymmetric difference,
        ``"central4"`` its fourth-order five-point version and
        ``"spectral"`` the periodic Fourier matrix.
    """
    if scheme in ("central", "central4"):
        if grid.N < 5:
            raise GridTooCoarse("the central schemes need N >= 5")
        return central_difference(grid, 4 if scheme == "central4" else 2)
    if scheme == "spectral":
        return spectral_derivative(grid)
    raise ValueError(f"unknown derivative scheme {scheme!r}")


def second_difference(grid: Grid, order: int = 2) -> np.ndarray:
    """Symmetric Dirichlet second difference ``(f_{j+1} - 2 f_j + f_{j-1}) / dx^2``,
    or the five-point ``(-1, 16, -30, 16, -1) / 12`` stencil for ``order=4``."""
    if order == 2:
        return _banded(grid.N, {-1: 1.0, 0: -2.0, 1: 1.0}) / grid.dx**2
    if order == 4:
        return _banded(grid.N, {-2: -1 / 12, -1: 16 / 12, 0: -30 / 12, 1: 16 / 12, 2: -1 / 12}) / grid.dx**2
    raise ValueError(f"unsupported difference order {order}")


def dirichlet_laplacian_eigenvalues(grid: Grid) -> np.ndarray:
    """Closed-form eigenvalues of ``-second_difference``, ascending."""
    k = np.arange(1, grid.N + 1)
    return 4.0 * np.sin(0.5 * np.pi * k / (grid.N + 1)) ** 2 / grid.dx**2


def dirichlet_modes(grid: Grid) -> np.ndarray:
    """Orthonormal sine eigenvectors of the second difference (columns)."""
    n = grid.N
    j = np.arange(1, n + 1)
    modes = np.sin(np.pi * np.outer(j, j) / (n + 1))
    return modes * np.sqrt(2.0 / (n + 1))


def _inverse_one_plus_x2(grid: Grid) -> np.ndarray:
    return multiplication_op(grid, lambda x: 1.0 / (1.0 + x**2))


def projector_pair(grid: Grid, phi=None, tol=1e-10):
    """Rank-one projector ``P``, its quasi-similar partner ``A`` and ``T``.

    ``P f = <f, phi> phi`` and ``A f = <(1+x^2) f, phi> (1+x^2)^{-1} phi``
    in the quadrature inner product, with ``T = (1+x^2)^{-1}``. Then
    ``A T = T P`` holds exactly on the grid.

    Raises
    ------
    NotNormalized
        If ``phi`` does not have unit quadrature norm.
    """
    phi = default_phi(grid) if phi is None else np.asarray(phi)
    nrm = grid.norm(phi)
    if abs(nrm - 1.0) > tol:
        raise NotNormalized(f"phi has quadrature norm {nrm:.12g}")
    w = grid.weights
    x = grid.x
    r = 1.0 + x**2
    p = np.outer(phi, w * np.conj(phi))
    a = np.outer(phi / r, r * w * np.conj(phi))
    return p, a, _inverse_one_plus_x2(grid)


def projector_resolvent(grid: Grid, phi, g, lam: complex) -> np.ndarray:
    """Closed-form solution ``f`` of ``(A - lam) f = g`` for the projector pair."""
    x = grid.x
    r = 1.0 + x**2
    coef = grid.inner(g, r * phi) / (lam * (1.0 - lam))
    return -np.asarray(g) / lam + coef * phi / r


def derivative_pair(grid: Grid, scheme: str = "central"):
    """``A = D - 2x/(1+x^2)``, ``B = D`` and ``T = (1+x^2)^{-1}``.

    ``B T = T A`` holds up to the truncation error of ``D``.
    """
    if grid.N < 5:
        raise GridTooCoarse("the derivative pair needs N >= 5")
    d = derivative_op(grid, scheme)
    a = d - multiplication_op(grid, lambda x: 2.0 * x / (1.0 + x**2))
    return a, d, _inverse_one_plus_x2(grid)


def bump(center: float, radius: float):
    """Smooth compactly supported test function."""

    def fn(x):
        u = (np.asarray(x) - center) / radius
        inside = np.abs(u) < 1.0
        out = np.zeros_like(u, dtype=float)
        out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
        return out

    return fn


def x2_metric(grid: Grid, floor=None, level=None) -> MetricOperator:
    """Multiplication by ``x^2 + floor``.

    The grid contains ``x = 0``, so a positive floor is needed. By default
    it is ``dx^2``: this shrinks with the mesh, so the smallest eigenvalue
    also tends to zero and the inverse grows along a refinement family.
    """
    floor = grid.dx**2 if floor is None else float(floor)
    return make_metric(multiplication_op(grid, lambda x: x**2 + floor), label="G",
                       refinement_level=level)


def weight_metric(grid: Grid, weight, label="G", level=None, floor=None) -> MetricOperator:
    return make_metric(multiplication_op(grid, weight), floor=floor, label=label,
                       refinement_level=level)


def exp_metric(grid: Grid, a: float = 1.0, rescale=False, level=None) -> MetricOperator:
    """Multiplication by ``exp(a x)``, optionally divided by its largest entry.

    The entries span ``exp(2 |a| L)`` in ratio, which quickly passes the
    default relative positivity floor although every entry is positive, so
    the floor is relaxed to zero here.
    """
    ax = a * grid.x
    w = np.exp(ax - np.max(ax)) if rescale else np.exp(ax)
    return make_metric(np.diag(w), floor=0.0, label="G", refinement_level=level)


def sobolev_metric(grid: Grid, level=None) -> MetricOperator:
    """``(I - D2)^{1/2}`` with the Dirichlet second difference ``D2``."""
    if grid.N < 5:
        raise GridTooCoarse("the Sobolev metric needs N >= 5")
    base = make_metric(np.eye(grid.N) - second_difference(grid), floor=0.0)
    return make_metric(base.power(0.5), floor=0.0, label="G_p", refinement_level=level)


def ga_metric(a) -> MetricOperator:
    """``(I + A^2)^{1/2}`` for Hermitian ``A``; always at least the identity."""
    a = check_hermitian(a)
    eig = hermitian_eigen(a)
    return make_metric(eig.apply(lambda w: np.sqrt(1.0 + w**2)), floor=0.0, label="G_A")
