"""Metric operators on finite grids.

Lattices of weighted spaces, Hilbert scales, similarity of operators,
partial inner product spaces and quasi-Hermitian Hamiltonians, all
checked numerically along refinement families.
"""

from metricops.errors import (
    DimensionMismatch,
    GridTooCoarse,
    InsufficientLevels,
    LambdaInSpectrum,
    MetricOpsError,
    NoConvergence,
    NonFiniteWeight,
    NotHermitian,
    NotIntertwined,
    NotNormalized,
    NotPositive,
    NotQuasiHermitian,
    NotSymmetric,
    RecipeUnknown,
    ScenarioError,
    TNotInvertible,
    VerdictUnavailable,
)
from metricops.grids import Grid, RefinementFamily
from metricops.growth import GrowthFit, fit_growth
from metricops.kernels import BACKEND
from metricops.lattice import (
    MetricOperator,
    embedding_constant,
    identity_metric,
    inverse,
    join,
    make_metric,
    meet,
    order_verdict,
    r_of,
    seven_lattice,
    space_norm,
)
from metricops.pipspace import jay_scan, klmn_applicability, klmn_restrict, representative_norm
from metricops.pseudo import dieudonne_residual, make_pair, physical_hamiltonian, pt_oscillator
from metricops.scale import build_scale, duality_pair, end_space_diagnostic
from metricops.similarity import (
    check_intertwining,
    classify,
    make_case,
    spectral_inclusion,
    spectrum_report,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DimensionMismatch",
    "Grid",
    "GridTooCoarse",
    "GrowthFit",
    "InsufficientLevels",
    "LambdaInSpectrum",
    "MetricOperator",
    "MetricOpsError",
    "NoConvergence",
    "NonFiniteWeight",
    "NotHermitian",
    "NotIntertwined",
    "NotNormalized",
    "NotPositive",
    "NotQuasiHermitian",
    "NotSymmetric",
    "RecipeUnknown",
    "RefinementFamily",
    "ScenarioError",
    "TNotInvertible",
    "VerdictUnavailable",
    "__version__",
    "build_scale",
    "check_intertwining",
    "classify",
    "dieudonne_residual",
    "duality_pair",
    "embedding_constant",
    "end_space_diagnostic",
    "fit_growth",
    "identity_metric",
    "inverse",
    "jay_scan",
    "join",
    "klmn_applicability",
    "klmn_restrict",
    "make_case",
    "make_metric",
    "make_pair",
    "meet",
    "order_verdict",
    "physical_hamiltonian",
    "pt_oscillator",
    "r_of",
    "representative_norm",
    "seven_lattice",
    "space_norm",
    "spectral_inclusion",
    "spectrum_report",
]
