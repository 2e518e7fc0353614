"""hermlab: a numerical laboratory for Hermitian geometry.

Computes Chern and Strominger-Bismut connections, torsions, curvatures and
Ricci tensors of Hermitian metrics on coordinate charts, first eigenvalues of
the Laplace-de Rham operator on built-in compact geometries, and machine-checks
the identities and eigenvalue bounds relating them.
"""

from .charts import (
    Box,
    ChartPoint,
    GeometryCatalogueEntry,
    MetricField,
    flat_torus,
    fubini_study,
    iwasawa,
    load_catalogue,
    metric_derivatives,
    nonbalanced_example,
)
from .connections import (
    ConnectionCoefficients,
    HessianPair,
    TorsionTensor,
    chern_connection,
    hessians,
    sb_connection,
    torsion,
)
from .curvature import (
    CurvatureBundle,
    CurvatureExtrema,
    chern_curvature,
    curvature_bundle,
    curvature_extrema,
    first_chern_ricci,
    holomorphic_ricci,
    hsc_bridge_residual,
    hsc_sb,
    sb_curvature_direct,
    sb_curvature_from_chern,
)
from .hodge import (
    FormField,
    Quadrature,
    balanced_residual,
    dbar_star_omega,
    fs_sphere_quadrature,
    inner_product,
    lambda_trace,
    scalar_laplacian,
    tau_forms,
    torus_quadrature,
    weak_adjoint_check,
    weak_commutation_check,
)
from .spectral import (
    SpectralResult,
    analytic_eigenfunction,
    diameter,
    sphere_fs_spectrum,
    spectrum,
    torus_spectrum,
)
from .tensors import ComplexTensor, HermitianMatrix, IndexKind, contract, hermitian_inverse, max_abs
from .verify import (
    CheckReport,
    RunSettings,
    check_bounds,
    identity_suite,
    li_yau_bound,
    run_suite,
    zhongyang_psi,
    zhongyang_series,
)

__all__ = [
    "Box",
    "ChartPoint",
    "CheckReport",
    "ComplexTensor",
    "ConnectionCoefficients",
    "CurvatureBundle",
    "CurvatureExtrema",
    "FormField",
    "GeometryCatalogueEntry",
    "HermitianMatrix",
    "HessianPair",
    "IndexKind",
    "MetricField",
    "Quadrature",
    "RunSettings",
    "SpectralResult",
    "TorsionTensor",
    "analytic_eigenfunction",
    "balanced_residual",
    "check_bounds",
    "chern_connection",
    "chern_curvature",
    "contract",
    "curvature_bundle",
    "curvature_extrema",
    "dbar_star_omega",
    "diameter",
    "first_chern_ricci",
    "flat_torus",
    "fs_sphere_quadrature",
    "fubini_study",
    "hermitian_inverse",
    "hessians",
    "holomorphic_ricci",
    "hsc_bridge_residual",
    "hsc_sb",
    "identity_suite",
    "inner_product",
    "iwasawa",
    "lambda_trace",
    "li_yau_bound",
    "load_catalogue",
    "max_abs",
    "metric_derivatives",
    "nonbalanced_example",
    "run_suite",
    "sb_connection",
    "sb_curvature_direct",
    "sb_curvature_from_chern",
    "scalar_laplacian",
    "spectrum",
    "sphere_fs_spectrum",
    "tau_forms",
    "torsion",
    "torus_quadrature",
    "torus_spectrum",
    "weak_adjoint_check",
    "weak_commutation_check",
    "zhongyang_psi",
    "zhongyang_series",
]

__version__ = "0.1.0"
