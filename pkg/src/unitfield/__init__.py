"""Unit vector fields as submanifolds of the unit tangent bundle.

Charts with expression- or callable-backed metrics, the Sasaki metric
on TM, singular-frame second-fundamental-form formulas with a
finite-difference oracle, and the classified family of metrics whose
radial field is totally geodesic.
"""

from . import errors
from .bundle import (
    BundlePoint,
    BundleTangent,
    connection_map,
    field_tangent_map,
    horizontal_lift,
    project_pushforward,
    sasaki_inner,
    vertical_lift,
)
from .classified import (
    ClassifiedSurface,
    Mesh,
    ODEState,
    ProfilePoint,
    arc_length_chart,
    classified_field,
    classified_metric,
    geodesic_curvature_of_parallels,
    implicit_solution,
    integrate_k,
    mesh_export,
    ode_rhs,
    profile_curve,
    trajectory_implicit_residuals,
    write_curvature_csv,
    write_obj,
    write_profile_csv,
)
from .fieldgeo import (
    Classification,
    LeafData,
    LeafIdentityReport,
    OmegaTensor,
    ShapeData,
    SingularFrameSet,
    classify,
    conjugate_shape_operator,
    curvature_adapted_residual,
    field_singular_frames,
    leaf_data,
    leaf_identity_residuals,
    omega_foliation,
    omega_general,
    omega_umbilic,
    shape_operator,
    singular_frames,
    submanifold_frames,
    tg_condition_residual,
)
from .manifold import ChartMetric, JacobiData, TangentVector, UnitField
from .oracle import SasakiChart, brute_second_fundamental_form, sasaki_metric_matrix
from .scenarios import (
    Scenario,
    build_custom_scenario,
    builtin_scenarios,
    sample_points,
)

__version__ = "0.1.0"

__all__ = [
    "errors",
    "BundlePoint",
    "BundleTangent",
    "connection_map",
    "field_tangent_map",
    "horizontal_lift",
    "project_pushforward",
    "sasaki_inner",
    "vertical_lift",
    "ClassifiedSurface",
    "Mesh",
    "ODEState",
    "ProfilePoint",
    "arc_length_chart",
    "classified_field",
    "classified_metric",
    "geodesic_curvature_of_parallels",
    "implicit_solution",
    "integrate_k",
    "mesh_export",
    "ode_rhs",
    "profile_curve",
    "trajectory_implicit_residuals",
    "write_curvature_csv",
    "write_obj",
    "write_profile_csv",
    "Classification",
    "LeafData",
    "LeafIdentityReport",
    "OmegaTensor",
    "ShapeData",
    "SingularFrameSet",
    "classify",
    "conjugate_shape_operator",
    "curvature_adapted_residual",
    "field_singular_frames",
    "leaf_data",
    "leaf_identity_residuals",
    "omega_foliation",
    "omega_general",
    "omega_umbilic",
    "shape_operator",
    "singular_frames",
    "submanifold_frames",
    "tg_condition_residual",
    "ChartMetric",
    "JacobiData",
    "TangentVector",
    "UnitField",
    "SasakiChart",
    "brute_second_fundamental_form",
    "sasaki_metric_matrix",
    "Scenario",
    "build_custom_scenario",
    "builtin_scenarios",
    "sample_points",
    "__version__",
]
