"""
FracHam Extension

加权延拓的局部实现：Poisson 卷积、退化椭圆求解、离散 DtN 与对偶共轭
"""

from .metrics import MeshMetrics, mesh_metrics, weight_moment
from .assembly import (
    assemble_operator,
    build_field,
    dirichlet_mask,
    fit_flux,
    flux_trace,
    is_symmetric,
    side_columns,
    weighted_residual,
)
from .linear import InteriorSolver
from .dirichlet import boundary_values, solve_dirichlet
from .convolution import check_compatible, extend_by_convolution, extension_multiplier
from .dtn import DirichletToNeumannMap, dtn_apply, dtn_map, far_field_dtn, far_field_model
from .nonlinear import solve_neumann_nonlinear
from .duality import conjugate_mesh, conjugate_residual, dual_conjugate
from .energy import energy
from .properties import (
    check_comparison,
    check_hopf,
    check_max_principle,
    estimate_harnack,
    harnack_mesh,
    hopf_barrier,
    hopf_report,
    random_boundary,
    solve_robin,
)

__all__ = [
    "MeshMetrics",
    "mesh_metrics",
    "weight_moment",
    "assemble_operator",
    "build_field",
    "dirichlet_mask",
    "fit_flux",
    "flux_trace",
    "is_symmetric",
    "side_columns",
    "weighted_residual",
    "InteriorSolver",
    "boundary_values",
    "solve_dirichlet",
    "check_compatible",
    "extend_by_convolution",
    "extension_multiplier",
    "DirichletToNeumannMap",
    "dtn_apply",
    "dtn_map",
    "far_field_dtn",
    "far_field_model",
    "solve_neumann_nonlinear",
    "conjugate_mesh",
    "conjugate_residual",
    "dual_conjugate",
    "energy",
    "check_comparison",
    "check_hopf",
    "check_max_principle",
    "estimate_harnack",
    "harnack_mesh",
    "hopf_barrier",
    "hopf_report",
    "random_boundary",
    "solve_robin",
]
