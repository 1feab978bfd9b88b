"""
FracHam Hamiltonian

哈密顿量剖面、恒等式与 Modica 检查、径向单调性与 s→1 极限
"""

from .profile import far_field_tail, gradient_components, hamiltonian_profile
from .checks import (
    check_far_field,
    check_symmetry,
    layer_profile,
    modica_margin,
    trusted_columns,
    verify_identity,
    verify_modica,
    well_depth,
)
from .radial import radial_hamiltonian
from .limits import s_limit_split

__all__ = [
    "far_field_tail",
    "gradient_components",
    "hamiltonian_profile",
    "check_far_field",
    "check_symmetry",
    "layer_profile",
    "modica_margin",
    "trusted_columns",
    "verify_identity",
    "verify_modica",
    "well_depth",
    "radial_hamiltonian",
    "s_limit_split",
]
