"""
FracHam Radial Hamiltonian

(1+a)∫½t^a(u_r² - u_y²)dt - G(u(r,0)) 关于 r 不增，导数为 -(1+a)(n-1)/r ∫t^a u_r² dt
"""

from typing import Optional

import numpy as np
import structlog

from models.config import ToleranceConfig
from models.hamiltonian import RadialHamiltonianReport
from models.profiles import Nonlinearity, RadialSolution
from .profile import hamiltonian_profile

logger = structlog.get_logger(__name__)

DERIVATIVE_FLOOR = 1e-6
DERIVATIVE_FRACTION = 1e-2


def radial_hamiltonian(
    rad: RadialSolution,
    nl: Nonlinearity,
    tolerances: Optional[ToleranceConfig] = None,
) -> RadialHamiltonianReport:
    """
    径向哈密顿量剖面

    导数交叉检查只在闭式导数的绝对值超过 max(1e-6, 1e-2·max) 的内部节点上进行。
    """
    tolerances = tolerances or ToleranceConfig()
    mesh = rad.field.mesh
    n = rad.dimension
    r = mesh.x_nodes
    ham = hamiltonian_profile(rad.field, rad.order)
    profile = ham.H - nl.G(rad.field.values[0])

    increases = np.diff(profile)
    max_increase = float(np.max(increases)) if increases.size else 0.0
    monotone = max_increase <= tolerances.radial_monotone

    discrete = np.gradient(profile, r, edge_order=2)
    closed = np.zeros_like(r)
    closed[1:] = -(n - 1) / r[1:] * 2.0 * ham.x_part[1:]
    threshold = max(DERIVATIVE_FLOOR, DERIVATIVE_FRACTION * float(np.max(np.abs(closed))))
    checked = np.abs(closed) > threshold
    checked[[0, -1]] = False
    if np.any(checked):
        rel = np.abs(discrete[checked] - closed[checked]) / np.abs(closed[checked])
        max_rel = float(np.max(rel))
    else:
        max_rel = 0.0
    derivative_pass = max_rel <= tolerances.radial_derivative_relative

    logger.info(
        f"径向哈密顿量: n={n}, 最大增量 {max_increase:.3e}, 导数相对误差 {max_rel:.3e}（{int(np.sum(checked))} 点）"
    )
    return RadialHamiltonianReport(
        r=r,
        profile=profile,
        monotone_pass=monotone,
        max_increase=max_increase,
        derivative_max_relative_error=max_rel,
        derivative_checked_points=int(np.sum(checked)),
        derivative_pass=derivative_pass,
        gap_endpoints=float(profile[0] - profile[-1]),
    )


__all__ = [
    "radial_hamiltonian",
]
