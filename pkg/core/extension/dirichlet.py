"""
FracHam Dirichlet Solver

截断半带上 div(y^a ∇u) = 0 的 Dirichlet 问题
"""

from typing import Any, List, Tuple

import numpy as np
import structlog

from models.errors import ConvergenceError
from models.mesh import BoundaryData, HalfStripField, HalfStripMesh, LinearSystemStats
from .assembly import assemble_operator, build_field, flux_trace, is_symmetric, weighted_residual
from .linear import InteriorSolver

logger = structlog.get_logger(__name__)

RESIDUAL_FACTOR = 1e-10


def boundary_values(mesh: HalfStripMesh, boundary: BoundaryData) -> Tuple[np.ndarray, np.ndarray]:
    """
    把四边数据写入二维数组

    Returns:
        Tuple[np.ndarray, np.ndarray]: (数值数组, Dirichlet 掩码)；角点处 bottom/top 优先
    """
    nxp, nyp = mesh.nx + 1, mesh.ny + 1
    for name, arr, size in (("bottom", boundary.bottom, nxp), ("top", boundary.top, nxp),
                            ("left", boundary.left, nyp), ("right", boundary.right, nyp)):
        if arr is not None and arr.shape != (size,):
            raise ValueError(f"边界数据 {name} 的长度应为 {size}，实际 {arr.shape}")
    values = np.zeros(mesh.shape)
    mask = np.zeros(mesh.shape, dtype=bool)
    if boundary.left is not None:
        values[:, 0] = boundary.left
        mask[:, 0] = True
    if boundary.right is not None:
        values[:, -1] = boundary.right
        mask[:, -1] = True
    values[0, :] = boundary.bottom
    values[-1, :] = boundary.top
    mask[0, :] = True
    mask[-1, :] = True
    return values, mask


def solve_dirichlet(
    mesh: HalfStripMesh,
    boundary: BoundaryData,
    *,
    direct_limit: int = 1_000_000,
    rtol: float = 1e-12,
    **trace_kwargs: Any,
) -> Tuple[HalfStripField, LinearSystemStats]:
    """
    求解 Dirichlet 问题

    自由节点满足 A_FF u_F = -A_FD u_D；要求残差 ≤ 1e-10·‖rhs‖，否则抛出 ConvergenceError。
    left 为 None 时 x 起始列为自然边界（径向轴）。

    Args:
        mesh: 网格
        boundary: 四边数据
        direct_limit: 稀疏直接分解的未知数上限
        rtol: CG 相对容差
        trace_kwargs: 传给 trace GridFunction 的元数据（渐近值等）

    Returns:
        Tuple[HalfStripField, LinearSystemStats]: 解场与求解统计
    """
    A = assemble_operator(mesh)
    values, mask = boundary_values(mesh, boundary)
    flat = values.ravel()
    dirichlet = np.flatnonzero(mask.ravel())
    free = np.flatnonzero(~mask.ravel())

    A_FF = A[free][:, free]
    rhs = -(A[free][:, dirichlet] @ flat[dirichlet])
    solver = InteriorSolver(A_FF, direct_limit=direct_limit, rtol=rtol)
    flat[free] = solver.solve(rhs)

    rhs_norm = float(np.linalg.norm(rhs))
    residual_norm = float(np.linalg.norm(A_FF @ flat[free] - rhs)) if free.size else 0.0
    converged = residual_norm <= RESIDUAL_FACTOR * rhs_norm or residual_norm <= 1e-300
    stats = LinearSystemStats(
        iterations=solver.iterations if not solver.direct else 1,
        residual_norm=residual_norm,
        assembly_symmetric=is_symmetric(A),
        converged=converged,
        solver=solver.name,
        interior_residual=weighted_residual(A, flat, free),
    )
    if not converged:
        raise ConvergenceError(
            f"Dirichlet 求解残差 {residual_norm:.3e} 超过 {RESIDUAL_FACTOR:.0e}·‖rhs‖={rhs_norm:.3e}", stats=stats
        )

    u = flat.reshape(mesh.shape)
    fit_columns: List[int] = [c for c in (0, mesh.nx) if mask[:, c].all()]
    flux = flux_trace(mesh, u, fit_columns=fit_columns)
    logger.debug(f"Dirichlet 求解完成: 自由节点 {free.size}，残差 {residual_norm:.3e}")
    return build_field(mesh, u, flux, **trace_kwargs), stats


__all__ = [
    "boundary_values",
    "solve_dirichlet",
]
