"""
FracHam Radial Solver

(r, y) ∈ [0,X]×[0,Y] 上的径向延拓问题：测度 r^{n-1} 给出 (n-1)/r 输运项，
r=0 为自然（对称）边界，r=X 处 Dirichlet 0。
"""

from typing import Any, Dict, List, Optional

import numpy as np
import structlog
from pydantic import ValidationError

from models.base import FracOrder, GridFunction, MeshGeometry
from models.config import SolverConfig, ToleranceConfig
from models.errors import ConvergenceError, DomainError
from models.mesh import HalfStripField, HalfStripMesh
from models.profiles import Nonlinearity, RadialSolution, RadialSolveResult, RadialStatus
from core.extension import build_field, fit_flux, solve_neumann_nonlinear

logger = structlog.get_logger(__name__)

BUMP_WIDTH = 2.0
TRIVIAL_AMPLITUDE = 1e-6


def _bump_field(mesh: HalfStripMesh, amplitude: float) -> HalfStripField:
    values = np.zeros(mesh.shape)
    r = mesh.x_nodes
    values[0] = amplitude * np.exp(-(r / BUMP_WIDTH) ** 2)
    values[0, -1] = 0.0
    return build_field(mesh, values, fit_flux(mesh, values))


def solve_radial(
    nl: Nonlinearity,
    order: FracOrder,
    n: int,
    mesh: HalfStripMesh,
    *,
    solver: Optional[SolverConfig] = None,
    tolerances: Optional[ToleranceConfig] = None,
) -> RadialSolveResult:
    """
    径向解

    先求零解，再从 solver.radial_amplitudes 中各振幅的高斯型初值出发，
    用相对零解收缩（deflation）的 Newton 寻找非平凡解。

    Returns:
        RadialSolveResult: FOUND（附解）、TRIVIAL（只收敛到零解）或 NOT_CONVERGED

    Raises:
        DomainError: f(0) ≠ 0、n < 2 或网格不是维数 n 的径向网格
    """
    solver = solver or SolverConfig()
    tolerances = tolerances or ToleranceConfig()
    if n < 2:
        raise DomainError(f"径向问题要求 n ≥ 2: {n}")
    if mesh.geometry != MeshGeometry.RADIAL or mesh.dimension != n:
        raise DomainError(f"需要维数 {n} 的径向网格")
    f0 = float(nl.f(np.float64(0.0)))
    if abs(f0) > 1e-12:
        raise DomainError(f"径向问题要求 f(0) = 0，实际 {f0:.3e}")
    order = order.with_dimension(n)
    attempts: List[Dict[str, Any]] = []

    trivial: Optional[HalfStripField] = None
    try:
        trivial, _ = solve_neumann_nonlinear(nl, order, mesh, _bump_field(mesh, 0.0), solver=solver, tolerances=tolerances)
    except ConvergenceError as e:
        logger.warning(f"零解求解未收敛: {e}")
    zero_trace = np.zeros(mesh.nx + 1)

    for amplitude in solver.radial_amplitudes:
        record: Dict[str, Any] = {"amplitude": float(amplitude)}
        try:
            field, stats = solve_neumann_nonlinear(
                nl, order, mesh, _bump_field(mesh, amplitude),
                deflate=[zero_trace], solver=solver, tolerances=tolerances,
            )
        except ConvergenceError as e:
            record.update(status=RadialStatus.NOT_CONVERGED.value, message=str(e))
            attempts.append(record)
            logger.debug(f"振幅 {amplitude} 的初值未收敛")
            continue
        peak = float(np.max(np.abs(field.values[0])))
        record.update(boundary_residual=stats.boundary_residual, peak=peak)
        if peak <= TRIVIAL_AMPLITUDE:
            record["status"] = RadialStatus.TRIVIAL.value
            attempts.append(record)
            continue
        profile = GridFunction(x0=0.0, h=mesh.hx, values=field.values[0].copy())
        try:
            solution = RadialSolution(profile=profile, field=field, order=order, dimension=n, stats=stats)
        except ValidationError as e:
            record.update(status=RadialStatus.NOT_CONVERGED.value, message=e.errors()[0]["msg"])
            attempts.append(record)
            continue
        record["status"] = RadialStatus.FOUND.value
        attempts.append(record)
        logger.info(f"找到径向解: n={n}, s={order.s}, v(0)={solution.amplitude:.6f}")
        return RadialSolveResult(status=RadialStatus.FOUND, solution=solution, trivial_field=trivial, attempts=attempts)

    status = RadialStatus.TRIVIAL if trivial is not None else RadialStatus.NOT_CONVERGED
    logger.info(f"径向求解未找到非平凡解: 状态 {status.value}")
    return RadialSolveResult(status=status, trivial_field=trivial, attempts=attempts)


__all__ = [
    "solve_radial",
]
