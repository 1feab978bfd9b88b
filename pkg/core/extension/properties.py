"""
FracHam Extension Properties

弱最大值原理、比较原理、Harnack 常数估计与 Hopf 引理的数值检查
"""

from typing import Optional

import numpy as np
import scipy.sparse as sp
import structlog
from scipy.sparse.linalg import splu

from models.base import CheckReport, CheckStatus, FracOrder, SideCondition
from models.errors import NumericalError, PreconditionViolation
from models.mesh import BoundaryData, HalfStripField, HalfStripMesh
from .assembly import assemble_operator, build_field, fit_flux
from .dirichlet import boundary_values, solve_dirichlet
from .metrics import mesh_metrics

logger = structlog.get_logger(__name__)

HARNACK_HALF_WIDTH = 4.0
HARNACK_RADIUS = 1.0
MAX_RESAMPLES = 20


# ===== 最大值原理与比较原理 =====

def check_max_principle(u: HalfStripField, tol: float = 1e-12) -> CheckReport:
    """内部节点最小值 ≥ -tol"""
    interior = u.values[1:-1, 1:-1]
    minimum = float(np.min(interior)) if interior.size else 0.0
    return CheckReport.from_bool("max_principle", minimum >= -tol, value=minimum, tolerance=tol)


def random_boundary(mesh: HalfStripMesh, rng: np.random.Generator, scale: float = 1.0) -> BoundaryData:
    """四边独立均匀分布于 [0, scale) 的非负边界数据"""
    nxp, nyp = mesh.nx + 1, mesh.ny + 1
    return BoundaryData(
        bottom=scale * rng.random(nxp),
        top=scale * rng.random(nxp),
        left=scale * rng.random(nyp),
        right=scale * rng.random(nyp),
    )


def check_comparison(mesh: HalfStripMesh, lower: BoundaryData, upper: BoundaryData, tol: float = 1e-12) -> CheckReport:
    """
    比较原理：lower ≤ upper 逐节点成立时，两个 Dirichlet 解满足同样的序

    Raises:
        PreconditionViolation: 边界数据不满足 lower ≤ upper
    """
    lo, _ = boundary_values(mesh, lower)
    hi, mask = boundary_values(mesh, upper)
    if np.any(lo[mask] > hi[mask]):
        raise PreconditionViolation("比较原理要求边界数据 lower ≤ upper")
    u_lo, _ = solve_dirichlet(mesh, lower)
    u_hi, _ = solve_dirichlet(mesh, upper)
    gap = float(np.min(u_hi.values - u_lo.values))
    return CheckReport.from_bool("comparison", gap >= -tol, value=gap, tolerance=tol)


# ===== Harnack =====

def _random_sines(rng: np.random.Generator, t: np.ndarray, modes: int = 3) -> np.ndarray:
    amps = rng.uniform(-1.0, 1.0, modes)
    phases = rng.uniform(0.0, 2.0 * np.pi, modes)
    k = np.arange(1, modes + 1)
    total = np.sin(np.outer(t, k) * np.pi / HARNACK_HALF_WIDTH + phases) @ amps
    return total / np.sum(np.abs(amps))


def harnack_mesh(order: FracOrder, resolution: int = 16) -> HalfStripMesh:
    """[-4,4]×[0,4] 上的网格"""
    L = HARNACK_HALF_WIDTH
    return HalfStripMesh(
        X=L,
        Y=L,
        nx=2 * resolution,
        ny=resolution,
        grading=HalfStripMesh.default_grading(order.a, L, resolution),
        weight_exponent=order.a,
        side_condition=SideCondition.ASYMPTOTE,
    )


def solve_robin(mesh: HalfStripMesh, d: np.ndarray, g: np.ndarray) -> np.ndarray:
    """
    L_a φ = 0，底边 -y^a φ_y + d φ = 0，其余三边 φ = g

    Args:
        mesh: 网格
        d: 底边节点上的 Robin 系数（长度 nx+1）
        g: 与网格同形的数组，只使用侧边与顶边的值
    """
    A = assemble_operator(mesh)
    m = mesh_metrics(mesh, mesh.weight_exponent)
    robin = np.zeros(mesh.node_count)
    robin[: mesh.nx + 1] = m.x_measure * d
    K = (A + sp.diags(robin)).tocsr()

    mask = np.zeros(mesh.shape, dtype=bool)
    mask[:, 0] = mask[:, -1] = mask[-1, :] = True
    D = np.flatnonzero(mask.ravel())
    F = np.flatnonzero(~mask.ravel())
    flat = np.asarray(g, dtype=np.float64).ravel().copy()
    flat[F] = splu(K[F][:, F].tocsc()).solve(-(K[F][:, D] @ flat[D]))
    return flat.reshape(mesh.shape)


def estimate_harnack(
    order: FracOrder,
    trials: int,
    *,
    seed: int = 0,
    d_bound: float = 1.0,
    resolution: int = 16,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """
    随机正解的 sup/inf 比值（B_1^+ ⊂ [-4,4]×[0,4]）的最大值

    d 与边界数据由随机正弦叠加生成：|d| ≤ d_bound，g = exp(随机正弦) > 0。
    φ 出现非正值的试验被丢弃并重新采样。

    Raises:
        NumericalError: 连续 MAX_RESAMPLES 次得到非正解
    """
    if trials < 1:
        raise ValueError("trials 必须 ≥ 1")
    rng = rng or np.random.default_rng(seed)
    mesh = harnack_mesh(order, resolution)
    X, Yg = np.meshgrid(mesh.x_nodes, mesh.y_nodes)
    ball = X ** 2 + Yg ** 2 <= HARNACK_RADIUS ** 2
    worst = 1.0
    for trial in range(trials):
        for attempt in range(MAX_RESAMPLES):
            d = d_bound * _random_sines(rng, mesh.x_nodes)
            g = np.exp(_random_sines(rng, X.ravel()).reshape(X.shape) + _random_sines(rng, Yg.ravel()).reshape(X.shape))
            phi = solve_robin(mesh, d, g)
            if np.min(phi) > 0.0:
                break
            logger.debug(f"Harnack 试验 {trial} 第 {attempt} 次采样出现非正解，重新采样")
        else:
            raise NumericalError(f"Harnack 试验 {trial} 连续 {MAX_RESAMPLES} 次得到非正解")
        ratio = float(np.max(phi[ball]) / np.min(phi[ball]))
        worst = max(worst, ratio)
    logger.info(f"Harnack 估计: a={order.a:.3f}, {trials} 次试验, 最大比值 {worst:.4f}")
    return worst


# ===== Hopf =====

def hopf_barrier(mesh: HalfStripMesh) -> HalfStripField:
    """u = y^{1-a}(1 - y/(2Y)) cos(πx/(2X))：非负、底边为 0 且离散上调和"""
    a = mesh.weight_exponent
    x, y = mesh.x_nodes, mesh.y_nodes
    profile = y ** (1.0 - a) * (1.0 - y / (2.0 * mesh.Y))
    values = profile[:, None] * np.cos(0.5 * np.pi * x / mesh.X)[None, :]
    values[:, [0, -1]] = 0.0
    return build_field(mesh, values, fit_flux(mesh, values))


def check_hopf(u: HalfStripField, boundary_point_index: int, tol: float = 1e-10) -> float:
    """
    底边节点处的加权单侧通量 -y^a u_y（按 y^{1-a} 拟合）

    Raises:
        PreconditionViolation: u 有负值、内部不严格为正、该点不为 0 或离散上不满足 L_a u ≤ 0
    """
    mesh = u.mesh
    values = u.values
    i = int(boundary_point_index)
    if not 0 <= i <= mesh.nx:
        raise PreconditionViolation(f"边界点编号 {i} 越界")
    scale = max(float(np.max(np.abs(values))), 1.0)
    clauses = []
    if np.min(values) < -tol * scale:
        clauses.append("u ≥ 0")
    if not np.all(values[1:, 1:-1] > 0.0):
        clauses.append("内部 u > 0")
    if abs(values[0, i]) > tol * scale:
        clauses.append("u(点) = 0")
    A = assemble_operator(mesh)
    Au = (A @ values.ravel()).reshape(mesh.shape)
    diag = A.diagonal().reshape(mesh.shape)
    if np.any(Au[1:-1, 1:-1] < -tol * scale * diag[1:-1, 1:-1]):
        clauses.append("L_a u ≤ 0")
    if clauses:
        raise PreconditionViolation(f"Hopf 检查的前置条件不成立: {', '.join(clauses)}")
    flux = float(fit_flux(mesh, values)[i])
    logger.debug(f"Hopf 通量: 节点 {i}, -y^a u_y = {flux:.6e}")
    return flux


def hopf_report(flux: float, tol: float = 1e-10) -> CheckReport:
    """通量严格为负（超过容差）时 PASS"""
    status = CheckStatus.PASS if flux < -tol else CheckStatus.FAIL
    return CheckReport(name="hopf", status=status, value=flux, tolerance=tol)


__all__ = [
    "check_max_principle",
    "random_boundary",
    "check_comparison",
    "harnack_mesh",
    "solve_robin",
    "estimate_harnack",
    "hopf_barrier",
    "check_hopf",
    "hopf_report",
]
