"""
FracHam Dirichlet-to-Neumann Map

离散 DtN：把底边自由节点的迹映射为加权余法向通量。
Schur 补 S = A_BB - A_BI A_II^{-1} A_IB 稠密对称半正定，½vᵀSv + bᵀv + c0 为迹 v 的最小延拓能量。
"""

from typing import Any, Optional

import numpy as np
import structlog
from cachetools import LRUCache, cached
from cachetools.keys import hashkey

from models.base import FracOrder, GridFunction, MeshGeometry, SideCondition
from models.mesh import BoundaryData, HalfStripField, HalfStripMesh
from core.kernels import poisson_cdf
from .assembly import assemble_operator, build_field, dirichlet_mask, flux_trace, side_columns
from .convolution import check_compatible, extend_by_convolution
from .dirichlet import solve_dirichlet
from .linear import InteriorSolver
from .metrics import mesh_metrics

logger = structlog.get_logger(__name__)


# ===== 远场侧边模型 =====

def far_field_model(
    mesh: HalfStripMesh,
    order: FracOrder,
    lower: float = -1.0,
    upper: float = 1.0,
    center: float = 0.0,
) -> np.ndarray:
    """
    侧边（top_condition=far_field 时也含顶边）的远场模型 u = L- + (L+ - L-)·Φ_s(x - x_c, y + ℓ)

    y=0 行的侧边节点精确取 L±；径向网格返回 0；side_condition=asymptote 时侧边为常数 L±。
    s = ½、ℓ = 1 时即为 arctan 层的精确延拓 (2/π)arctan(x/(1+y))。
    """
    if mesh.geometry == MeshGeometry.RADIAL:
        return np.zeros(mesh.shape)
    X, Yg = np.meshgrid(mesh.x_nodes, mesh.y_nodes)
    jump = upper - lower
    values = lower + jump * poisson_cdf(order.with_dimension(1), X - center, Yg + mesh.far_field_shift)
    if mesh.side_condition == SideCondition.ASYMPTOTE:
        values[:, 0] = lower
        values[:, -1] = upper
    values[0, 0] = lower
    values[0, -1] = upper
    return values


# ===== 线性 DtN =====

def dtn_apply(
    v: GridFunction,
    order: FracOrder,
    mesh: HalfStripMesh,
    *,
    direct_limit: int = 1_000_000,
    rtol: float = 1e-12,
) -> GridFunction:
    """
    计算 -y^a ∂_y u(·, 0)，u 为 v 的加权调和延拓

    侧边与顶边数据取自 Poisson 卷积延拓，再在网格上求解 Dirichlet 问题并提取离散通量；
    乘以 d_s 即近似 (-Δ)^s v。
    """
    extension = extend_by_convolution(v, order, mesh)
    u = extension.values
    boundary = BoundaryData(bottom=u[0], top=u[-1], left=u[:, 0], right=u[:, -1])
    field, stats = solve_dirichlet(mesh, boundary, direct_limit=direct_limit, rtol=rtol)
    logger.debug(f"dtn_apply: 求解器 {stats.solver}，残差 {stats.residual_norm:.3e}")
    return GridFunction(x0=mesh.x_start, h=mesh.hx, values=field.flux_trace.copy())


class DirichletToNeumannMap:
    """
    Discrete Dirichlet-to-Neumann Map

    节点划分：B 为底边自由节点，D 为 dirichlet_mask 节点，I 为其余节点。
    apply(v) = S v + b 等于底边对偶单元上的通量平衡 (Au)_B，除以 M = μ_B 即离散通量。
    """

    def __init__(
        self,
        mesh: HalfStripMesh,
        dirichlet_values: np.ndarray,
        direct_limit: int = 1_000_000,
        cg_rtol: float = 1e-12,
        chunk: int = 64,
    ):
        self.mesh = mesh
        A = assemble_operator(mesh)
        mask = dirichlet_mask(mesh)
        bottom = np.zeros(mesh.shape, dtype=bool)
        bottom[0] = ~mask[0]
        inner = ~mask & ~bottom

        self.columns = np.flatnonzero(bottom[0])
        self.B = np.flatnonzero(bottom.ravel())
        self.D = np.flatnonzero(mask.ravel())
        self.I = np.flatnonzero(inner.ravel())
        self.u_D = np.asarray(dirichlet_values, dtype=np.float64).ravel()[self.D].copy()

        A_BB = A[self.B][:, self.B].toarray()
        A_BI = A[self.B][:, self.I]
        A_BD = A[self.B][:, self.D]
        self._A_IB = A[self.I][:, self.B].tocsc()
        self._A_ID = A[self.I][:, self.D]
        A_DD = A[self.D][:, self.D]

        self.solver = InteriorSolver(A[self.I][:, self.I], direct_limit=direct_limit, rtol=cg_rtol)
        S = A_BB.copy()
        for start in range(0, self.B.size, chunk):
            cols = slice(start, min(start + chunk, self.B.size))
            sol = self.solver.solve(self._A_IB[:, cols].toarray())
            S[:, cols] -= A_BI @ sol
        self.S = 0.5 * (S + S.T)

        load = self._A_ID @ self.u_D
        self._z_D = self.solver.solve(load)
        self.b = A_BD @ self.u_D - A_BI @ self._z_D
        self.c0 = float(0.5 * self.u_D @ (A_DD @ self.u_D) - 0.5 * load @ self._z_D)
        self.M = mesh_metrics(mesh, mesh.weight_exponent).x_measure[self.columns].copy()
        logger.info(f"DtN Schur 补完成: |B|={self.B.size}, |I|={self.I.size}, 求解器 {self.solver.name}")

    @property
    def size(self) -> int:
        return int(self.B.size)

    def apply(self, v: np.ndarray) -> np.ndarray:
        """S v + b"""
        return self.S @ v + self.b

    def flux(self, v: np.ndarray) -> np.ndarray:
        """底边自由节点上的离散 -y^a u_y"""
        return self.apply(v) / self.M

    def energy(self, v: np.ndarray) -> float:
        """最小延拓的 ½uᵀAu"""
        return float(0.5 * v @ (self.S @ v) + self.b @ v + self.c0)

    def extend(self, v: np.ndarray) -> np.ndarray:
        """以 v 为底边迹的离散加权调和延拓（二维数组）"""
        flat = np.empty(self.mesh.node_count)
        flat[self.D] = self.u_D
        flat[self.B] = v
        flat[self.I] = -(self.solver.solve(self._A_IB @ v) + self._z_D)
        return flat.reshape(self.mesh.shape)

    def field(self, v: np.ndarray, **trace_kwargs: Any) -> HalfStripField:
        """延拓场，通量在 Dirichlet 侧边列用拟合公式"""
        u = self.extend(v)
        flux = flux_trace(self.mesh, u, fit_columns=side_columns(self.mesh))
        return build_field(self.mesh, u, flux, **trace_kwargs)


def _dtn_key(mesh: HalfStripMesh, dirichlet_values: np.ndarray, direct_limit: int = 1_000_000,
             cg_rtol: float = 1e-12, chunk: int = 64):
    values = np.ascontiguousarray(np.asarray(dirichlet_values, dtype=np.float64)[dirichlet_mask(mesh)])
    return hashkey(mesh.model_dump_json(), values.tobytes(), direct_limit, cg_rtol, chunk)


@cached(LRUCache(maxsize=4), key=_dtn_key)
def dtn_map(
    mesh: HalfStripMesh,
    dirichlet_values: np.ndarray,
    direct_limit: int = 1_000_000,
    cg_rtol: float = 1e-12,
    chunk: int = 64,
) -> DirichletToNeumannMap:
    """构造（并缓存）给定侧边数据的离散 DtN"""
    return DirichletToNeumannMap(mesh, dirichlet_values, direct_limit=direct_limit, cg_rtol=cg_rtol, chunk=chunk)


def far_field_dtn(
    mesh: HalfStripMesh,
    order: FracOrder,
    lower: float = -1.0,
    upper: float = 1.0,
    center: float = 0.0,
    solver: Optional[Any] = None,
) -> DirichletToNeumannMap:
    """以远场模型为侧边数据的 DtN"""
    check_compatible(order, mesh)
    values = far_field_model(mesh, order, lower, upper, center)
    if solver is None:
        return dtn_map(mesh, values)
    return dtn_map(mesh, values, solver.direct_limit, solver.cg_rtol, solver.schur_chunk)


__all__ = [
    "far_field_model",
    "dtn_apply",
    "DirichletToNeumannMap",
    "dtn_map",
    "far_field_dtn",
]
