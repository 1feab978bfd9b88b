"""
FracHam Mesh Models

定义截断半带网格、延拓场和线性求解统计
"""

from typing import Any, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .base import GridFunction, MeshGeometry, SideCondition, TopCondition, frozen_array


# ===== 网格 =====

class HalfStripMesh(BaseModel):
    """
    Half-Strip Mesh

    截断半带 [-X,X]×[0,Y]（strip）或径向半柱 [0,X]×[0,Y]（radial）上的张量网格。
    y 方向节点 y_j = Y·(j/ny)^γ，在 y=0 附近加密以解析 y^{1-a} 边界层。
    """
    model_config = ConfigDict(frozen=True)

    X: float = Field(..., gt=0.0, description="x 方向半宽（径向时为半径）")
    Y: float = Field(..., gt=0.0, description="高度")
    nx: int = Field(..., ge=8, description="x 方向单元数")
    ny: int = Field(..., ge=8, description="y 方向单元数")
    grading: float = Field(default=1.0, ge=1.0, description="y 方向加密指数 γ")
    weight_exponent: float = Field(..., gt=-1.0, lt=1.0, description="权重指数 a")
    geometry: MeshGeometry = Field(default=MeshGeometry.STRIP, description="几何类型")
    dimension: int = Field(default=1, ge=1, description="径向测度 r^{n-1} 中的 n")
    far_field_shift: float = Field(default=1.0, ge=0.0, description="远场侧边模型中的高度平移 ℓ")
    side_condition: SideCondition = Field(default=SideCondition.FAR_FIELD, description="侧边截断条件")
    top_condition: TopCondition = Field(default=TopCondition.NEUMANN, description="顶边截断条件")

    @model_validator(mode="after")
    def _validate_geometry(self) -> "HalfStripMesh":
        if self.geometry == MeshGeometry.RADIAL and self.dimension < 2:
            raise ValueError("径向网格需要 dimension ≥ 2")
        if self.geometry == MeshGeometry.STRIP and self.dimension != 1:
            raise ValueError("strip 网格只支持 dimension = 1")
        return self

    @staticmethod
    def default_grading(a: float, Y: Optional[float] = None, ny: Optional[int] = None,
                        min_increment: float = 1e-6) -> float:
        """
        默认加密指数 γ = 2/(1+a)，截断到 [1,4]

        给定 Y 与 ny 时再限制 γ，使第一个单元满足 y_1^{1-a}/(1-a) ≥ min_increment，
        否则 u(x,y_1) - u(x,0) 低于双精度分辨率，Neumann 通量被舍入误差淹没。
        """
        gamma = float(np.clip(2.0 / (1.0 + a), 1.0, 4.0))
        if Y is None or ny is None or ny < 2:
            return gamma
        y1_min = (min_increment * (1.0 - a)) ** (1.0 / (1.0 - a))
        if y1_min >= Y:
            return 1.0
        gamma_max = np.log(Y / y1_min) / np.log(ny)
        return float(np.clip(min(gamma, gamma_max), 1.0, 4.0))

    @property
    def x_start(self) -> float:
        return 0.0 if self.geometry == MeshGeometry.RADIAL else -self.X

    @property
    def hx(self) -> float:
        return (self.X - self.x_start) / self.nx

    @property
    def x_nodes(self) -> np.ndarray:
        return frozen_array(self.x_start + self.hx * np.arange(self.nx + 1))

    @property
    def y_nodes(self) -> np.ndarray:
        y = self.Y * (np.arange(self.ny + 1) / self.ny) ** self.grading
        y[0] = 0.0
        y[-1] = self.Y
        return frozen_array(y)

    @property
    def shape(self) -> tuple:
        """节点数组形状 (ny+1, nx+1)，第一维为 y"""
        return (self.ny + 1, self.nx + 1)

    @property
    def node_count(self) -> int:
        return (self.ny + 1) * (self.nx + 1)

    def node_index(self, i: Any, j: Any) -> Any:
        """节点 (x_i, y_j) 的全局编号"""
        return np.asarray(j) * (self.nx + 1) + np.asarray(i)

    def refined(self, factor: int = 2) -> "HalfStripMesh":
        """各方向单元数乘以 factor"""
        return HalfStripMesh(**{**self.model_dump(), "nx": self.nx * factor, "ny": self.ny * factor})


class BoundaryData(BaseModel):
    """
    Dirichlet 边界数据

    bottom/top 长度 nx+1，left/right 长度 ny+1。left 为 None 时该边为自然边界（径向轴）。
    角点处 bottom/top 优先。
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    bottom: np.ndarray
    top: np.ndarray
    left: Optional[np.ndarray] = None
    right: Optional[np.ndarray] = None

    @field_validator("bottom", "top", "left", "right", mode="before")
    @classmethod
    def _as_array(cls, v: Any) -> Optional[np.ndarray]:
        if v is None:
            return None
        return frozen_array(v)

    @classmethod
    def from_function(cls, mesh: HalfStripMesh, func, natural_left: bool = False) -> "BoundaryData":
        """由函数 func(x, y) 采样四边数据"""
        x, y = mesh.x_nodes, mesh.y_nodes
        return cls(
            bottom=func(x, np.zeros_like(x)),
            top=func(x, np.full_like(x, mesh.Y)),
            left=None if natural_left else func(np.full_like(y, x[0]), y),
            right=func(np.full_like(y, x[-1]), y),
        )

    @classmethod
    def constant(cls, mesh: HalfStripMesh, value: float) -> "BoundaryData":
        return cls.from_function(mesh, lambda x, y: np.full(np.broadcast(x, y).shape, value))


# ===== 延拓场 =====

class HalfStripField(BaseModel):
    """
    Half-Strip Field

    网格上的延拓 u(x_i, y_j)，values[j, i]。trace 为 j=0 行，
    flux_trace 为 -y^a ∂_y u 在 y=0 处的离散值。
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mesh: HalfStripMesh
    values: np.ndarray
    trace: GridFunction
    flux_trace: np.ndarray

    @field_validator("values", "flux_trace", mode="before")
    @classmethod
    def _as_array(cls, v: Any) -> np.ndarray:
        return frozen_array(v)

    @model_validator(mode="after")
    def _validate_shapes(self) -> "HalfStripField":
        if self.values.shape != self.mesh.shape:
            raise ValueError(f"values 形状 {self.values.shape} 与网格 {self.mesh.shape} 不符")
        if self.flux_trace.shape != (self.mesh.nx + 1,):
            raise ValueError("flux_trace 长度必须为 nx+1")
        if self.trace.size != self.mesh.nx + 1 or not np.array_equal(self.trace.values, self.values[0]):
            raise ValueError("trace 必须与 j=0 行完全一致")
        return self


class LinearSystemStats(BaseModel):
    """线性/非线性求解统计"""
    model_config = ConfigDict(frozen=True)

    iterations: int = Field(default=0, ge=0, description="迭代次数")
    residual_norm: float = Field(default=0.0, ge=0.0, description="残差范数")
    assembly_symmetric: bool = Field(default=True, description="组装矩阵是否精确对称")
    converged: bool = Field(default=True, description="是否收敛")
    solver: str = Field(default="direct", description="求解器")
    boundary_residual: Optional[float] = Field(default=None, ge=0.0, description="Neumann 边界残差 sup")
    interior_residual: Optional[float] = Field(default=None, ge=0.0, description="内部加权散度残差 sup")
    lagrange_multiplier: Optional[float] = Field(default=None, description="钉扎约束的 Lagrange 乘子")
    energy_history: List[float] = Field(default_factory=list, description="梯度流能量序列")
    damping_retries: int = Field(default=0, ge=0, description="Jacobian 奇异时的阻尼重试次数")


__all__ = [
    "HalfStripMesh",
    "BoundaryData",
    "HalfStripField",
    "LinearSystemStats",
]
