"""
FracHam Hamiltonian Models

哈密顿量剖面与恒等式、Modica 估计、径向单调性、s→1 极限的报告模型
"""

from typing import Any, Dict, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .base import CheckStatus, frozen_array


class HamiltonianProfile(BaseModel):
    """
    Hamiltonian Profile

    H(x) = (1+a)∫_0^∞ ½ t^a (u_x² - u_y²) dt，
    partial[j, i] = (1+a)∫_0^{y_j} 同一被积函数，tail 为 y > Y 部分的修正。
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    xs: np.ndarray
    H: np.ndarray
    partial: np.ndarray
    tail: np.ndarray
    tail_bound: np.ndarray
    x_part: np.ndarray = Field(..., description="(1+a)∫ ½ t^a u_x² dt")
    y_part: np.ndarray = Field(..., description="(1+a)∫ ½ t^a u_y² dt")

    @field_validator("xs", "H", "partial", "tail", "tail_bound", "x_part", "y_part", mode="before")
    @classmethod
    def _as_array(cls, v: Any) -> np.ndarray:
        return frozen_array(v)

    @model_validator(mode="after")
    def _validate_consistency(self) -> "HamiltonianProfile":
        if not np.all(np.isfinite(self.tail_bound)):
            raise ValueError("tail_bound 必须有限")
        if self.partial.shape[1] != self.xs.size:
            raise ValueError("partial 的列数必须等于 xs 长度")
        return self


class IdentityReport(BaseModel):
    """哈密顿恒等式 H(x) = G(v(x)) - G(1) 的检查结果"""
    model_config = ConfigDict(frozen=True)

    max_residual: float = Field(..., ge=0.0)
    well_mismatch: float = Field(..., ge=0.0, description="|G(1) - G(-1)|")
    residual_std: float = Field(..., ge=0.0, description="残差在 x 上的样本标准差")
    relative_residual: float = Field(..., ge=0.0, description="max_residual / (G(0) - G(1))")
    status: CheckStatus


class ModicaReport(BaseModel):
    """Modica 型估计的检查结果"""
    model_config = ConfigDict(frozen=True)

    min_margin: float
    min_margin_interior: float = Field(..., description="|trace| ≤ 0.9 的 x、y > 0 节点上的最小裕度")
    tolerance: float = Field(..., ge=0.0)
    status: CheckStatus
    margin_min_y: List[float] = Field(default_factory=list, description="每个 x 上沿 y 的最小裕度")


class RadialHamiltonianReport(BaseModel):
    """径向哈密顿量剖面与单调性"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    r: np.ndarray
    profile: np.ndarray
    monotone_pass: bool
    max_increase: float
    derivative_max_relative_error: float = Field(..., description="与闭式导数的最大相对误差（有意义处）")
    derivative_checked_points: int = Field(default=0, ge=0)
    derivative_pass: bool
    gap_endpoints: float = Field(..., description="profile(0) - profile(X)")

    @field_validator("r", "profile", mode="before")
    @classmethod
    def _as_array(cls, v: Any) -> np.ndarray:
        return frozen_array(v)


class SLimitReport(BaseModel):
    """s→1 时 x 部分与 y 部分的分解"""
    model_config = ConfigDict(frozen=True)

    s_values: List[float]
    x_probe: List[float]
    x_part: List[List[float]] = Field(..., description="x_part[k][m]：第 k 个 s、第 m 个探测点")
    y_part: List[List[float]]
    ode_target: List[float] = Field(..., description="G(v̄(x)) - G(1)")
    y_part_decreasing: bool
    x_part_relative_error: float
    status: CheckStatus
    details: Dict[str, Any] = Field(default_factory=dict)


__all__ = [
    "HamiltonianProfile",
    "IdentityReport",
    "ModicaReport",
    "RadialHamiltonianReport",
    "SLimitReport",
]
