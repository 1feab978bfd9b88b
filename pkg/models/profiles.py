"""
FracHam Profile Models

定义非线性项、层解、径向解以及相关报告的数据模型
"""

from enum import Enum
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .base import CheckReport, FracOrder, GridFunction, frozen_array
from .mesh import HalfStripField, LinearSystemStats

ScalarMap = Callable[[np.ndarray], np.ndarray]


# ===== 非线性项 =====

class Nonlinearity(BaseModel):
    """
    Nonlinearity

    f、f' 与势函数 G（G' = -f），以及参考值 g_ref = G(1)
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str = Field(..., description="非线性项名称")
    f: ScalarMap = Field(..., description="f(v)")
    fprime: ScalarMap = Field(..., description="f'(v)")
    G: ScalarMap = Field(..., description="势函数 G(v)")
    g_ref: float = Field(..., description="参考值 G(1)")
    params: Dict[str, float] = Field(default_factory=dict, description="参数")
    scale: float = Field(default=1.0, gt=0.0, description="相对于原始 f 的缩放因子")

    def gap(self, v: Any) -> np.ndarray:
        """势能差 G(v) - G(1)"""
        return self.G(np.asarray(v, dtype=np.float64)) - self.g_ref

    def scaled(self, factor: float) -> "Nonlinearity":
        """
        返回 f/factor、f'/factor、G/factor

        用于把迹方程 (-Δ)^s v = κ f(v) 归一化为 (-Δ)^s v = f(v)。
        """
        if factor <= 0.0:
            raise ValueError("缩放因子必须为正")
        f, fp, G = self.f, self.fprime, self.G
        return Nonlinearity(
            name=self.name,
            f=lambda v: f(v) / factor,
            fprime=lambda v: fp(v) / factor,
            G=lambda v: G(v) / factor,
            g_ref=self.g_ref / factor,
            params=dict(self.params),
            scale=self.scale / factor,
        )

    def curvature_bound(self, lo: float = -1.0, hi: float = 1.0, samples: int = 401) -> float:
        """max |G''| = max |f'| 在 [lo, hi] 上的采样值"""
        v = np.linspace(lo, hi, samples)
        return float(np.max(np.abs(self.fprime(v))))


# ===== 解模型 =====

class LayerSolution(BaseModel):
    """
    Layer Solution

    单调递增、两端趋于 ±1 的层解
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    trace: GridFunction
    field: HalfStripField
    order: FracOrder
    pinned_at_zero: bool = Field(default=True, description="是否钉扎 trace(0)=0")
    stats: LinearSystemStats = Field(default_factory=LinearSystemStats)
    end_tolerance: float = Field(default=0.1, gt=0.0, description="端点与 ±1 的允许偏差")

    @model_validator(mode="after")
    def _validate_layer(self) -> "LayerSolution":
        v = self.trace.values
        if not np.all(np.diff(v) > 0.0):
            raise ValueError("层解的迹必须严格递增")
        if abs(v[0] + 1.0) > self.end_tolerance or abs(v[-1] - 1.0) > self.end_tolerance:
            raise ValueError(f"层解端点偏离 ±1: v(-X)={v[0]:.4f}, v(X)={v[-1]:.4f}")
        return self


class RadialSolution(BaseModel):
    """径向解：r ∈ [0,X] 上的剖面与 (r,y) 上的延拓"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    profile: GridFunction
    field: HalfStripField
    order: FracOrder
    dimension: int = Field(..., ge=2, description="空间维数 n")
    stats: LinearSystemStats = Field(default_factory=LinearSystemStats)
    decay_tolerance: float = Field(default=1e-8, ge=0.0)
    axis_slope_tolerance: float = Field(default=0.1, ge=0.0, description="|v'(0)| 相对于 max|v'| 的上限")

    @model_validator(mode="after")
    def _validate_profile(self) -> "RadialSolution":
        v = self.profile.values
        if abs(v[-1]) > self.decay_tolerance:
            raise ValueError("径向剖面在 r=X 处必须趋于 0")
        if self.profile.x0 != 0.0:
            raise ValueError("径向剖面必须从 r=0 开始")
        if v.size >= 3:
            h = self.profile.h
            # 二阶单侧差分
            axis_slope = abs(-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
            max_slope = float(np.max(np.abs(np.diff(v)))) / h
            if axis_slope > self.axis_slope_tolerance * max_slope:
                raise ValueError(f"径向剖面在 r=0 处导数不为 0: |v'(0)| ≈ {axis_slope:.3e}，max|v'| ≈ {max_slope:.3e}")
        return self

    @property
    def amplitude(self) -> float:
        return float(self.profile.values[0])

    @property
    def is_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.profile.values) <= 0.0))


class RadialStatus(str, Enum):
    """径向求解结果状态"""
    FOUND = "found"
    TRIVIAL = "trivial"
    NOT_CONVERGED = "not_converged"


class RadialSolveResult(BaseModel):
    """径向求解汇总：找到非平凡解，或只收敛到零解"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    status: RadialStatus
    solution: Optional[RadialSolution] = None
    trivial_field: Optional[HalfStripField] = None
    attempts: List[Dict[str, Any]] = Field(default_factory=list)


class ContinuationResult(BaseModel):
    """s 延拓的结果序列"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    s_values: List[float] = Field(default_factory=list)
    layers: List[LayerSolution] = Field(default_factory=list)
    ode_errors: List[float] = Field(default_factory=list, description="sup|v_s - v̄| 在比较窗口上")
    error_window: float = Field(default=5.0, gt=0.0)
    monotone_verdict: Optional[CheckReport] = None


class NecessaryConditionsReport(BaseModel):
    """双稳态必要条件检查"""
    model_config = ConfigDict(frozen=True)

    nec1_pass: bool = Field(..., description="f(±1) = 0")
    nec2_pass: bool = Field(..., description="G > G(1) = G(-1) on (-1,1)")
    integral_f: float = Field(..., description="∫_{-1}^{1} f")
    min_gap: float = Field(..., description="内部采样点上 min(G - G(1))")
    well_mismatch: float = Field(..., description="|G(1) - G(-1)|")
    failing_clauses: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.nec1_pass and self.nec2_pass


class ODELayerTable(BaseModel):
    """经典层解 x(η) 的求积表"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    eta: np.ndarray
    x: np.ndarray
    regularized: bool = False

    @field_validator("eta", "x", mode="before")
    @classmethod
    def _as_array(cls, v: Any) -> np.ndarray:
        return frozen_array(v)


__all__ = [
    "ScalarMap",
    "Nonlinearity",
    "LayerSolution",
    "RadialSolution",
    "RadialStatus",
    "RadialSolveResult",
    "ContinuationResult",
    "NecessaryConditionsReport",
    "ODELayerTable",
]
