"""
FracHam Base Models

定义分数阶阶数、网格函数、算子报告等核心数据模型和枚举类型
"""

from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator
from scipy.interpolate import CubicSpline

from .errors import DomainError


# ===== 枚举定义 =====

class OperatorMethod(str, Enum):
    """(-Δ)^s 的求值方法"""
    PV = "pv"
    FOURIER = "fourier"


class AsymptoteDecay(str, Enum):
    """渐近衰减类型"""
    NONE = "none"
    POWER = "power"


class CheckStatus(str, Enum):
    """检查结果状态"""
    PASS = "pass"
    FAIL = "fail"
    NOT_EXERCISED = "not_exercised"


class SolverStrategy(str, Enum):
    """非线性求解策略"""
    NEWTON = "newton"
    GRADIENT_FLOW = "gradient_flow"


class MeshGeometry(str, Enum):
    """半带网格的几何类型"""
    STRIP = "strip"
    RADIAL = "radial"


class SideCondition(str, Enum):
    """侧边截断条件"""
    ASYMPTOTE = "asymptote"
    FAR_FIELD = "far_field"


class TopCondition(str, Enum):
    """顶边 y=Y 的截断条件"""
    NEUMANN = "neumann"
    FAR_FIELD = "far_field"


def frozen_array(values: Any, dtype=np.float64) -> np.ndarray:
    """复制为只读数组"""
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


# ===== 分数阶阶数 =====

class FracOrder(BaseModel):
    """
    Fractional Order

    分数阶 s ∈ (0,1)、权重指数 a = 1 - 2s 与空间维数 n
    """
    model_config = ConfigDict(frozen=True)

    s: float = Field(..., gt=0.0, lt=1.0, description="分数阶 s")
    n: int = Field(default=1, ge=1, description="空间维数")

    @computed_field
    @property
    def a(self) -> float:
        """权重指数 a = 1 - 2s"""
        return 1.0 - 2.0 * self.s

    def with_dimension(self, n: int) -> "FracOrder":
        return FracOrder(s=self.s, n=n)


class KernelConstants(BaseModel):
    """延拓理论中的常数"""
    model_config = ConfigDict(frozen=True)

    c_ns: float = Field(..., gt=0.0, description="主值积分归一化常数 C_{n,s}")
    d_s: float = Field(..., gt=0.0, description="延拓常数 d_s")
    p_ns: float = Field(..., gt=0.0, description="Poisson 核归一化常数 p_{n,s}")
    e_ns: float = Field(..., gt=0.0, description="基本解常数 e_{n,s}（标定得到）")


# ===== 网格函数 =====

class GridFunction(BaseModel):
    """
    Grid Function

    均匀一维网格上的采样函数，可声明远场渐近值 L±。
    衰减类型为 power 时，窗口外模型为 L± + c±|x - x_c|^{-p}，c± 由端点值拟合。
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x0: float = Field(..., description="左端点")
    h: float = Field(..., gt=0.0, description="网格间距")
    values: np.ndarray = Field(..., description="节点值")
    left_asymptote: Optional[float] = Field(default=None, description="左渐近值 L-")
    right_asymptote: Optional[float] = Field(default=None, description="右渐近值 L+")
    asymptote_decay: AsymptoteDecay = Field(default=AsymptoteDecay.NONE, description="渐近衰减类型")
    decay_exponent: Optional[float] = Field(default=None, gt=0.0, description="幂律衰减指数（通常为 2s）")
    periodic: bool = Field(default=False, description="是否周期采样")
    asymptote_slack: float = Field(default=0.1, ge=0.0, description="端点值与渐近值的允许偏差")

    @field_validator("values", mode="before")
    @classmethod
    def _validate_values(cls, v: Any) -> np.ndarray:
        arr = np.asarray(v, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("values 必须是非空一维数组")
        if not np.all(np.isfinite(arr) | np.isnan(arr)):
            raise ValueError("values 含有无穷值")
        return frozen_array(arr)

    @model_validator(mode="after")
    def _validate_asymptotes(self) -> "GridFunction":
        declared = (self.left_asymptote is not None, self.right_asymptote is not None)
        if any(declared) and not all(declared):
            raise ValueError("左右渐近值必须同时声明")
        if self.asymptote_decay == AsymptoteDecay.POWER and self.decay_exponent is None:
            raise ValueError("power 衰减需要 decay_exponent")
        if self.has_asymptotes and self.periodic:
            raise ValueError("周期网格函数不能声明渐近值")
        if self.has_asymptotes:
            left_gap = abs(self.values[0] - self.left_asymptote)
            right_gap = abs(self.values[-1] - self.right_asymptote)
            if max(left_gap, right_gap) > self.asymptote_slack:
                raise ValueError(
                    f"端点值偏离渐近值: 左={left_gap:.3e}, 右={right_gap:.3e}, 容差={self.asymptote_slack}"
                )
        return self

    @classmethod
    def sample(cls, func, x0: float, x1: float, count: int, periodic: bool = False, **kwargs: Any) -> "GridFunction":
        """
        在 [x0, x1] 上均匀采样 func

        periodic=True 时采样 [x0, x1) 的 count 个点，x1 - x0 为周期。
        """
        if count < 2:
            raise DomainError("采样点数至少为 2")
        h = (x1 - x0) / (count if periodic else count - 1)
        xs = x0 + h * np.arange(count)
        return cls(x0=x0, h=h, values=func(xs), periodic=periodic, **kwargs)

    # ===== 几何属性 =====

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.size)

    @property
    def x_end(self) -> float:
        return self.x0 + self.h * (self.size - 1)

    @property
    def center(self) -> float:
        return 0.5 * (self.x0 + self.x_end)

    @property
    def period(self) -> float:
        return self.h * self.size

    @property
    def has_asymptotes(self) -> bool:
        return self.left_asymptote is not None and self.right_asymptote is not None

    # ===== 远场模型 =====

    def decay_coefficients(self) -> Tuple[float, float]:
        """
        拟合幂律衰减系数 (c-, c+)

        Returns:
            Tuple[float, float]: 左右衰减系数；无幂律衰减时为 (0, 0)
        """
        if not self.has_asymptotes or self.asymptote_decay != AsymptoteDecay.POWER:
            return 0.0, 0.0
        p = self.decay_exponent
        left_dist = self.center - self.x0
        right_dist = self.x_end - self.center
        if left_dist <= 0.0 or right_dist <= 0.0:
            raise DomainError("幂律衰减需要窗口具有正的半宽")
        c_minus = (self.values[0] - self.left_asymptote) * left_dist ** p
        c_plus = (self.values[-1] - self.right_asymptote) * right_dist ** p
        return float(c_minus), float(c_plus)

    def tail_model(self, xq: np.ndarray) -> np.ndarray:
        """窗口外的渐近模型值"""
        xq = np.asarray(xq, dtype=np.float64)
        if not self.has_asymptotes:
            raise DomainError("未声明渐近值，无法在窗口外求值")
        c_minus, c_plus = self.decay_coefficients()
        xi = xq - self.center
        dist = np.maximum(np.abs(xi), 0.5 * (self.x_end - self.x0))
        p = self.decay_exponent or 0.0
        left = self.left_asymptote + c_minus * dist ** (-p)
        right = self.right_asymptote + c_plus * dist ** (-p)
        return np.where(xi < 0.0, left, right)

    def at(self, xq: Any) -> np.ndarray:
        """
        在任意点求值

        窗口内用三次样条插值；周期函数按周期折回；窗口外使用渐近模型。
        """
        xq = np.asarray(xq, dtype=np.float64)
        if self.periodic:
            xs = np.append(self.x, self.x0 + self.period)
            ys = np.append(self.values, self.values[0])
            spline = CubicSpline(xs, ys, bc_type="periodic")
            return spline(self.x0 + np.mod(xq - self.x0, self.period))
        if self.size < 4:
            inside = np.interp(xq, self.x, self.values)
        else:
            inside = CubicSpline(self.x, self.values, bc_type="not-a-knot")(np.clip(xq, self.x0, self.x_end))
        slack = 1e-9 * self.h
        outside = (xq < self.x0 - slack) | (xq > self.x_end + slack)
        if not np.any(outside):
            return inside
        return np.where(outside, self.tail_model(xq), inside)

    def with_values(self, values: Any, **updates: Any) -> "GridFunction":
        """保留元数据，替换节点值"""
        data = self.model_dump(exclude={"values"})
        data.update(updates)
        return GridFunction(values=values, **data)

    def metadata(self) -> Dict[str, Any]:
        """JSON 边车元数据"""
        return self.model_dump(mode="json", exclude={"values"})


# ===== 算子报告 =====

class OperatorReport(BaseModel):
    """(-Δ)^s 的求值结果"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: GridFunction = Field(..., description="计算得到的 (-Δ)^s v")
    method: OperatorMethod = Field(..., description="求值方法")
    tail_estimate: float = Field(..., ge=0.0, description="截断误差估计")
    valid: np.ndarray = Field(..., description="可信节点掩码")

    @field_validator("tail_estimate")
    @classmethod
    def _finite_tail(cls, v: float) -> float:
        if not np.isfinite(v):
            raise ValueError("tail_estimate 必须有限")
        return v

    @field_validator("valid", mode="before")
    @classmethod
    def _validate_mask(cls, v: Any) -> np.ndarray:
        return frozen_array(v, dtype=bool)

    def valid_values(self) -> np.ndarray:
        return np.where(self.valid, self.values.values, np.nan)


# ===== 检查报告 =====

class CheckReport(BaseModel):
    """通用的性质检查报告"""
    model_config = ConfigDict(frozen=True)

    name: str = Field(..., description="检查名称")
    status: CheckStatus = Field(..., description="检查状态")
    value: Optional[float] = Field(default=None, description="检查的关键数值")
    tolerance: Optional[float] = Field(default=None, description="判定容差")
    failing_clauses: List[str] = Field(default_factory=list, description="未通过的条款")
    details: Dict[str, Any] = Field(default_factory=dict, description="附加诊断信息")

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.PASS

    @classmethod
    def from_bool(cls, name: str, ok: bool, **kwargs: Any) -> "CheckReport":
        return cls(name=name, status=CheckStatus.PASS if ok else CheckStatus.FAIL, **kwargs)


__all__ = [
    "OperatorMethod",
    "AsymptoteDecay",
    "CheckStatus",
    "SolverStrategy",
    "MeshGeometry",
    "SideCondition",
    "TopCondition",
    "frozen_array",
    "FracOrder",
    "KernelConstants",
    "GridFunction",
    "OperatorReport",
    "CheckReport",
]
