"""
FracHam Run Configuration

运行配置模型：YAML 分节 + pydantic 校验，环境变量由 pydantic-settings 读取
"""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .base import FracOrder, MeshGeometry, SideCondition, SolverStrategy, TopCondition
from .errors import ConfigError
from .mesh import HalfStripMesh

HEIGHT_PER_WIDTH = 40.0


class CommandName(str, Enum):
    """CLI 命令"""
    EVAL = "eval"
    LAYER = "layer"
    SWEEP = "sweep"
    RADIAL = "radial"
    PROPERTIES = "properties"


# ===== 分节配置 =====

class MeshConfig(BaseModel):
    """
    网格配置

    Y 缺省时取 HEIGHT_PER_WIDTH 倍的界面宽度（由调用方按非线性项给出），
    没有宽度时退回 HEIGHT_PER_WIDTH。
    """
    model_config = ConfigDict(extra="forbid")

    X: float = Field(default=60.0, gt=0.0, description="半宽")
    Y: Optional[float] = Field(default=None, gt=0.0, description="高度，缺省为 40·界面宽度")
    nx: int = Field(default=512, ge=8, description="x 方向单元数")
    ny: int = Field(default=256, ge=8, description="y 方向单元数")
    grading: Optional[float] = Field(default=None, ge=1.0, description="y 加密指数，缺省按 a 选择")
    far_field_shift: float = Field(default=1.0, ge=0.0, description="远场侧边模型平移 ℓ")
    side_condition: SideCondition = Field(default=SideCondition.FAR_FIELD)
    top_condition: TopCondition = Field(default=TopCondition.NEUMANN, description="neumann 或 far_field（顶边取远场模型）")

    def height(self, width: Optional[float] = None) -> float:
        """实际高度 Y"""
        if self.Y is not None:
            return self.Y
        return HEIGHT_PER_WIDTH * (1.0 if width is None else width)

    def build(
        self,
        order: FracOrder,
        geometry: MeshGeometry = MeshGeometry.STRIP,
        dimension: int = 1,
        width: Optional[float] = None,
    ) -> HalfStripMesh:
        """按阶数构造网格；width 为界面宽度，只在 Y 缺省时使用"""
        Y = self.height(width)
        grading = self.grading
        if grading is None:
            grading = HalfStripMesh.default_grading(order.a, Y, self.ny)
        return HalfStripMesh(
            X=self.X,
            Y=Y,
            nx=self.nx,
            ny=self.ny,
            grading=grading,
            weight_exponent=order.a,
            geometry=geometry,
            dimension=dimension,
            far_field_shift=self.far_field_shift,
            side_condition=self.side_condition,
            top_condition=self.top_condition,
        )


class NonlinearityConfig(BaseModel):
    """非线性项配置"""
    model_config = ConfigDict(extra="forbid")

    name: str = Field(default="cubic", description="cubic | sine_pi | power | shifted_cubic")
    params: Dict[str, float] = Field(default_factory=dict)


class ToleranceConfig(BaseModel):
    """判定容差"""
    model_config = ConfigDict(extra="forbid")

    boundary_residual: float = Field(default=1e-7, gt=0.0)
    interior_residual: float = Field(default=1e-9, gt=0.0)
    layer_end: float = Field(default=0.1, gt=0.0)
    tail: float = Field(default=1e-3, gt=0.0)
    identity_relative: float = Field(default=2e-2, gt=0.0)
    modica_relative: float = Field(default=1e-3, ge=0.0)
    modica_strict_band: float = Field(default=0.9, gt=0.0, le=1.0)
    modica_strict_height: float = Field(default=0.25, gt=0.0, le=1.0, description="严格正性检查的 y/Y 上限")
    trusted_window: float = Field(default=0.9, gt=0.0, le=1.0, description="恒等式与 Modica 检查使用的 |x|/X 上限")
    far_field_relative: float = Field(default=0.05, gt=0.0)
    symmetry: float = Field(default=1e-6, gt=0.0)
    ode_window: float = Field(default=5.0, gt=0.0)
    continuation_slack: float = Field(default=0.1, ge=0.0)
    radial_monotone: float = Field(default=1e-6, ge=0.0)
    radial_derivative_relative: float = Field(default=0.1, gt=0.0)
    s_limit_relative: float = Field(default=0.2, gt=0.0)
    max_principle: float = Field(default=1e-12, ge=0.0)
    method_agreement: float = Field(default=1e-3, gt=0.0)


class SolverConfig(BaseModel):
    """求解器配置"""
    model_config = ConfigDict(extra="forbid")

    strategy: SolverStrategy = Field(default=SolverStrategy.NEWTON)
    max_iterations: int = Field(default=60, ge=1, description="Newton 最大迭代次数")
    gradient_max_iterations: int = Field(default=5000, ge=1, description="梯度流最大迭代次数")
    direct_limit: int = Field(default=1_000_000, ge=1, description="稀疏直接分解的未知数上限")
    cg_rtol: float = Field(default=1e-12, gt=0.0)
    schur_chunk: int = Field(default=64, ge=1, description="Schur 补逐块求解的列数")
    normalize_trace: bool = Field(default=False, description="f 预先除以 d_s/(2(1-s))")
    radial_amplitudes: List[float] = Field(default_factory=lambda: [1.0, 2.0, 3.0, 5.0])
    edge_margin: int = Field(default=2, ge=0, description="PV 求值时边缘无效节点数")


class EvalConfig(BaseModel):
    """eval 命令的输入"""
    model_config = ConfigDict(extra="forbid")

    test_function: str = Field(default="bump", description="bump | cos | arctan | constant")
    profile: Optional[Path] = Field(default=None, description="输入剖面 CSV（带 JSON 边车）")
    points: int = Field(default=2048, ge=5)
    half_width: float = Field(default=20.0, gt=0.0)
    wavenumber: int = Field(default=1, ge=1)


class PropertySuiteConfig(BaseModel):
    """性质检查套件配置"""
    model_config = ConfigDict(extra="forbid")

    max_principle_trials: int = Field(default=100, ge=1)
    comparison_trials: int = Field(default=20, ge=1)
    harnack_trials: int = Field(default=8, ge=1)
    harnack_exponents: List[float] = Field(default_factory=lambda: [-0.5, 0.0, 0.5])
    harnack_resolution: int = Field(default=16, ge=8)
    harnack_d_bound: float = Field(default=1.0, ge=0.0)
    harnack_stability: float = Field(default=0.25, gt=0.0, description="两种分辨率下 Harnack 比值的允许相对变化")
    duality_resolutions: List[int] = Field(default_factory=lambda: [16, 32])
    mesh_size: int = Field(default=24, ge=8, description="最大值原理等检查的网格单元数")
    force_violation: bool = Field(default=False)


# ===== 顶层配置 =====

class RunConfig(BaseModel):
    """
    Run Configuration

    一次 CLI 运行的完整配置，写回为 resolved_config.yaml
    """
    model_config = ConfigDict(extra="forbid")

    command: CommandName = Field(default=CommandName.LAYER)
    s: float = Field(default=0.5, description="分数阶 s")
    s_list: List[float] = Field(default_factory=lambda: [0.7, 0.8, 0.9, 0.95])
    dimension: int = Field(default=2, ge=2, description="径向问题的空间维数")
    output_dir: Optional[Path] = Field(default=None)
    seed: int = Field(default=0, ge=0)
    threads: int = Field(default=1, ge=1)
    mesh: MeshConfig = Field(default_factory=MeshConfig)
    nonlinearity: NonlinearityConfig = Field(default_factory=NonlinearityConfig)
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    properties: PropertySuiteConfig = Field(default_factory=PropertySuiteConfig)
    eval: EvalConfig = Field(default_factory=EvalConfig)

    @field_validator("s")
    @classmethod
    def _validate_s(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError(f"s 必须在 (0,1) 内: {v}")
        return v

    @field_validator("s_list")
    @classmethod
    def _validate_s_list(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("s_list 不能为空")
        if any(not 0.0 < s < 1.0 for s in v):
            raise ValueError(f"s_list 的元素必须在 (0,1) 内: {v}")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError(f"s_list 必须严格递增: {v}")
        return v

    @model_validator(mode="after")
    def _validate_output_dir(self) -> "RunConfig":
        if self.output_dir is not None and self.output_dir.exists() and not self.output_dir.is_dir():
            raise ValueError(f"output_dir 不是目录: {self.output_dir}")
        return self

    @property
    def order(self) -> FracOrder:
        return FracOrder(s=self.s)

    # ===== 加载与写回 =====

    @classmethod
    def from_mapping(cls, data: Dict[str, Any], overrides: Optional[List[str]] = None) -> "RunConfig":
        """由字典和 `section.key=value` 覆盖项构造配置"""
        merged = dict(data or {})
        for item in overrides or []:
            apply_override(merged, item)
        try:
            return cls.model_validate(merged)
        except ValidationError as e:
            raise ConfigError(f"配置校验失败: {e}") from e

    @classmethod
    def from_yaml(cls, path: Optional[Path], overrides: Optional[List[str]] = None) -> "RunConfig":
        """读取 YAML 配置文件"""
        data: Dict[str, Any] = {}
        if path is not None:
            try:
                with open(path, "r", encoding="utf-8") as fh:
                    data = yaml.safe_load(fh) or {}
            except (OSError, yaml.YAMLError) as e:
                raise ConfigError(f"无法读取配置文件 {path}: {e}") from e
            if not isinstance(data, dict):
                raise ConfigError(f"配置文件顶层必须是映射: {path}")
        return cls.from_mapping(data, overrides)

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.model_dump(mode="json"), sort_keys=True, allow_unicode=True)


def apply_override(data: Dict[str, Any], item: str) -> None:
    """
    应用一个 `section.key=value` 覆盖项

    值按 YAML 标量解析，例如 `mesh.nx=128`、`solver.strategy=gradient_flow`。
    """
    if "=" not in item:
        raise ConfigError(f"覆盖项必须形如 key=value: {item}")
    key, raw = item.split("=", 1)
    parts = [p for p in key.strip().split(".") if p]
    if not parts:
        raise ConfigError(f"覆盖项缺少键: {item}")
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError as e:
        raise ConfigError(f"覆盖项的值无法解析: {item}") from e
    node = data
    for part in parts[:-1]:
        child = node.get(part)
        if child is None:
            child = {}
            node[part] = child
        if not isinstance(child, dict):
            raise ConfigError(f"覆盖项路径冲突: {item}")
        node = child
    node[parts[-1]] = value


class RuntimeSettings(BaseSettings):
    """环境变量设置"""
    model_config = SettingsConfigDict(env_prefix="FRACHAM_", extra="ignore")

    output_dir: Path = Field(default=Path("fracham_output"))
    log_level: str = Field(default="INFO")


__all__ = [
    "CommandName",
    "MeshConfig",
    "NonlinearityConfig",
    "ToleranceConfig",
    "SolverConfig",
    "EvalConfig",
    "PropertySuiteConfig",
    "RunConfig",
    "RuntimeSettings",
    "apply_override",
]
