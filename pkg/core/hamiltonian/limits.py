"""
FracHam s→1 Limit

s→1 时 x 部分趋于 ½(v̄')² = G(v̄) - G(1)，y 部分趋于 0
"""

from typing import List, Optional, Sequence

import numpy as np
import structlog

from models.base import CheckStatus
from models.config import ToleranceConfig
from models.hamiltonian import SLimitReport
from models.profiles import LayerSolution, Nonlinearity
from core.profiles import ode_layer_derivative
from .profile import hamiltonian_profile

logger = structlog.get_logger(__name__)

S_LIMIT_FROM = 0.7
MIN_LAYERS = 3


def s_limit_split(
    layers: Sequence[LayerSolution],
    x_probe: Sequence[float],
    nl: Nonlinearity,
    tolerances: Optional[ToleranceConfig] = None,
) -> SLimitReport:
    """
    x 部分与 y 部分的 s→1 分解

    只使用 s ≥ 0.7 的层解，少于 3 个时为 NOT_EXERCISED。
    PASS 当且仅当 y 部分在每个探测点随 s 递减，且最大 s 处 x 部分相对误差与 y 部分/目标值都不超过 s_limit_relative。
    """
    tolerances = tolerances or ToleranceConfig()
    probes = np.asarray(x_probe, dtype=np.float64)
    target = 0.5 * ode_layer_derivative(nl, probes) ** 2
    used = sorted((l for l in layers if l.order.s >= S_LIMIT_FROM), key=lambda l: l.order.s)
    s_values = [float(l.order.s) for l in used]

    if len(used) < MIN_LAYERS:
        logger.warning(f"s ≥ {S_LIMIT_FROM} 的层解只有 {len(used)} 个，跳过 s→1 检查")
        return SLimitReport(
            s_values=s_values, x_probe=probes.tolist(), x_part=[], y_part=[],
            ode_target=target.tolist(), y_part_decreasing=False, x_part_relative_error=float("nan"),
            status=CheckStatus.NOT_EXERCISED, details={"reason": f"需要至少 {MIN_LAYERS} 个 s ≥ {S_LIMIT_FROM} 的层解"},
        )

    x_parts: List[List[float]] = []
    y_parts: List[List[float]] = []
    for layer in used:
        profile = hamiltonian_profile(layer.field, layer.order)
        x_parts.append(np.interp(probes, profile.xs, profile.x_part).tolist())
        y_parts.append(np.interp(probes, profile.xs, profile.y_part).tolist())

    Y = np.asarray(y_parts)
    decreasing = bool(np.all(np.diff(Y, axis=0) < 0.0))
    meaningful = target > 1e-8 * max(float(np.max(target)), 1e-300)
    last_x = np.asarray(x_parts[-1])
    if np.any(meaningful):
        x_error = float(np.max(np.abs(last_x - target)[meaningful] / target[meaningful]))
        y_ratio = float(np.max(Y[-1][meaningful] / target[meaningful]))
    else:
        x_error, y_ratio = 0.0, 0.0
    ok = decreasing and x_error <= tolerances.s_limit_relative and y_ratio <= tolerances.s_limit_relative
    logger.info(f"s→1 分解: x 部分相对误差 {x_error:.3e}, y 部分比值 {y_ratio:.3e}, 递减 {decreasing}")
    return SLimitReport(
        s_values=s_values,
        x_probe=probes.tolist(),
        x_part=x_parts,
        y_part=y_parts,
        ode_target=target.tolist(),
        y_part_decreasing=decreasing,
        x_part_relative_error=x_error,
        status=CheckStatus.PASS if ok else CheckStatus.FAIL,
        details={"y_part_ratio": y_ratio, "largest_s": s_values[-1]},
    )


__all__ = [
    "s_limit_split",
]
