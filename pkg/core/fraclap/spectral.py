"""
FracHam Fourier Multiplier

离散 Fourier 变换上乘以 |ξ|^{2s} 计算 (-Δ)^s，与 PV 路径相互独立
"""

import numpy as np
import structlog
from scipy.special import zeta

from models.base import FracOrder, GridFunction, OperatorMethod, OperatorReport
from models.errors import DomainError
from core.kernels import pv_constant

logger = structlog.get_logger(__name__)

DEFAULT_PAD_FACTOR = 8


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def next_power_of_two(n: int) -> int:
    return 1 << max(0, int(n - 1).bit_length())


def apply_multiplier(values: np.ndarray, h: float, s: float) -> np.ndarray:
    """周期序列上的 |ξ|^{2s} 乘子，ξ = 2π·rfftfreq(M, h)"""
    M = values.size
    xi = 2.0 * np.pi * np.fft.rfftfreq(M, d=h)
    return np.fft.irfft(np.fft.rfft(values) * np.abs(xi) ** (2.0 * s), n=M)


def _blended_padding(v: GridFunction, pad: int) -> np.ndarray:
    """
    窗口右侧到周期折回左端之间的填充

    前四分之一取右侧渐近模型，后四分之一取左侧模型，中间用余弦过渡。
    """
    m = np.arange(1, pad + 1)
    right_x = v.x_end + v.h * m
    left_x = v.x0 - v.h * (pad + 1 - m)
    if v.has_asymptotes:
        right = v.tail_model(right_x)
        left = v.tail_model(left_x)
    else:
        right = np.full(pad, v.values[-1])
        left = np.full(pad, v.values[0])
    tau = m / (pad + 1.0)
    ramp = np.clip((tau - 0.25) / 0.5, 0.0, 1.0)
    beta = 0.5 * (1.0 - np.cos(np.pi * ramp))
    return (1.0 - beta) * right + beta * left


def fraclap_fourier(
    v: GridFunction,
    order: FracOrder,
    *,
    pad_factor: int = DEFAULT_PAD_FACTOR,
    edge_margin: int = 2,
) -> OperatorReport:
    """
    Fourier 乘子法计算 (-Δ)^s v

    周期输入的长度必须是 2 的幂；非周期输入补齐到不小于 pad_factor·N 的 2 的幂，
    填充区按渐近值平滑过渡。

    Args:
        v: 网格函数
        order: 分数阶，必须 n = 1
        pad_factor: 非周期输入的补齐倍数
        edge_margin: 两端标记为无效的节点数

    Returns:
        OperatorReport: 结果与尾部估计
    """
    if order.n != 1:
        raise DomainError("fraclap_fourier 只支持 n = 1")
    s, N, h = order.s, v.size, v.h

    if v.periodic:
        if not is_power_of_two(N):
            raise DomainError(f"周期输入长度必须是 2 的幂: {N}")
        result = apply_multiplier(v.values, h, s)
        out = GridFunction(x0=v.x0, h=h, values=result, periodic=True)
        return OperatorReport(values=out, method=OperatorMethod.FOURIER, tail_estimate=0.0, valid=np.ones(N, bool))

    M = next_power_of_two(max(pad_factor * N, N + 4))
    pad = M - N
    extended = np.concatenate([v.values, _blended_padding(v, pad)])
    result = apply_multiplier(extended, h, s)[:N]

    c_pv = pv_constant(1, s)
    jump = abs((v.right_asymptote - v.left_asymptote) if v.has_asymptotes else (v.values[-1] - v.values[0]))
    blend_distance = 0.25 * pad * h
    period = M * h
    # 过渡区的影响与周期像的影响
    blend_part = c_pv * jump * blend_distance ** (-2.0 * s) / s
    mean_level = float(np.max(np.abs(v.values - np.median(v.values))))
    image_part = c_pv * 2.0 * zeta(1.0 + 2.0 * s) * mean_level * (N * h) * period ** (-1.0 - 2.0 * s)
    tail_estimate = float(blend_part + image_part)

    valid = np.ones(N, dtype=bool)
    if edge_margin > 0:
        valid[:edge_margin] = False
        valid[-edge_margin:] = False
    logger.debug(f"Fourier 乘子完成: N={N}, M={M}, s={s}, 尾部估计={tail_estimate:.3e}")
    out = GridFunction(x0=v.x0, h=h, values=result)
    return OperatorReport(values=out, method=OperatorMethod.FOURIER, tail_estimate=tail_estimate, valid=valid)


__all__ = [
    "DEFAULT_PAD_FACTOR",
    "is_power_of_two",
    "next_power_of_two",
    "apply_multiplier",
    "fraclap_fourier",
]
