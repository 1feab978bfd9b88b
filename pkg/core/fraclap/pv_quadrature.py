"""
FracHam Principal-Value Quadrature

(-Δ)^s v(x) = C_{1,s} ∫_0^∞ (2v(x) - v(x+z) - v(x-z)) / z^{1+2s} dz 的对称二阶差分求积
"""

from typing import Tuple

import numpy as np
import structlog
from cachetools import LRUCache, cached
from scipy.special import hyp2f1

from models.base import AsymptoteDecay, FracOrder, GridFunction, OperatorMethod, OperatorReport
from models.errors import DomainError, TailError
from core.kernels import pv_constant

logger = structlog.get_logger(__name__)

MIN_POINTS = 5
DEFAULT_PAD_PERIODS = 64
OUTER_FRACTION = 0.05


@cached(cache=LRUCache(maxsize=32))
def pv_weights(K: int, h: float, s: float) -> np.ndarray:
    """
    二阶差分求积权重 W_k (k = 1..K)，W_0 = 0

    把 q(z) = g(z)/z² 在每个单元上线性插值（q_0 取 q_1），
    与 z^{1-2s} 的精确矩相乘：∫ g z^{-1-2s} ≈ Σ_k W_k g_k。
    所有权重严格为正。
    """
    p = 1.0 - 2.0 * s
    k = np.arange(K, dtype=np.float64)
    lo, hi = h * k, h * (k + 1.0)
    m0 = (hi ** (p + 1.0) - lo ** (p + 1.0)) / (p + 1.0)
    m1 = (hi ** (p + 2.0) - lo ** (p + 2.0)) / (p + 2.0)
    left = (hi * m0 - m1) / h
    right = (m1 - lo * m0) / h
    omega = np.zeros(K + 1)
    omega[1:K] += left[1:K]
    omega[2:K + 1] += right[1:K]
    omega[1] += left[0] + right[0]
    weights = np.zeros(K + 1)
    weights[1:] = omega[1:] / (h * np.arange(1, K + 1)) ** 2
    weights.setflags(write=False)
    return weights


def _asymptote_model(v: GridFunction) -> Tuple[float, float, float, float, float]:
    """返回 (L-, L+, c-, c+, p)；未声明渐近值时取端点值且无衰减"""
    if v.has_asymptotes:
        c_minus, c_plus = v.decay_coefficients()
        p = v.decay_exponent if v.asymptote_decay == AsymptoteDecay.POWER else 0.0
        return v.left_asymptote, v.right_asymptote, c_minus, c_plus, p
    return float(v.values[0]), float(v.values[-1]), 0.0, 0.0, 0.0


def _decay_tail(c: float, p: float, s: float, Z: float, shift: np.ndarray) -> np.ndarray:
    """∫_Z^∞ c (z + shift)^{-p} z^{-1-2s} dz，要求 |shift| < Z"""
    if c == 0.0:
        return np.zeros_like(shift)
    m = p + 2.0 * s
    return c * Z ** (-m) / m * hyp2f1(p, m, m + 1.0, -shift / Z)


def _distance_tail(v: GridFunction, s: float, c_pv: float) -> np.ndarray:
    """
    远场截断误差的逐节点估计

    δ± 为窗口外模型的不确定度：声明了幂律衰减时取端点偏差的 10%，
    只声明常数渐近值时取端点偏差，未声明时取外侧 5% 区域内的变化幅度。
    """
    xs = v.x
    d_left = xs - v.x0 + v.h
    d_right = v.x_end - xs + v.h
    if v.has_asymptotes:
        gap_left = abs(v.values[0] - v.left_asymptote)
        gap_right = abs(v.values[-1] - v.right_asymptote)
        factor = 0.1 if v.asymptote_decay == AsymptoteDecay.POWER else 1.0
        delta_left, delta_right = factor * gap_left, factor * gap_right
    else:
        m = max(2, int(np.ceil(OUTER_FRACTION * v.size)))
        delta_left = float(np.ptp(v.values[:m]))
        delta_right = float(np.ptp(v.values[-m:]))
    return c_pv * (delta_left * d_left ** (-2.0 * s) + delta_right * d_right ** (-2.0 * s)) / (2.0 * s)


def _pv_periodic(v: GridFunction, order: FracOrder, pad_periods: int) -> OperatorReport:
    s, N, h = order.s, v.size, v.h
    K = pad_periods * N
    W = pv_weights(K, h, s)
    folded = np.zeros(N)
    k = np.arange(1, K + 1)
    np.add.at(folded, k % N, W[1:])
    np.add.at(folded, (-k) % N, W[1:])
    # folded 对称，循环相关等于循环卷积
    acc = np.fft.irfft(np.fft.rfft(v.values) * np.fft.rfft(folded), n=N)
    c_pv = pv_constant(1, s)
    Z = K * h
    mean = float(np.mean(v.values))
    tail = 2.0 * (v.values - mean) * Z ** (-2.0 * s) / (2.0 * s)
    result = c_pv * (2.0 * W.sum() * v.values - acc + tail)
    oscillation = float(np.max(np.abs(v.values - mean)))
    tail_estimate = c_pv * 2.0 * oscillation * v.period * Z ** (-1.0 - 2.0 * s)
    out = GridFunction(x0=v.x0, h=h, values=result, periodic=True)
    return OperatorReport(values=out, method=OperatorMethod.PV, tail_estimate=tail_estimate, valid=np.ones(N, bool))


def fraclap_pv(
    v: GridFunction,
    order: FracOrder,
    *,
    edge_margin: int = 2,
    tail_tolerance: float = 1e-3,
    pad_periods: int = DEFAULT_PAD_PERIODS,
) -> OperatorReport:
    """
    主值积分法计算 (-Δ)^s v

    Args:
        v: 网格函数，至少 5 个点
        order: 分数阶，必须 n = 1
        edge_margin: 两端标记为无效的节点数
        tail_tolerance: 未声明渐近值时允许的尾部估计上限
        pad_periods: 周期输入时展开的周期数

    Returns:
        OperatorReport: 节点值、尾部误差估计与有效掩码
    """
    if order.n != 1:
        raise DomainError("fraclap_pv 只支持 n = 1")
    if v.size < MIN_POINTS:
        raise DomainError(f"网格函数至少需要 {MIN_POINTS} 个点")
    if v.periodic:
        return _pv_periodic(v, order, pad_periods)

    s, N, h = order.s, v.size, v.h
    c_pv = pv_constant(1, s)
    K = 2 * N
    W = pv_weights(K, h, s)
    L_minus, L_plus, c_minus, c_plus, p = _asymptote_model(v)

    if v.has_asymptotes:
        left_pad = v.tail_model(v.x0 - h * np.arange(K, 0, -1))
        right_pad = v.tail_model(v.x_end + h * np.arange(1, K + 1))
    else:
        left_pad = np.full(K, L_minus)
        right_pad = np.full(K, L_plus)
    padded = np.concatenate([left_pad, v.values, right_pad])
    stencil = np.concatenate([W[:0:-1], [0.0], W[1:]])
    acc = np.convolve(padded, stencil, mode="valid")

    Z = K * h
    shift = v.x - v.center
    tail = (2.0 * v.values - L_plus - L_minus) * Z ** (-2.0 * s) / (2.0 * s)
    tail -= _decay_tail(c_plus, p, s, Z, shift)
    tail -= _decay_tail(c_minus, p, s, Z, -shift)
    result = c_pv * (2.0 * W.sum() * v.values - acc + tail)

    valid = np.ones(N, dtype=bool)
    if edge_margin > 0:
        valid[:edge_margin] = False
        valid[-edge_margin:] = False
    estimate = _distance_tail(v, s, c_pv)
    tail_estimate = float(np.max(estimate[valid])) if np.any(valid) else float(np.max(estimate))
    if not v.has_asymptotes and tail_estimate > tail_tolerance:
        raise TailError(f"未声明渐近值且尾部估计 {tail_estimate:.3e} 超过容差 {tail_tolerance:.1e}")

    logger.debug(f"PV 求积完成: N={N}, s={s}, 尾部估计={tail_estimate:.3e}")
    out = GridFunction(x0=v.x0, h=h, values=result)
    return OperatorReport(values=out, method=OperatorMethod.PV, tail_estimate=tail_estimate, valid=valid)


__all__ = [
    "pv_weights",
    "fraclap_pv",
]
