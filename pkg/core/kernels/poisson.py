"""
FracHam Poisson Kernel

P_s(x,y) = p_{n,s} y^{2s} / (|x|² + y²)^{(n+2s)/2} 及其一维闭式原函数
"""

from typing import Any

import numpy as np
import structlog
from scipy.integrate import quad
from scipy.special import betainc

from models.base import FracOrder
from models.errors import DomainError
from .constants import poisson_normalizer

logger = structlog.get_logger(__name__)


def _radius(order: FracOrder, x: Any) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if order.n == 1:
        return np.abs(x)
    if x.ndim == 0 or x.shape[-1] != order.n:
        raise DomainError(f"n={order.n} 时 x 的最后一维必须为 {order.n}")
    return np.linalg.norm(x, axis=-1)


def poisson_profile(order: FracOrder, xi: Any) -> np.ndarray:
    """H_s(ξ) = p_{n,s} (1+|ξ|²)^{-(n+2s)/2}，满足 P_s(x,y) = y^{-n} H_s(x/y)"""
    r = _radius(order, xi)
    p = poisson_normalizer(order.n, order.s)
    return p * (1.0 + r * r) ** (-(order.n + 2.0 * order.s) / 2.0)


def poisson_kernel(order: FracOrder, x: Any, y: float) -> np.ndarray:
    """
    Poisson 核 P_s(x, y)

    Args:
        order: 分数阶
        x: R^n 中的点（n=1 时可为任意形状数组）
        y: 高度，必须为正

    Returns:
        np.ndarray: 核值，严格为正
    """
    if not np.all(np.asarray(y) > 0.0):
        raise DomainError(f"Poisson 核要求 y > 0: {y}")
    r = _radius(order, x)
    p = poisson_normalizer(order.n, order.s)
    return p * y ** (2.0 * order.s) * (r * r + y * y) ** (-(order.n + 2.0 * order.s) / 2.0)


def _require_1d(order: FracOrder) -> None:
    if order.n != 1:
        raise DomainError("闭式原函数只对 n=1 可用")


def poisson_tail(order: FracOrder, x: Any, y: Any) -> np.ndarray:
    """
    右尾质量 T(x, y) = ∫_{|x|}^∞ P_s(t, y) dt

    T = ½ I_{y²/(x²+y²)}(s, ½)，I 为正则化不完全 Beta 函数
    """
    _require_1d(order)
    x = np.abs(np.asarray(x, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    r2 = x * x + y * y
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(r2 > 0.0, y * y / np.where(r2 > 0.0, r2, 1.0), 1.0)
    return 0.5 * betainc(order.s, 0.5, ratio)


def poisson_cdf(order: FracOrder, x: Any, y: Any) -> np.ndarray:
    """
    Φ_s(x, y) = ∫_{-∞}^x P_s(t, y) dt

    y = 0 时退化为阶跃函数（x=0 处取 ½）
    """
    _require_1d(order)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if np.any(y < 0.0):
        raise DomainError("Poisson 分布函数要求 y ≥ 0")
    tail = poisson_tail(order, x, y)
    cdf = np.where(x >= 0.0, 1.0 - tail, tail)
    step = np.where(x > 0.0, 1.0, np.where(x < 0.0, 0.0, 0.5))
    return np.where(y > 0.0, cdf, step)


def poisson_first_moment(order: FracOrder, x: Any, y: Any) -> np.ndarray:
    """
    一阶矩原函数 Ψ(x, y)，满足 ∂_x Ψ = x P_s(x, y)

    Ψ = p y^{2s} ((x²+y²)^{(1-2s)/2} - 1)/(1-2s)，s = ½ 时取对数极限 ½ p y log(x²+y²)
    """
    _require_1d(order)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    p = poisson_normalizer(1, order.s)
    e = 0.5 * (1.0 - 2.0 * order.s)
    log_r2 = np.log(x * x + y * y)
    if abs(e) < 1e-14:
        body = 0.5 * log_r2
    else:
        body = np.expm1(e * log_r2) / (2.0 * e)
    return p * y ** (2.0 * order.s) * body


def poisson_antiderivative(order: FracOrder, x: Any, y: Any) -> np.ndarray:
    """
    二次原函数 Φ1(x, y) = ∫_{-∞}^x Φ_s(t, y) dt（相差一个常数）

    Φ1 = x Φ_s - Ψ；帽函数与核的卷积等于 Φ1 的二阶差商
    """
    return np.asarray(x) * poisson_cdf(order, x, y) - poisson_first_moment(order, x, y)


def kernel_mass(order: FracOrder, y: float, cutoff: float = 100.0) -> float:
    """
    ∫ P_s(x, y) dx 的数值值

    |x| ≤ cutoff·y 用自适应求积，之外加上解析幂律尾部
    """
    if y <= 0.0:
        raise DomainError(f"kernel_mass 要求 y > 0: {y}")
    L = cutoff * y
    if order.n == 1:
        integrand = lambda t: float(poisson_kernel(order, t, y))
        breaks = [0.0, y, 10.0 * y, L]
        middle = sum(
            quad(integrand, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=400)[0]
            for lo, hi in zip(breaks[:-1], breaks[1:])
        )
        tail = float(poisson_tail(order, L, y))
        return 2.0 * middle + 2.0 * tail
    if order.n == 2:
        p = poisson_normalizer(2, order.s)
        integrand = lambda r: 2.0 * np.pi * r * p * y ** (2.0 * order.s) * (r * r + y * y) ** (-(1.0 + order.s))
        breaks = [0.0, y, 10.0 * y, L]
        middle = sum(
            quad(integrand, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=400)[0]
            for lo, hi in zip(breaks[:-1], breaks[1:])
        )
        tail = 2.0 * np.pi * p * y ** (2.0 * order.s) * (L * L + y * y) ** (-order.s) / (2.0 * order.s)
        return middle + tail
    raise DomainError("kernel_mass 只支持 n ∈ {1, 2}")


def profile_mass(n: int, s: float) -> float:
    """
    ∫_{R^n} (1+|ξ|²)^{-(n+2s)/2} dξ 的数值值（n ∈ {1,2}）

    与 poisson_normalizer 互为倒数
    """
    exponent = -(n + 2.0 * s) / 2.0
    if n == 1:
        inner = quad(lambda t: (1.0 + t * t) ** exponent, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)[0]
        # t = 1/u 变换后 [1,∞) 上的被积函数为 u^{2s-1}(1+u²)^{exponent}
        outer = quad(lambda u: u ** (2.0 * s - 1.0) * (1.0 + u * u) ** exponent, 0.0, 1.0,
                     epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        return 2.0 * (inner + outer)
    if n == 2:
        inner = quad(lambda r: 2.0 * np.pi * r * (1.0 + r * r) ** exponent, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)[0]
        outer = quad(lambda u: 2.0 * np.pi * u ** (2.0 * s - 1.0) * (1.0 + u * u) ** exponent, 0.0, 1.0,
                     epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        return inner + outer
    raise DomainError("profile_mass 只支持 n ∈ {1, 2}")


__all__ = [
    "poisson_profile",
    "poisson_kernel",
    "poisson_tail",
    "poisson_cdf",
    "poisson_first_moment",
    "poisson_antiderivative",
    "kernel_mass",
    "profile_mass",
]
