"""
FracHam Kernel Constants

主值积分常数 C_{n,s}、延拓常数 d_s 与 Poisson 核归一化常数 p_{n,s}
"""

from typing import Tuple

import numpy as np
from scipy.special import gamma

from models.errors import DomainError


def check_order_args(n: int, s: float) -> None:
    """校验 n ≥ 1 为整数且 s ∈ (0,1)"""
    if int(n) != n or n < 1:
        raise DomainError(f"维数 n 必须是正整数: {n}")
    if not 0.0 < s < 1.0:
        raise DomainError(f"分数阶 s 必须在 (0,1) 内: {s}")


def pv_constant(n: int, s: float) -> float:
    """
    主值积分归一化常数

    C_{n,s} = π^{-n/2} 2^{2s} Γ((n+2s)/2) s(1-s) / Γ(2-s)
    """
    check_order_args(n, s)
    return float(np.pi ** (-n / 2.0) * 2.0 ** (2.0 * s) * gamma((n + 2.0 * s) / 2.0) * s * (1.0 - s) / gamma(2.0 - s))


def pv_constant_forms(n: int, s: float) -> Tuple[float, float, float]:
    """
    C_{n,s} 的三种代数形式

    Returns:
        Tuple[float, float, float]: 分母分别为 -Γ(-s)、Γ(1-s)/s、Γ(2-s)/(s(1-s))
    """
    check_order_args(n, s)
    head = np.pi ** (-n / 2.0) * 2.0 ** (2.0 * s) * gamma((n + 2.0 * s) / 2.0)
    form_neg = head / (-gamma(-s))
    form_one = head * s / gamma(1.0 - s)
    form_two = head * s * (1.0 - s) / gamma(2.0 - s)
    return float(form_neg), float(form_one), float(form_two)


def extension_constant(s: float) -> float:
    """延拓常数 d_s = 2^{2s-1} Γ(s) / Γ(1-s)"""
    check_order_args(1, s)
    return float(2.0 ** (2.0 * s - 1.0) * gamma(s) / gamma(1.0 - s))


def trace_scaling(s: float) -> float:
    """
    迹方程的比例因子 d_s / (2(1-s))

    边界条件 (1+a)∂_{ν^a}u = f(u) 对应迹方程 (-Δ)^s v = trace_scaling(s)·f(v)。
    """
    return extension_constant(s) / (2.0 * (1.0 - s))


def poisson_normalizer(n: int, s: float) -> float:
    """p_{n,s} = Γ((n+2s)/2) / (π^{n/2} Γ(s))"""
    check_order_args(n, s)
    return float(gamma((n + 2.0 * s) / 2.0) / (np.pi ** (n / 2.0) * gamma(s)))


__all__ = [
    "check_order_args",
    "pv_constant",
    "pv_constant_forms",
    "extension_constant",
    "trace_scaling",
    "poisson_normalizer",
]
