"""
FracHam ODE Layer

经典层解 -v'' = f(v)：½(v')² = G(v) - G(1)。
参数化 v = tanh η 后 dx/dη = (1 - v²)/√(2(G(v) - G(1)))，在 η 上求积再反解 η(x)。
"""

from typing import Any

import numpy as np
import structlog
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline

from models.base import GridFunction
from models.errors import DomainError
from models.profiles import ODELayerTable, Nonlinearity
from .necessary import check_necessary_conditions

logger = structlog.get_logger(__name__)

ETA_MAX = 20.0
ETA_STEP = 1e-3
END_SWITCH = 1e-7
DEGENERATE_WELL = 1e-12
REGULARIZATION = 1e-8
UNIFORM_RTOL = 1e-9


def ode_layer_slope(nl: Nonlinearity, v: Any) -> np.ndarray:
    """√(2(G(v) - G(1)))"""
    return np.sqrt(2.0 * np.maximum(nl.gap(v), 0.0))


def ode_layer_table(nl: Nonlinearity) -> ODELayerTable:
    """
    构造 x(η) 表

    |v| 舍入到 1 附近时被积函数取极限 2/√G''(±1)；G''(±1) = 0（退化阱）时
    改为在 v = ±(1 - ε) 处截断，ε = 1e-8，并记录 regularized。

    Raises:
        DomainError: 不满足 nec1/nec2
    """
    report = check_necessary_conditions(nl)
    if not report.passed:
        raise DomainError(f"{nl.name} 不满足层解的必要条件: {report.failing_clauses}")

    ends = np.array([-1.0, 1.0])
    curvature = -nl.fprime(ends)
    regularized = bool(np.any(np.abs(curvature) <= DEGENERATE_WELL))
    eta = np.arange(-round(ETA_MAX / ETA_STEP), round(ETA_MAX / ETA_STEP) + 1) * ETA_STEP
    v = np.tanh(eta)

    if regularized:
        logger.warning(f"{nl.name} 在 ±1 处为退化阱，求积截断于 1-{REGULARIZATION:.0e}")
        bound = 1.0 - REGULARIZATION
        vc = np.clip(v, -bound, bound)
        integrand = (1.0 - vc) * (1.0 + vc) / ode_layer_slope(nl, vc)
    else:
        near_end = 1.0 - np.abs(v) < END_SWITCH
        limit = np.where(v < 0.0, 2.0 / np.sqrt(curvature[0]), 2.0 / np.sqrt(curvature[1]))
        integrand = np.empty_like(v)
        inner = ~near_end
        integrand[inner] = (1.0 - v[inner]) * (1.0 + v[inner]) / ode_layer_slope(nl, v[inner])
        integrand[near_end] = limit[near_end]

    x = cumulative_simpson(integrand, x=eta, initial=0.0)
    x = x - x[eta.size // 2]
    return ODELayerTable(eta=eta, x=x, regularized=regularized)


def _inverse(table: ODELayerTable) -> CubicSpline:
    return CubicSpline(table.x, table.eta)


def solve_ode_layer(nl: Nonlinearity, xs: Any) -> GridFunction:
    """
    在均匀网格 xs 上求经典层解，v(0) = 0；表范围之外取 ±1

    Args:
        nl: 满足 nec1/nec2 的非线性项
        xs: 均匀网格点

    Returns:
        GridFunction: 层解
    """
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 1 or xs.size < 2:
        raise DomainError("xs 必须是至少两个点的一维数组")
    steps = np.diff(xs)
    if steps[0] <= 0.0 or not np.allclose(steps, steps[0], rtol=UNIFORM_RTOL, atol=0.0):
        raise DomainError(f"xs 必须是递增的均匀网格: 步长范围 [{steps.min():.6g}, {steps.max():.6g}]")
    table = ode_layer_table(nl)
    eta = _inverse(table)(np.clip(xs, table.x[0], table.x[-1]))
    values = np.tanh(eta)
    values = np.where(xs < table.x[0], -1.0, np.where(xs > table.x[-1], 1.0, values))
    values[xs == 0.0] = 0.0
    return GridFunction(x0=float(xs[0]), h=float(xs[1] - xs[0]), values=values)


def ode_layer_derivative(nl: Nonlinearity, xs: Any) -> np.ndarray:
    """v'(x) = sech²(η)·η'(x)，由反函数样条求导"""
    xs = np.asarray(xs, dtype=np.float64)
    table = ode_layer_table(nl)
    spline = _inverse(table)
    inside = (xs >= table.x[0]) & (xs <= table.x[-1])
    eta = spline(np.clip(xs, table.x[0], table.x[-1]))
    return np.where(inside, spline(np.clip(xs, table.x[0], table.x[-1]), 1) / np.cosh(eta) ** 2, 0.0)


__all__ = [
    "ode_layer_slope",
    "ode_layer_table",
    "solve_ode_layer",
    "ode_layer_derivative",
]
