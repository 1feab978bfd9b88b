"""
FracHam Nonlocal Residual

非局部方程 (-Δ)^s v = κ f(v) 的节点残差
"""

from typing import Any

import numpy as np

from models.base import FracOrder, GridFunction, OperatorMethod, OperatorReport
from models.profiles import Nonlinearity
from .pv_quadrature import fraclap_pv
from .spectral import fraclap_fourier


def evaluate_fraclap(v: GridFunction, order: FracOrder, method: OperatorMethod, **kwargs: Any) -> OperatorReport:
    """按方法分派"""
    method = OperatorMethod(method)
    if method == OperatorMethod.PV:
        return fraclap_pv(v, order, **kwargs)
    return fraclap_fourier(v, order, **kwargs)


def nonlocal_residual(
    v: GridFunction,
    nl: Nonlinearity,
    order: FracOrder,
    method: OperatorMethod = OperatorMethod.PV,
    *,
    scaling: float = 1.0,
    **kwargs: Any,
) -> GridFunction:
    """
    (-Δ)^s v - scaling·f(v)，无效节点为 NaN

    Args:
        scaling: 迹方程右端的比例因子 κ；求解器产生的迹取 trace_scaling(s)
    """
    report = evaluate_fraclap(v, order, method, **kwargs)
    residual = report.values.values - scaling * nl.f(v.values)
    residual = np.where(report.valid, residual, np.nan)
    return GridFunction(x0=v.x0, h=v.h, values=residual, periodic=v.periodic)


__all__ = [
    "evaluate_fraclap",
    "nonlocal_residual",
]
