"""
FracHam Nonlinearities

非线性项工厂：双稳态 cubic/sine_pi、基态型 power、检查用的反例，以及自定义回调
"""

from typing import Any, Callable, Dict, List, Optional

import numpy as np
import structlog

from models.errors import NonlinearityError
from models.profiles import Nonlinearity, ScalarMap

logger = structlog.get_logger(__name__)

CHECK_GRID = np.linspace(-1.5, 1.5, 300)
FD_STEP = 1e-5
FD_TOLERANCE = 1e-6


def _finite_difference(func: ScalarMap, v: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    return (func(v + step) - func(v - step)) / (2.0 * step)


def validate_consistency(nl: Nonlinearity, grid: np.ndarray = CHECK_GRID, tolerance: float = FD_TOLERANCE) -> None:
    """
    检查 G' = -f 与 f 的导数 = f'

    Raises:
        NonlinearityError: 有限差分与给定函数的相对偏差超过容差
    """
    f = nl.f(grid)
    dG = _finite_difference(nl.G, grid)
    scale = np.maximum(1.0, np.abs(f))
    err_G = float(np.max(np.abs(dG + f) / scale))
    if err_G > tolerance:
        raise NonlinearityError(f"{nl.name}: G' 与 -f 不一致，相对偏差 {err_G:.2e}")
    fp = nl.fprime(grid)
    df = _finite_difference(nl.f, grid)
    err_f = float(np.max(np.abs(df - fp) / np.maximum(1.0, np.abs(fp))))
    if err_f > tolerance:
        raise NonlinearityError(f"{nl.name}: f' 与 f 的导数不一致，相对偏差 {err_f:.2e}")


# ===== 预定义非线性项 =====

def _cubic() -> Nonlinearity:
    return Nonlinearity(
        name="cubic",
        f=lambda v: v - v ** 3,
        fprime=lambda v: 1.0 - 3.0 * v ** 2,
        G=lambda v: 0.25 * (1.0 - v ** 2) ** 2,
        g_ref=0.0,
    )


def _sine_pi() -> Nonlinearity:
    return Nonlinearity(
        name="sine_pi",
        f=lambda v: np.sin(np.pi * v) / np.pi,
        fprime=lambda v: np.cos(np.pi * v),
        G=lambda v: (1.0 + np.cos(np.pi * v)) / np.pi ** 2,
        g_ref=0.0,
    )


def _power(mu: float = 1.0, p: float = 2.0) -> Nonlinearity:
    """f(v) = -μv + |v|^{p-1}v，G(v) = μv²/2 - |v|^{p+1}/(p+1)"""
    if p <= 1.0:
        raise NonlinearityError(f"power 非线性要求 p > 1: {p}")
    G = lambda v: 0.5 * mu * v ** 2 - np.abs(v) ** (p + 1.0) / (p + 1.0)
    return Nonlinearity(
        name="power",
        f=lambda v: -mu * v + np.abs(v) ** (p - 1.0) * v,
        fprime=lambda v: -mu + p * np.abs(v) ** (p - 1.0),
        G=G,
        g_ref=float(G(np.float64(1.0))),
        params={"mu": mu, "p": p},
    )


def _shifted_cubic(c: float = 0.1) -> Nonlinearity:
    """f(v) = v - v³ + c，c ≠ 0 时 f(±1) ≠ 0"""
    return Nonlinearity(
        name="shifted_cubic",
        f=lambda v: v - v ** 3 + c,
        fprime=lambda v: 1.0 - 3.0 * v ** 2,
        G=lambda v: 0.25 * (1.0 - v ** 2) ** 2 - c * v,
        g_ref=-c,
        params={"c": c},
    )


def _linear_potential() -> Nonlinearity:
    """G(v) = v，没有双阱结构"""
    return Nonlinearity(
        name="linear_potential",
        f=lambda v: -np.ones_like(np.asarray(v, dtype=np.float64)),
        fprime=lambda v: np.zeros_like(np.asarray(v, dtype=np.float64)),
        G=lambda v: np.asarray(v, dtype=np.float64),
        g_ref=1.0,
    )


def _zero() -> Nonlinearity:
    """f ≡ 0，G ≡ 0"""
    return Nonlinearity(
        name="zero",
        f=lambda v: np.zeros_like(np.asarray(v, dtype=np.float64)),
        fprime=lambda v: np.zeros_like(np.asarray(v, dtype=np.float64)),
        G=lambda v: np.zeros_like(np.asarray(v, dtype=np.float64)),
        g_ref=0.0,
    )


class NonlinearityFactory:
    """非线性项工厂"""

    _predefined: Dict[str, Callable[..., Nonlinearity]] = {
        "cubic": _cubic,
        "sine_pi": _sine_pi,
        "power": _power,
        "shifted_cubic": _shifted_cubic,
        "linear_potential": _linear_potential,
        "zero": _zero,
    }

    @classmethod
    def create(cls, name: str, **params: Any) -> Nonlinearity:
        """创建预定义非线性项并做一致性检查"""
        creator = cls._predefined.get(name)
        if creator is None:
            raise NonlinearityError(f"未知的非线性项: {name}，可用: {cls.available()}")
        try:
            nl = creator(**params)
        except TypeError as e:
            raise NonlinearityError(f"{name} 的参数无效: {params}") from e
        validate_consistency(nl)
        return nl

    @classmethod
    def available(cls) -> List[str]:
        return sorted(cls._predefined.keys())

    @classmethod
    def register(cls, name: str, creator: Callable[..., Nonlinearity]) -> None:
        """注册新的非线性项"""
        cls._predefined[name] = creator
        logger.info(f"注册非线性项: {name}")

    @classmethod
    def create_custom(
        cls,
        f: ScalarMap,
        fprime: ScalarMap,
        G: ScalarMap,
        g_ref: Optional[float] = None,
        name: str = "custom",
    ) -> Nonlinearity:
        """由用户回调创建，G' = -f 不成立时拒绝"""
        ref = float(G(np.float64(1.0))) if g_ref is None else float(g_ref)
        nl = Nonlinearity(name=name, f=f, fprime=fprime, G=G, g_ref=ref)
        validate_consistency(nl)
        return nl


def make_nonlinearity(name: str, params: Optional[Dict[str, Any]] = None, **callbacks: Any) -> Nonlinearity:
    """按名称构造非线性项；name='custom' 时需要 f、fprime、G 回调"""
    params = dict(params or {})
    if name == "custom":
        return NonlinearityFactory.create_custom(name="custom", **callbacks, **params)
    return NonlinearityFactory.create(name, **params)


def make_bistable(name: str, params: Optional[Dict[str, Any]] = None, **callbacks: Any) -> Nonlinearity:
    """双稳态非线性项：cubic | sine_pi | custom"""
    if name not in ("cubic", "sine_pi", "custom"):
        raise NonlinearityError(f"不是双稳态非线性项: {name}")
    return make_nonlinearity(name, params, **callbacks)


__all__ = [
    "validate_consistency",
    "NonlinearityFactory",
    "make_nonlinearity",
    "make_bistable",
]
