"""
FracHam Poisson Extension

u(·, y) = P_s(·, y) * v：窗口内帽函数卷积用 Φ1 的二阶差商闭式计算，
窗口外的幂律尾部用 Gauss-Jacobi 求积，周期数据逐模态乘以 φ(|k|y)
"""

import numpy as np
import structlog
from scipy.signal import fftconvolve
from scipy.special import gamma, kve, roots_jacobi

from models.base import FracOrder, GridFunction, MeshGeometry
from models.errors import DomainError, TailError
from models.mesh import HalfStripField, HalfStripMesh
from core.kernels import poisson_antiderivative, poisson_normalizer
from .assembly import build_field, fit_flux

logger = structlog.get_logger(__name__)

DEFAULT_OVERSAMPLE = 4
DEFAULT_PAD_FACTOR = 2.0
JACOBI_NODES = 48


def check_compatible(order: FracOrder, mesh: HalfStripMesh) -> None:
    """网格权重指数必须等于 1-2s"""
    if abs(mesh.weight_exponent - order.a) > 1e-14:
        raise DomainError(f"网格权重指数 {mesh.weight_exponent} 与 a={order.a} 不一致")


def extension_multiplier(s: float, t: np.ndarray) -> np.ndarray:
    """
    φ(t) = 2^{1-s}/Γ(s) · t^s K_s(t)，φ(0) = 1

    模态 e^{ikx} 的延拓为 e^{ikx} φ(|k| y)
    """
    t = np.asarray(t, dtype=np.float64)
    out = np.ones_like(t)
    pos = t > 0.0
    tp = t[pos]
    out[pos] = 2.0 ** (1.0 - s) / gamma(s) * tp ** s * kve(s, tp) * np.exp(-tp)
    return out


# ===== 周期数据 =====

def _periodic_rows(v: GridFunction, order: FracOrder, mesh: HalfStripMesh) -> np.ndarray:
    N = v.size
    coeffs = np.fft.fft(v.values) / N
    k = 2.0 * np.pi * np.fft.fftfreq(N, d=v.h)
    x = mesh.x_nodes
    y = mesh.y_nodes
    phase = np.exp(1j * np.outer(x - v.x0, k))
    damp = extension_multiplier(order.s, np.outer(y, np.abs(k)))
    return np.real((damp * coeffs[None, :]) @ phase.T)


# ===== 非周期数据 =====

def _decay_tail(order: FracOrder, x: np.ndarray, y: float, center: float, edge: float,
                coefficient: float, p: float, side: int, nodes: int) -> np.ndarray:
    """
    ∫ P_s(x - t, y) c |t - x_c|^{-p} dt，积分区间为 edge 之外（side=+1 向右，-1 向左）

    代换 t = x_c + side·D/u 后被积函数为 u^β g(u)，β = 2s + p - 1，g 光滑。
    """
    if coefficient == 0.0:
        return np.zeros_like(x)
    s = order.s
    D = abs(edge - center)
    beta = 2.0 * s + p - 1.0
    xi, w = roots_jacobi(nodes, 0.0, beta)
    u = 0.5 * (1.0 + xi)
    rel = side * (x - center)
    base = poisson_normalizer(1, s) * y ** (2.0 * s) * coefficient * D ** (1.0 - p)
    g = ((u[None, :] * rel[:, None] - D) ** 2 + (u[None, :] * y) ** 2) ** (-(1.0 + 2.0 * s) / 2.0)
    return base * 2.0 ** (-beta - 1.0) * (g @ w)


def _aperiodic_rows(v: GridFunction, order: FracOrder, mesh: HalfStripMesh,
                    oversample: int, pad_factor: float, nodes: int) -> np.ndarray:
    x = mesh.x_nodes
    y = mesh.y_nodes
    delta = mesh.hx / oversample
    pad_cells = int(np.ceil(pad_factor * mesh.nx))
    offset = pad_cells * oversample
    count = (mesh.nx + 2 * pad_cells) * oversample + 1
    t = (x[0] - pad_cells * mesh.hx) + delta * np.arange(count)
    a0, a1 = t[0], t[-1]

    lower, upper = v.left_asymptote, v.right_asymptote
    jump = upper - lower
    ramp = (t - a0) / (a1 - a0)
    remainder = v.at(t) - (lower + jump * ramp)
    c_minus, c_plus = v.decay_coefficients()
    p = v.decay_exponent or 0.0

    L = count - 1
    lags = delta * np.arange(-L - 1, L + 2)
    targets = offset + oversample * np.arange(mesh.nx + 1) + L

    rows = np.empty(mesh.shape)
    for j in range(1, mesh.ny + 1):
        yj = y[j]
        F = poisson_antiderivative(order, lags, yj)
        kernel = (F[2:] - 2.0 * F[1:-1] + F[:-2]) / delta
        conv = fftconvolve(remainder, kernel, mode="full")
        background = lower + jump * (
            poisson_antiderivative(order, x - a0, yj) - poisson_antiderivative(order, x - a1, yj)
        ) / (a1 - a0)
        tails = (
            _decay_tail(order, x, yj, v.center, a1, c_plus, p, +1, nodes)
            + _decay_tail(order, x, yj, v.center, a0, c_minus, p, -1, nodes)
        )
        rows[j] = background + conv[targets] + tails
    return rows


def extend_by_convolution(
    v: GridFunction,
    order: FracOrder,
    mesh: HalfStripMesh,
    *,
    oversample: int = DEFAULT_OVERSAMPLE,
    pad_factor: float = DEFAULT_PAD_FACTOR,
    jacobi_nodes: int = JACOBI_NODES,
) -> HalfStripField:
    """
    Poisson 核卷积延拓

    v 在细格点（网格间距/oversample）上按样条重采样，减去线性背景斜坡后用帽函数表示；
    斜坡与帽函数的卷积都是 Φ1 的差商，y=0 行直接取 v。

    Raises:
        TailError: 非周期数据未声明渐近值
        DomainError: n≠1、径向网格或权重指数不一致
    """
    check_compatible(order, mesh)
    if order.n != 1 or mesh.geometry != MeshGeometry.STRIP:
        raise DomainError("卷积延拓只支持一维 strip 网格")
    if v.periodic:
        rows = _periodic_rows(v, order, mesh)
    else:
        if not v.has_asymptotes:
            raise TailError("卷积延拓需要声明渐近值 L±")
        rows = _aperiodic_rows(v, order, mesh, oversample, pad_factor, jacobi_nodes)
    rows[0] = v.at(mesh.x_nodes)
    flux = fit_flux(mesh, rows)
    logger.debug(f"卷积延拓完成: s={order.s}, 网格 {mesh.shape}")
    return build_field(mesh, rows, flux)


__all__ = [
    "check_compatible",
    "extension_multiplier",
    "extend_by_convolution",
]
