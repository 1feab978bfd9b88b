"""
FracHam Mesh Metrics

分级张量网格上的有限体积度量：对偶单元的 y^a 精确积分、面传导系数和 x 方向测度
"""

from typing import Any

import numpy as np
from cachetools import LRUCache, cached
from cachetools.keys import hashkey
from pydantic import BaseModel, ConfigDict, Field, field_validator

from models.base import MeshGeometry, frozen_array
from models.errors import DomainError
from models.mesh import HalfStripMesh


def weight_moment(lo: Any, hi: Any, p: float) -> np.ndarray:
    """∫_lo^hi t^p dt，要求 p > -1"""
    if p <= -1.0:
        raise DomainError(f"t^{p} 在 0 附近不可积")
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    return (hi ** (p + 1.0) - lo ** (p + 1.0)) / (p + 1.0)


class MeshMetrics(BaseModel):
    """
    Mesh Metrics

    y_dual: y 方向对偶单元边界（中点，首尾为 0 与 Y）
    cell_weight[j] = ∫ t^a dt 在第 j 个对偶 y 单元上
    face_conductance[j] = 1/∫_{y_j}^{y_{j+1}} t^{-a} dt，对 y^{1-a} 型剖面精确
    x_measure[i]: x 方向对偶测度（径向时带 r^{n-1}）
    x_face_weight[i]: x 方向第 i+½ 个面的权重（径向时为 r^{n-1}）
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    a: float = Field(..., description="权重指数")
    y_dual: np.ndarray
    cell_weight: np.ndarray
    face_conductance: np.ndarray
    x_dual: np.ndarray
    x_measure: np.ndarray
    x_face_weight: np.ndarray

    @field_validator("y_dual", "cell_weight", "face_conductance", "x_dual", "x_measure", "x_face_weight",
                     mode="before")
    @classmethod
    def _as_array(cls, v: Any) -> np.ndarray:
        return frozen_array(v)


def _metrics_key(mesh: HalfStripMesh, a: float):
    return hashkey(mesh.model_dump_json(), float(a))


@cached(LRUCache(maxsize=32), key=_metrics_key)
def mesh_metrics(mesh: HalfStripMesh, a: float) -> MeshMetrics:
    """计算并缓存网格度量；a 可以不同于网格的 weight_exponent（对偶问题用 -a）"""
    if not -1.0 < a < 1.0:
        raise DomainError(f"权重指数必须在 (-1,1) 内: {a}")
    y = mesh.y_nodes
    y_dual = np.concatenate([[0.0], 0.5 * (y[:-1] + y[1:]), [mesh.Y]])
    cell_weight = weight_moment(y_dual[:-1], y_dual[1:], a)
    face_conductance = 1.0 / weight_moment(y[:-1], y[1:], -a)

    x = mesh.x_nodes
    x_dual = np.concatenate([[x[0]], 0.5 * (x[:-1] + x[1:]), [x[-1]]])
    if mesh.geometry == MeshGeometry.RADIAL:
        n = mesh.dimension
        x_measure = (x_dual[1:] ** n - x_dual[:-1] ** n) / n
        x_face_weight = x_dual[1:-1] ** (n - 1)
    else:
        x_measure = np.diff(x_dual)
        x_face_weight = np.ones(mesh.nx)
    return MeshMetrics(
        a=a,
        y_dual=y_dual,
        cell_weight=cell_weight,
        face_conductance=face_conductance,
        x_dual=x_dual,
        x_measure=x_measure,
        x_face_weight=x_face_weight,
    )


__all__ = [
    "weight_moment",
    "MeshMetrics",
    "mesh_metrics",
]
