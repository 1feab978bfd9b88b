"""
FracHam Extension Energy

半球 B_R^+ 上的 ∫½y^a|∇u|² + ∫_{Γ_R^0} G(u)/(1+a)，径向网格按单位角测度计
"""

import numpy as np

from models.base import MeshGeometry
from models.errors import DomainError
from models.mesh import HalfStripField
from models.profiles import Nonlinearity
from .metrics import mesh_metrics


def energy(u: HalfStripField, nl: Nonlinearity, R: float, center: float = 0.0) -> float:
    """
    离散能量

    体积项对中点落在半球内的网格面求和 ½c(Δu)²（c 与组装的面传导系数相同），
    边界项对 |x_i - center| ≤ R 的底边节点求和 μ_i G(u_i)/(1+a)。
    """
    mesh = u.mesh
    if R > min(mesh.X, mesh.Y) + 1e-12:
        raise DomainError(f"半球半径 R={R} 超出网格 min(X,Y)={min(mesh.X, mesh.Y)}")
    if mesh.geometry == MeshGeometry.RADIAL:
        center = 0.0
    a = mesh.weight_exponent
    m = mesh_metrics(mesh, a)
    x, y = mesh.x_nodes, mesh.y_nodes
    values = u.values

    xm = 0.5 * (x[:-1] + x[1:])
    inside_x = (xm[None, :] - center) ** 2 + y[:, None] ** 2 <= R * R
    cx = m.cell_weight[:, None] * m.x_face_weight[None, :] / mesh.hx
    bulk = 0.5 * np.sum((cx * np.diff(values, axis=1) ** 2)[inside_x])

    ym = 0.5 * (y[:-1] + y[1:])
    inside_y = (x[None, :] - center) ** 2 + ym[:, None] ** 2 <= R * R
    cy = m.face_conductance[:, None] * m.x_measure[None, :]
    bulk += 0.5 * np.sum((cy * np.diff(values, axis=0) ** 2)[inside_y])

    on_disk = np.abs(x - center) <= R
    boundary = np.sum(m.x_measure[on_disk] * nl.G(values[0, on_disk])) / (1.0 + a)
    return float(bulk + boundary)


__all__ = [
    "energy",
]
