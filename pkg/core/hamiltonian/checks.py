"""
FracHam Hamiltonian Checks

层解的哈密顿恒等式、Modica 型估计、远场极限与对称性检查
"""

from typing import Optional, Tuple

import numpy as np
import structlog

from models.base import CheckReport, CheckStatus
from models.config import ToleranceConfig
from models.hamiltonian import HamiltonianProfile, IdentityReport, ModicaReport
from models.profiles import LayerSolution, Nonlinearity
from .profile import hamiltonian_profile

logger = structlog.get_logger(__name__)


def layer_profile(layer: LayerSolution, threads: int = 1) -> HamiltonianProfile:
    """层解的剖面，远场 tail 按渐近值 ±1、中心 0 计算"""
    return hamiltonian_profile(layer.field, layer.order, lower=-1.0, upper=1.0, center=0.0, threads=threads)


def well_depth(nl: Nonlinearity) -> float:
    """G(0) - G(1)，各相对容差的尺度"""
    return float(nl.gap(0.0))


def trusted_columns(layer: LayerSolution, tolerances: ToleranceConfig) -> np.ndarray:
    """|x| ≤ trusted_window·X 的列"""
    mesh = layer.field.mesh
    return np.abs(mesh.x_nodes) <= tolerances.trusted_window * mesh.X + 1e-12


def _profile_and_gap(
    layer: LayerSolution, nl: Nonlinearity, profile: Optional[HamiltonianProfile]
) -> Tuple[HamiltonianProfile, np.ndarray]:
    profile = profile if profile is not None else layer_profile(layer)
    return profile, nl.gap(layer.field.values[0])


def verify_identity(
    layer: LayerSolution,
    nl: Nonlinearity,
    tolerances: Optional[ToleranceConfig] = None,
    *,
    profile: Optional[HamiltonianProfile] = None,
) -> IdentityReport:
    """
    哈密顿恒等式 H(x) = G(trace(x)) - G(1)

    残差在可信窗口内取上确界与样本标准差；另报告 |G(1) - G(-1)|。
    PASS 当且仅当 max_residual ≤ identity_relative·(G(0) - G(1))。
    """
    tolerances = tolerances or ToleranceConfig()
    profile, gap = _profile_and_gap(layer, nl, profile)
    window = trusted_columns(layer, tolerances)
    residual = np.abs(profile.H - gap)[window]
    depth = well_depth(nl)

    max_residual = float(np.max(residual))
    relative = max_residual / depth if depth > 0.0 else float("inf")
    well_mismatch = float(abs(nl.gap(-1.0)))
    status = CheckStatus.PASS if relative <= tolerances.identity_relative else CheckStatus.FAIL
    logger.info(f"哈密顿恒等式: 最大残差 {max_residual:.3e}（相对 {relative:.3e}），{status.value}")
    return IdentityReport(
        max_residual=max_residual,
        well_mismatch=well_mismatch,
        residual_std=float(np.std(profile.H[window] - gap[window], ddof=1)) if residual.size > 1 else 0.0,
        relative_residual=relative,
        status=status,
    )


def modica_margin(profile: HamiltonianProfile, gap: np.ndarray) -> np.ndarray:
    """margin[j, i] = G(trace(x_i)) - G(1) - partial[j, i]"""
    return gap[None, :] - profile.partial


def verify_modica(
    layer: LayerSolution,
    nl: Nonlinearity,
    tolerances: Optional[ToleranceConfig] = None,
    *,
    profile: Optional[HamiltonianProfile] = None,
) -> ModicaReport:
    """
    Modica 型估计

    可信窗口内所有节点 margin ≥ -modica_relative·(G(0) - G(1))，
    且 |trace| ≤ modica_strict_band、0 < y ≤ modica_strict_height·Y 的节点上 margin > 0。
    """
    tolerances = tolerances or ToleranceConfig()
    profile, gap = _profile_and_gap(layer, nl, profile)
    mesh = layer.field.mesh
    margin = modica_margin(profile, gap)
    window = trusted_columns(layer, tolerances)
    tolerance = tolerances.modica_relative * well_depth(nl)

    y = mesh.y_nodes
    rows = (y > 0.0) & (y <= tolerances.modica_strict_height * mesh.Y)
    cols = window & (np.abs(layer.field.values[0]) <= tolerances.modica_strict_band)
    interior = margin[np.ix_(rows, cols)]

    min_margin = float(np.min(margin[:, window]))
    min_interior = float(np.min(interior)) if interior.size else float("inf")
    ok = min_margin >= -tolerance and min_interior > 0.0
    if interior.size == 0:
        logger.warning("Modica 检查没有可用的内部节点")
    logger.info(f"Modica 估计: 最小裕度 {min_margin:.3e}，内部最小裕度 {min_interior:.3e}")
    return ModicaReport(
        min_margin=min_margin,
        min_margin_interior=min_interior,
        tolerance=tolerance,
        status=CheckStatus.PASS if ok else CheckStatus.FAIL,
        margin_min_y=np.min(margin, axis=0).tolist(),
    )


def check_far_field(
    layer: LayerSolution,
    nl: Nonlinearity,
    tolerances: Optional[ToleranceConfig] = None,
    *,
    profile: Optional[HamiltonianProfile] = None,
) -> CheckReport:
    """远离界面处 H 与 G(trace) - G(1) 都趋于 0，在可信窗口边缘检查"""
    tolerances = tolerances or ToleranceConfig()
    profile, gap = _profile_and_gap(layer, nl, profile)
    window = np.flatnonzero(trusted_columns(layer, tolerances))
    edges = window[[0, -1]]
    limit = tolerances.far_field_relative * well_depth(nl)
    h_edge = float(np.max(np.abs(profile.H[edges])))
    gap_edge = float(np.max(np.abs(gap[edges])))
    clauses = []
    if h_edge > limit:
        clauses.append(f"|H| = {h_edge:.3e} > {limit:.3e}")
    if gap_edge > limit:
        clauses.append(f"|G(trace) - G(1)| = {gap_edge:.3e} > {limit:.3e}")
    return CheckReport(
        name="far_field",
        status=CheckStatus.FAIL if clauses else CheckStatus.PASS,
        value=max(h_edge, gap_edge),
        tolerance=limit,
        failing_clauses=clauses,
        details={"x_edges": layer.field.mesh.x_nodes[edges].tolist()},
    )


def check_symmetry(profile: HamiltonianProfile, tolerances: Optional[ToleranceConfig] = None) -> CheckReport:
    """
    H(x) = H(-x)

    奇函数 f 的钉扎层解关于 x=0 反对称，H 为偶函数；xs 需关于 0 对称。
    """
    tolerances = tolerances or ToleranceConfig()
    xs = profile.xs
    if not np.allclose(xs, -xs[::-1], atol=1e-12):
        return CheckReport(name="symmetry", status=CheckStatus.NOT_EXERCISED, tolerance=tolerances.symmetry)
    H = profile.H
    scale = max(float(np.max(np.abs(H))), 1e-300)
    deviation = float(np.max(np.abs(H - H[::-1]))) / scale
    return CheckReport.from_bool(
        "symmetry",
        deviation <= tolerances.symmetry,
        value=deviation,
        tolerance=tolerances.symmetry,
    )


__all__ = [
    "layer_profile",
    "well_depth",
    "trusted_columns",
    "verify_identity",
    "modica_margin",
    "verify_modica",
    "check_far_field",
    "check_symmetry",
]
