"""
FracHam Layer Solver

层解的求解、质量检查，以及 s 方向的延拓
"""

from typing import List, Optional, Sequence

import numpy as np
import structlog
from pydantic import ValidationError

from models.base import AsymptoteDecay, CheckReport, CheckStatus, FracOrder, GridFunction, MeshGeometry
from models.config import MeshConfig, SolverConfig, ToleranceConfig
from models.errors import DomainError, FracHamError, PartialResultsError, SolutionQualityError
from models.mesh import HalfStripMesh
from models.profiles import ContinuationResult, LayerSolution, Nonlinearity
from core.extension import build_field, far_field_model, fit_flux, solve_neumann_nonlinear
from core.kernels import trace_scaling
from .necessary import check_necessary_conditions
from .ode_layer import solve_ode_layer

logger = structlog.get_logger(__name__)

MONOTONE_SLACK = 1e-10
END_ZERO = 1e-6
OUTER_FRACTION = 0.1
DECAY_RATIO = 0.1
CONTINUATION_FROM = 0.7


def interface_width(nl: Nonlinearity) -> float:
    """2/√max|G''|，与 cubic 的 tanh(x/√2) 一致"""
    return float(2.0 / np.sqrt(max(nl.curvature_bound(), 1e-12)))


def effective_nonlinearity(nl: Nonlinearity, s: float, normalize_trace: bool) -> Nonlinearity:
    """normalize_trace 时 f 除以 d_s/(2(1-s))，使迹精确满足 (-Δ)^s v = f(v)"""
    return nl.scaled(trace_scaling(s)) if normalize_trace else nl


def _initial_field(nl: Nonlinearity, order: FracOrder, mesh: HalfStripMesh, init_trace: Optional[GridFunction]):
    x = mesh.x_nodes
    values = far_field_model(mesh, order)
    if init_trace is not None:
        guess = np.asarray(init_trace.at(x), dtype=np.float64)
    else:
        guess = np.tanh(x / interface_width(nl))
    guess[mesh.nx // 2] = 0.0
    values[0, 1:-1] = guess[1:-1]
    values[0, 0], values[0, -1] = -1.0, 1.0
    return build_field(mesh, values, fit_flux(mesh, values))


def solve_layer(
    nl: Nonlinearity,
    order: FracOrder,
    mesh: HalfStripMesh,
    *,
    solver: Optional[SolverConfig] = None,
    tolerances: Optional[ToleranceConfig] = None,
    init_trace: Optional[GridFunction] = None,
) -> LayerSolution:
    """
    求解层解，trace(0) = 0 钉扎

    Args:
        nl: 双稳态非线性项（必要条件不成立时只发出警告）
        order: 分数阶
        mesh: strip 网格，nx 为偶数使 x=0 为节点
        solver: 求解器配置
        tolerances: 容差配置
        init_trace: 初始迹（s 延拓的热启动），缺省为 tanh(x/宽度)

    Raises:
        ConvergenceError: 非线性求解未收敛
        SolutionQualityError: 收敛解不单调或端点偏离 ±1
    """
    solver = solver or SolverConfig()
    tolerances = tolerances or ToleranceConfig()
    if mesh.geometry != MeshGeometry.STRIP or mesh.nx % 2:
        raise DomainError("层解需要 nx 为偶数的 strip 网格")
    necessary = check_necessary_conditions(nl)
    if not necessary.passed:
        logger.warning(f"{nl.name} 不满足必要条件，预计求解失败: {necessary.failing_clauses}")

    init = _initial_field(nl, order, mesh, init_trace)
    trace_kwargs = dict(
        left_asymptote=-1.0,
        right_asymptote=1.0,
        asymptote_decay=AsymptoteDecay.POWER,
        decay_exponent=2.0 * order.s,
        asymptote_slack=tolerances.layer_end,
    )
    field, stats = solve_neumann_nonlinear(
        nl, order, mesh, init, solver.strategy,
        pin_x=0.0, solver=solver, tolerances=tolerances, trace_kwargs=trace_kwargs,
    )
    try:
        layer = LayerSolution(
            trace=field.trace, field=field, order=order, stats=stats, end_tolerance=tolerances.layer_end
        )
    except ValidationError as e:
        raise SolutionQualityError(f"s={order.s} 的收敛解不是层解: {e.errors()[0]['msg']}") from e
    logger.info(f"层解完成: s={order.s}, {nl.name}, 迭代 {stats.iterations}")
    return layer


def check_layer_quality(layer: LayerSolution, nl: Nonlinearity, tolerances: Optional[ToleranceConfig] = None) -> CheckReport:
    """
    层解质量

    u_x ≥ 0 于所有节点、|f(trace(±X))| ≤ 1e-6、窗口外侧 10% 上 |u_x| 小于全局上确界的 10%、端点在容差内
    """
    tolerances = tolerances or ToleranceConfig()
    mesh = layer.field.mesh
    values = layer.field.values
    ux = np.diff(values, axis=1) / mesh.hx
    trace = layer.trace.values
    clauses: List[str] = []

    min_ux = float(np.min(ux))
    if min_ux < -MONOTONE_SLACK:
        clauses.append(f"u_x ≥ 0: min = {min_ux:.3e}")
    f_ends = np.abs(nl.f(trace[[0, -1]]))
    if np.max(f_ends) > END_ZERO:
        clauses.append(f"|f(trace(±X))| = {np.max(f_ends):.3e}")
    xm = 0.5 * (mesh.x_nodes[:-1] + mesh.x_nodes[1:])
    outer = np.abs(xm) >= (1.0 - OUTER_FRACTION) * mesh.X
    # 与侧边 Dirichlet 列相邻的单元不计入
    outer[[0, -1]] = False
    sup = float(np.max(np.abs(ux)))
    outer_sup = float(np.max(np.abs(ux[:, outer])))
    if outer_sup >= DECAY_RATIO * sup:
        clauses.append(f"外侧导数 {outer_sup:.3e} ≥ {DECAY_RATIO}·{sup:.3e}")
    end_gap = float(max(abs(trace[0] + 1.0), abs(trace[-1] - 1.0)))
    if end_gap > tolerances.layer_end:
        clauses.append(f"端点偏差 {end_gap:.3e}")

    return CheckReport(
        name="layer_quality",
        status=CheckStatus.FAIL if clauses else CheckStatus.PASS,
        value=min_ux,
        tolerance=MONOTONE_SLACK,
        failing_clauses=clauses,
        details={"outer_ratio": outer_sup / sup if sup > 0.0 else 0.0, "end_gap": end_gap},
    )


# ===== s 延拓 =====

def _monotone_verdict(s_values: Sequence[float], errors: Sequence[float], slack: float) -> CheckReport:
    pairs = [(s, e) for s, e in zip(s_values, errors) if s >= CONTINUATION_FROM]
    if len(pairs) < 2:
        return CheckReport(name="continuation_monotone", status=CheckStatus.NOT_EXERCISED, tolerance=slack)
    clauses = [
        f"s={s1}: {e1:.3e} > (1+{slack})·{e0:.3e}"
        for (_, e0), (s1, e1) in zip(pairs[:-1], pairs[1:])
        if e1 > e0 * (1.0 + slack)
    ]
    return CheckReport(
        name="continuation_monotone",
        status=CheckStatus.FAIL if clauses else CheckStatus.PASS,
        value=float(pairs[-1][1]),
        tolerance=slack,
        failing_clauses=clauses,
    )


def continuation_in_s(
    nl: Nonlinearity,
    s_list: Sequence[float],
    mesh_config: Optional[MeshConfig] = None,
    *,
    solver: Optional[SolverConfig] = None,
    tolerances: Optional[ToleranceConfig] = None,
) -> ContinuationResult:
    """
    按 s 递增求解层解，前一个迹作为热启动，并记录与经典层解的距离

    solver.normalize_trace 时每个 s 使用各自的归一化非线性项；与经典层解比较时用原始 nl。

    Raises:
        DomainError: s_list 不递增或不在 (0,1) 内
        PartialResultsError: 某个 s 求解失败，partial 为已完成的 ContinuationResult
    """
    mesh_config = mesh_config or MeshConfig()
    solver = solver or SolverConfig()
    tolerances = tolerances or ToleranceConfig()
    s_values = [float(s) for s in s_list]
    if not s_values or any(not 0.0 < s < 1.0 for s in s_values) or np.any(np.diff(s_values) <= 0.0):
        raise DomainError(f"s_list 必须在 (0,1) 内严格递增: {s_values}")

    window = tolerances.ode_window
    done_s: List[float] = []
    layers: List[LayerSolution] = []
    errors: List[float] = []
    previous: Optional[GridFunction] = None
    for s in s_values:
        order = FracOrder(s=s)
        mesh = mesh_config.build(order, width=interface_width(nl))
        try:
            layer_nl = effective_nonlinearity(nl, s, solver.normalize_trace)
            layer = solve_layer(layer_nl, order, mesh, solver=solver, tolerances=tolerances, init_trace=previous)
        except FracHamError as e:
            logger.error(f"s={s} 的层解失败: {e}")
            partial = ContinuationResult(
                s_values=done_s, layers=layers, ode_errors=errors, error_window=window,
                monotone_verdict=_monotone_verdict(done_s, errors, tolerances.continuation_slack),
            )
            raise PartialResultsError(f"s 延拓在 s={s} 处中止", partial=partial, cause=e) from e
        x = layer.trace.x
        near = np.abs(x) <= window
        ode = solve_ode_layer(nl, x)
        error = float(np.max(np.abs(layer.trace.values - ode.values)[near]))
        logger.info(f"s={s}: sup|v_s - v̄| = {error:.4e} (|x| ≤ {window})")
        done_s.append(s)
        layers.append(layer)
        errors.append(error)
        previous = layer.trace

    return ContinuationResult(
        s_values=done_s,
        layers=layers,
        ode_errors=errors,
        error_window=window,
        monotone_verdict=_monotone_verdict(done_s, errors, tolerances.continuation_slack),
    )


__all__ = [
    "interface_width",
    "effective_nonlinearity",
    "solve_layer",
    "check_layer_quality",
    "continuation_in_s",
]
