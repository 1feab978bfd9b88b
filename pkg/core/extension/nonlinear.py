"""
FracHam Nonlinear Neumann Solver

(1+a)·(-y^a ∂_y u) = f(u) 于 y=0，内部 div(y^a ∇u) = 0。
未知量只有底边迹 v：边界方程为 R(v) = S v + b - M f(v)/(1+a) = 0，
其中 S、b 来自离散 DtN；R 也是离散能量 E(v) = ½vᵀSv + bᵀv + c0 + Σ M G(v)/(1+a) 的梯度。
"""

from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from models.base import FracOrder, SolverStrategy
from models.config import SolverConfig, ToleranceConfig
from models.errors import ConvergenceError
from models.mesh import HalfStripField, HalfStripMesh, LinearSystemStats
from models.profiles import Nonlinearity
from .assembly import assemble_operator, is_symmetric, weighted_residual
from .convolution import check_compatible
from .dtn import DirichletToNeumannMap, dtn_map

logger = structlog.get_logger(__name__)

ARMIJO_C1 = 1e-4
MIN_STEP = 2.0 ** -20
MAX_DAMPING_RETRIES = 6
STOP_FACTOR = 0.1


class _BoundaryProblem:
    """底边迹上的非线性方程、能量与收缩（deflation）因子"""

    def __init__(self, dtn: DirichletToNeumannMap, nl: Nonlinearity, a: float,
                 pin: Optional[int], deflate: Sequence[np.ndarray]):
        self.dtn = dtn
        self.nl = nl
        self.a = a
        self.pin = pin
        self.deflate = [np.asarray(d, dtype=np.float64) for d in deflate]
        self.keep = np.ones(dtn.size, dtype=bool)
        if pin is not None:
            self.keep[pin] = False

    def residual(self, v: np.ndarray) -> np.ndarray:
        return self.dtn.apply(v) - self.dtn.M * self.nl.f(v) / (1.0 + self.a)

    def scaled(self, R: np.ndarray) -> np.ndarray:
        """(1+a)R/M = (1+a)·flux - f(v)"""
        return (1.0 + self.a) * R / self.dtn.M

    def boundary_residual(self, v: np.ndarray) -> float:
        r = self.scaled(self.residual(v))[self.keep]
        return float(np.max(np.abs(r))) if r.size else 0.0

    def jacobian(self, v: np.ndarray) -> np.ndarray:
        return self.dtn.S - np.diag(self.dtn.M * self.nl.fprime(v) / (1.0 + self.a))

    def energy(self, v: np.ndarray) -> float:
        return self.dtn.energy(v) + float(np.sum(self.dtn.M * self.nl.G(v))) / (1.0 + self.a)

    def deflation(self, v: np.ndarray) -> Tuple[float, np.ndarray]:
        """m(v) = Π(1/‖v - v_k‖²_M + 1) 及 ∇log m"""
        m = 1.0
        grad = np.zeros_like(v)
        for known in self.deflate:
            diff = v - known
            d = float(np.sum(self.dtn.M * diff * diff))
            if d <= 0.0:
                return np.inf, grad
            m *= 1.0 / d + 1.0
            grad -= 2.0 * self.dtn.M * diff / (d * (d + 1.0))
        return m, grad


# ===== Newton =====

def _augmented_solve(J: np.ndarray, rhs: np.ndarray, pin: Optional[int]) -> np.ndarray:
    if pin is None:
        return np.linalg.solve(J, rhs)
    n = J.shape[0]
    K = np.zeros((n + 1, n + 1))
    K[:n, :n] = J
    K[n, pin] = 1.0
    K[pin, n] = 1.0
    return np.linalg.solve(K, rhs)


def _augmented_residual(problem: _BoundaryProblem, w: np.ndarray, lam: float, pin_value: float) -> np.ndarray:
    R = problem.residual(w)
    if problem.pin is None:
        return R
    R = R.copy()
    R[problem.pin] += lam
    return np.append(R, w[problem.pin] - pin_value)


def _merit(problem: _BoundaryProblem, w: np.ndarray, lam: float, pin_value: float) -> float:
    """收缩因子乘以缩放后的增广残差范数"""
    m, _ = problem.deflation(w)
    F = _augmented_residual(problem, w, lam, pin_value)
    n = w.size
    F[:n] = problem.scaled(F[:n])
    return m * float(np.linalg.norm(F))


def _newton(problem: _BoundaryProblem, v: np.ndarray, pin_value: float,
            max_iterations: int, tol: float) -> Dict[str, Any]:
    """
    阻尼 Newton；线搜索在 alpha ≥ MIN_STEP 内找不到使 merit 下降的步长时停止，
    不接受上升步，由调用方按未收敛处理
    """
    pin = problem.pin
    lam = 0.0
    n = v.size
    retries = 0
    iterations = 0
    stalled = False

    for iterations in range(1, max_iterations + 1):
        if problem.boundary_residual(v) <= STOP_FACTOR * tol:
            iterations -= 1
            break
        F = _augmented_residual(problem, v, lam, pin_value)
        J = problem.jacobian(v)
        damping = 0.0
        while True:
            try:
                step = _augmented_solve(J + damping * np.diag(problem.dtn.M), -F, pin)
                break
            except LinAlgError:
                retries += 1
                if retries > MAX_DAMPING_RETRIES:
                    raise
                damping = 1e-8 * float(np.max(np.abs(np.diag(J)))) if damping == 0.0 else 10.0 * damping
                logger.warning(f"Jacobian 奇异，使用阻尼 {damping:.3e} 重试")

        if problem.deflate:
            _, g = problem.deflation(v)
            denom = 1.0 - float(g @ step[:n])
            if abs(denom) > 1e-14:
                step = step / denom

        current = _merit(problem, v, lam, pin_value)
        alpha = 1.0
        accepted = False
        while alpha >= MIN_STEP:
            trial_v = v + alpha * step[:n]
            trial_lam = lam + alpha * step[n] if pin is not None else lam
            if _merit(problem, trial_v, trial_lam, pin_value) < current:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            stalled = True
            logger.warning(f"Newton 线搜索在第 {iterations} 步停滞，merit {current:.3e} 无法下降")
            break
        v, lam = trial_v, trial_lam
        logger.debug(f"Newton 第 {iterations} 步: 步长 {alpha:.3e}，边界残差 {problem.boundary_residual(v):.3e}")

    return {
        "v": v,
        "iterations": iterations,
        "lagrange_multiplier": lam if pin is not None else None,
        "damping_retries": retries,
        "energy_history": [],
        "stalled": stalled,
    }


# ===== 梯度流 =====

def _gradient_flow(problem: _BoundaryProblem, v: np.ndarray, max_iterations: int, tol: float) -> Dict[str, Any]:
    keep = problem.keep
    dtn = problem.dtn
    history = [problem.energy(v)]
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        grad = problem.residual(v)
        if problem.boundary_residual(v) <= STOP_FACTOR * tol:
            iterations -= 1
            break
        shift = dtn.M * np.maximum(-problem.nl.fprime(v), 0.0) / (1.0 + problem.a)
        P = dtn.S[np.ix_(keep, keep)] + np.diag(shift[keep])
        direction = np.zeros_like(v)
        direction[keep] = -cho_solve(cho_factor(P), grad[keep])
        slope = float(grad @ direction)
        alpha = 1.0
        accepted = False
        while alpha >= MIN_STEP:
            trial = v + alpha * direction
            e_trial = problem.energy(trial)
            if e_trial <= history[-1] + ARMIJO_C1 * alpha * slope and e_trial < history[-1]:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            logger.warning(f"梯度流线搜索在第 {iterations} 步停滞")
            break
        v = trial
        history.append(e_trial)
        if iterations % 50 == 0:
            logger.debug(f"梯度流第 {iterations} 步: E={e_trial:.12e}，边界残差 {problem.boundary_residual(v):.3e}")

    lam = None
    if problem.pin is not None:
        lam = -float(problem.residual(v)[problem.pin])
    return {
        "v": v,
        "iterations": iterations,
        "lagrange_multiplier": lam,
        "damping_retries": 0,
        "energy_history": history,
    }


# ===== 入口 =====

def _pin_index(mesh: HalfStripMesh, columns: np.ndarray, pin_x: Optional[float]) -> Optional[int]:
    if pin_x is None:
        return None
    x = mesh.x_nodes[columns]
    return int(np.argmin(np.abs(x - pin_x)))


def solve_neumann_nonlinear(
    nl: Nonlinearity,
    order: FracOrder,
    mesh: HalfStripMesh,
    init: HalfStripField,
    strategy: SolverStrategy = SolverStrategy.NEWTON,
    *,
    pin_x: Optional[float] = None,
    deflate: Sequence[np.ndarray] = (),
    solver: Optional[SolverConfig] = None,
    tolerances: Optional[ToleranceConfig] = None,
    trace_kwargs: Optional[Dict[str, Any]] = None,
) -> Tuple[HalfStripField, LinearSystemStats]:
    """
    求解非线性 Neumann 问题

    init 提供 Dirichlet 节点（侧边，top_condition=far_field 时还有顶边）的值，j=0 行的自由节点为初始迹。

    Args:
        nl: 非线性项
        order: 分数阶
        mesh: 网格（权重指数必须为 order.a）
        init: 初始场
        strategy: newton（阻尼 Newton）或 gradient_flow（Armijo 预条件梯度下降）
        pin_x: 钉扎位置，迹在该节点固定为初值，平移不变性由 Lagrange 乘子吸收
        deflate: 已知解的迹（长度 nx+1），Newton 的收缩因子会避开它们
        solver: 求解器配置
        tolerances: 容差配置
        trace_kwargs: 传给结果 trace 的元数据

    Returns:
        Tuple[HalfStripField, LinearSystemStats]: 解场与统计

    Raises:
        ConvergenceError: 边界残差或内部残差超过容差，partial 为最后的场
    """
    check_compatible(order, mesh)
    solver = solver or SolverConfig()
    tolerances = tolerances or ToleranceConfig()
    strategy = SolverStrategy(strategy)
    dtn = dtn_map(mesh, init.values, solver.direct_limit, solver.cg_rtol, solver.schur_chunk)
    columns = dtn.columns
    known: List[np.ndarray] = []
    for d in deflate:
        d = np.asarray(d, dtype=np.float64)
        known.append(d[columns] if d.size == mesh.nx + 1 else d)

    pin = _pin_index(mesh, columns, pin_x)
    problem = _BoundaryProblem(dtn, nl, order.a, pin, known)
    v0 = np.array(init.values[0, columns], dtype=np.float64)
    tol = tolerances.boundary_residual
    logger.info(f"非线性求解开始: 策略 {strategy.value}，迹未知数 {dtn.size}，s={order.s}")

    try:
        if strategy == SolverStrategy.NEWTON:
            outcome = _newton(problem, v0, float(v0[pin]) if pin is not None else 0.0, solver.max_iterations, tol)
        else:
            outcome = _gradient_flow(problem, v0, solver.gradient_max_iterations, tol)
    except LinAlgError as e:
        stats = LinearSystemStats(converged=False, solver=strategy.value, damping_retries=MAX_DAMPING_RETRIES)
        raise ConvergenceError(f"Jacobian 在阻尼重试后仍奇异: {e}", stats=stats) from e

    v = outcome["v"]
    u = dtn.extend(v)
    A = assemble_operator(mesh)
    boundary = problem.boundary_residual(v)
    interior = weighted_residual(A, u.ravel(), dtn.I)
    converged = bool(np.all(np.isfinite(v)) and boundary <= tol and interior <= tolerances.interior_residual)
    stats = LinearSystemStats(
        iterations=outcome["iterations"],
        residual_norm=float(np.linalg.norm(problem.scaled(problem.residual(v))[problem.keep])),
        assembly_symmetric=is_symmetric(A),
        converged=converged,
        solver=f"{strategy.value}/{dtn.solver.name}",
        boundary_residual=boundary,
        interior_residual=interior,
        lagrange_multiplier=outcome["lagrange_multiplier"],
        energy_history=outcome["energy_history"],
        damping_retries=outcome["damping_retries"],
    )

    if not converged:
        partial = dtn.field(v) if np.all(np.isfinite(v)) else None
        reason = "，线搜索停滞" if outcome.get("stalled") else ""
        raise ConvergenceError(
            f"非线性求解未收敛{reason}: 边界残差 {boundary:.3e} (容差 {tol:.0e})，内部残差 {interior:.3e}",
            stats=stats,
            partial=partial,
        )
    logger.info(f"非线性求解完成: {stats.iterations} 步，边界残差 {boundary:.3e}")
    return dtn.field(v, **(trace_kwargs or {})), stats


__all__ = [
    "solve_neumann_nonlinear",
]
