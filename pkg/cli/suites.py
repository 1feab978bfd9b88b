"""
FracHam Property Suites

随机化的离散性质检查：最大值原理、比较原理、Harnack、Hopf 与对偶原理
"""

from typing import List

import numpy as np
import structlog

from models.base import CheckReport, CheckStatus, FracOrder
from models.config import RunConfig
from models.mesh import BoundaryData, HalfStripMesh
from core.extension import (
    build_field,
    check_comparison,
    check_hopf,
    check_max_principle,
    conjugate_residual,
    dual_conjugate,
    estimate_harnack,
    fit_flux,
    hopf_barrier,
    hopf_report,
    random_boundary,
    solve_dirichlet,
)
from utils.common import make_rng

logger = structlog.get_logger(__name__)

SUITE_HALF_WIDTH = 2.0
DUALITY_HALF_WIDTH = 8.0
COMPARISON_STREAM = 1000


def suite_mesh(order: FracOrder, size: int, half_width: float = SUITE_HALF_WIDTH, nx: int = 0) -> HalfStripMesh:
    a = order.a
    return HalfStripMesh(
        X=half_width,
        Y=half_width,
        nx=nx or size,
        ny=size,
        grading=HalfStripMesh.default_grading(a, half_width, size),
        weight_exponent=a,
    )


def max_principle_suite(config: RunConfig) -> CheckReport:
    """非负随机边界数据的 Dirichlet 解在内部不取负值"""
    mesh = suite_mesh(config.order, config.properties.mesh_size)
    tol = config.tolerances.max_principle
    violations, worst = 0, np.inf
    for trial in range(config.properties.max_principle_trials):
        field, _ = solve_dirichlet(mesh, random_boundary(mesh, make_rng(config.seed, trial)))
        report = check_max_principle(field, tol)
        worst = min(worst, report.value)
        violations += 0 if report.passed else 1
    return CheckReport.from_bool(
        "max_principle", violations == 0, value=float(violations), tolerance=tol,
        details={"trials": config.properties.max_principle_trials, "min_interior": worst},
    )


def comparison_suite(config: RunConfig) -> CheckReport:
    """有序边界数据给出有序解"""
    mesh = suite_mesh(config.order, config.properties.mesh_size)
    tol = config.tolerances.max_principle
    violations, worst = 0, np.inf
    for trial in range(config.properties.comparison_trials):
        rng = make_rng(config.seed, COMPARISON_STREAM + trial)
        lower = random_boundary(mesh, rng)
        bump = random_boundary(mesh, rng, scale=0.5)
        upper = BoundaryData(
            bottom=lower.bottom + bump.bottom,
            top=lower.top + bump.top,
            left=lower.left + bump.left,
            right=lower.right + bump.right,
        )
        report = check_comparison(mesh, lower, upper, tol)
        worst = min(worst, report.value)
        violations += 0 if report.passed else 1
    return CheckReport.from_bool(
        "comparison", violations == 0, value=float(violations), tolerance=tol,
        details={"trials": config.properties.comparison_trials, "min_gap": worst},
    )


def harnack_suite(config: RunConfig) -> List[CheckReport]:
    """每个权重指数 a：比值有限、≥ 1，且分辨率加倍时相对变化不超过 harnack_stability"""
    props = config.properties
    reports = []
    for a in props.harnack_exponents:
        order = FracOrder(s=0.5 * (1.0 - a))
        ratios = [
            estimate_harnack(order, props.harnack_trials, seed=config.seed, d_bound=props.harnack_d_bound,
                             resolution=resolution)
            for resolution in (props.harnack_resolution, 2 * props.harnack_resolution)
        ]
        change = abs(ratios[1] - ratios[0]) / ratios[0]
        ok = bool(np.all(np.isfinite(ratios))) and min(ratios) >= 1.0 and change <= props.harnack_stability
        reports.append(CheckReport.from_bool(
            f"harnack[a={a:g}]", ok, value=ratios[1], tolerance=props.harnack_stability,
            details={"coarse": ratios[0], "fine": ratios[1], "relative_change": change},
        ))
    return reports


def hopf_suite(config: RunConfig) -> CheckReport:
    """上调和障碍函数在底边零点处的通量严格为负"""
    mesh = suite_mesh(config.order, config.properties.mesh_size)
    flux = check_hopf(hopf_barrier(mesh), mesh.nx // 2)
    return hopf_report(flux)


def _duality_boundary(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return 2.0 / np.pi * np.arctan(x / (1.0 + y))


def duality_suite(config: RunConfig) -> CheckReport:
    """w = -y^a u_y 满足共轭方程的残差随网格加密递减"""
    residuals = []
    for size in config.properties.duality_resolutions:
        mesh = suite_mesh(config.order, size, DUALITY_HALF_WIDTH, nx=2 * size)
        u, _ = solve_dirichlet(mesh, BoundaryData.from_function(mesh, _duality_boundary))
        residuals.append(conjugate_residual(dual_conjugate(u)))
    ok = all(r1 < r0 for r0, r1 in zip(residuals[:-1], residuals[1:]))
    rates = [float(np.log2(r0 / r1)) for r0, r1 in zip(residuals[:-1], residuals[1:]) if r1 > 0.0]
    return CheckReport.from_bool(
        "duality", ok, value=residuals[-1],
        details={"resolutions": list(config.properties.duality_resolutions), "residuals": residuals,
                 "observed_rates": rates},
    )


def forced_violation(config: RunConfig) -> CheckReport:
    """人为制造的负内部值，用于验证失败路径"""
    mesh = suite_mesh(config.order, config.properties.mesh_size)
    field, _ = solve_dirichlet(mesh, random_boundary(mesh, make_rng(config.seed, 0)))
    values = np.array(field.values)
    values[mesh.ny // 2, mesh.nx // 2] = -1.0
    broken = build_field(mesh, values, fit_flux(mesh, values))
    report = check_max_principle(broken, config.tolerances.max_principle)
    return CheckReport(**{**report.model_dump(), "name": "forced_violation"})


def run_property_suite(config: RunConfig) -> List[CheckReport]:
    """按固定顺序运行所有性质检查"""
    reports = [max_principle_suite(config), comparison_suite(config)]
    reports.extend(harnack_suite(config))
    reports.append(hopf_suite(config))
    reports.append(duality_suite(config))
    if config.properties.force_violation:
        reports.append(forced_violation(config))
    failed = [r.name for r in reports if r.status == CheckStatus.FAIL]
    logger.info(f"性质检查完成: {len(reports)} 项，失败 {len(failed)} 项 {failed}")
    return reports


__all__ = [
    "suite_mesh",
    "max_principle_suite",
    "comparison_suite",
    "harnack_suite",
    "hopf_suite",
    "duality_suite",
    "forced_violation",
    "run_property_suite",
]
