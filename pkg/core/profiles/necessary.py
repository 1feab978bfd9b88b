"""
FracHam Necessary Conditions

层解与径向解存在的必要条件：f(±1) = 0、G > G(1) = G(-1)、径向时 G(0) > G(v(0))
"""

import numpy as np
import structlog
from scipy.integrate import quad

from models.base import CheckReport, CheckStatus
from models.errors import DomainError
from models.profiles import NecessaryConditionsReport, Nonlinearity

logger = structlog.get_logger(__name__)

ZERO_TOLERANCE = 1e-10


def check_necessary_conditions(nl: Nonlinearity, samples: int = 1000) -> NecessaryConditionsReport:
    """
    双稳态必要条件

    nec1: |f(±1)| ≤ 1e-10；nec2: 内部采样点上 G - G(1) > 0 且 |G(1) - G(-1)| ≤ 1e-10。
    integral_f = ∫_{-1}^{1} f，nec2 成立时应接近 0。
    """
    if samples < 100:
        raise DomainError(f"采样点数至少为 100: {samples}")
    ends = np.array([-1.0, 1.0])
    f_ends = np.abs(nl.f(ends))
    nec1 = bool(np.all(f_ends <= ZERO_TOLERANCE))

    v = np.linspace(-1.0, 1.0, samples + 2)[1:-1]
    gap = nl.gap(v)
    min_gap = float(np.min(gap))
    G_ends = nl.G(ends)
    mismatch = float(abs(G_ends[1] - G_ends[0]))
    nec2 = min_gap > 0.0 and mismatch <= ZERO_TOLERANCE

    integral, _ = quad(lambda t: float(nl.f(np.float64(t))), -1.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200)

    clauses = []
    if not nec1:
        clauses.append(f"nec1: f(-1)={f_ends[0]:.3e}, f(1)={f_ends[1]:.3e}")
    if min_gap <= 0.0:
        clauses.append(f"nec2: min(G - G(1)) = {min_gap:.3e} ≤ 0")
    if mismatch > ZERO_TOLERANCE:
        clauses.append(f"nec2: |G(1) - G(-1)| = {mismatch:.3e}")
    report = NecessaryConditionsReport(
        nec1_pass=nec1,
        nec2_pass=nec2,
        integral_f=float(integral),
        min_gap=min_gap,
        well_mismatch=mismatch,
        failing_clauses=clauses,
    )
    if clauses:
        logger.debug(f"{nl.name} 不满足必要条件: {clauses}")
    return report


def necessary_conditions_report(report: NecessaryConditionsReport) -> CheckReport:
    """转换为通用 CheckReport"""
    return CheckReport(
        name="necessary_conditions",
        status=CheckStatus.PASS if report.passed else CheckStatus.FAIL,
        value=report.integral_f,
        failing_clauses=list(report.failing_clauses),
        details={"min_gap": report.min_gap, "well_mismatch": report.well_mismatch},
    )


def check_radial_conditions(nl: Nonlinearity, v0: float, decreasing: bool = True) -> CheckReport:
    """
    径向解的必要条件

    f(0) = 0，G(0) > G(v(0))；剖面递减时还要求 f'(0) = -G''(0) ≤ 0。
    """
    zero = np.float64(0.0)
    f0 = float(nl.f(zero))
    G_drop = float(nl.G(zero) - nl.G(np.float64(v0)))
    fp0 = float(nl.fprime(zero))
    clauses = []
    if abs(f0) > ZERO_TOLERANCE:
        clauses.append(f"f(0) = {f0:.3e} ≠ 0")
    if not G_drop > 0.0:
        clauses.append(f"G(0) - G(v(0)) = {G_drop:.3e} ≤ 0")
    if decreasing and fp0 > ZERO_TOLERANCE:
        clauses.append(f"f'(0) = {fp0:.3e} > 0")
    return CheckReport(
        name="radial_conditions",
        status=CheckStatus.FAIL if clauses else CheckStatus.PASS,
        value=G_drop,
        failing_clauses=clauses,
        details={"v0": float(v0), "f0": f0, "fprime0": fp0, "decreasing": decreasing},
    )


__all__ = [
    "check_necessary_conditions",
    "necessary_conditions_report",
    "check_radial_conditions",
]
