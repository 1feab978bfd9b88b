"""
FracHam Command Drivers

各命令的驱动：读取 RunConfig，调用核心模块，写出 CSV/JSON/SVG 产物并返回退出码。
库代码只抛出异常，退出码映射集中在 execute()。
"""

from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import structlog
from pydantic import BaseModel, Field, ValidationError

from models.base import AsymptoteDecay, CheckReport, CheckStatus, GridFunction, MeshGeometry, OperatorMethod
from models.config import CommandName, RunConfig, RuntimeSettings
from models.errors import ConfigError, ConvergenceError, FracHamError, PartialResultsError
from models.hamiltonian import HamiltonianProfile
from models.profiles import LayerSolution, Nonlinearity, RadialSolution, RadialStatus
from core.fraclap import evaluate_fraclap, nonlocal_residual
from core.hamiltonian import (
    check_far_field,
    check_symmetry,
    layer_profile,
    modica_margin,
    radial_hamiltonian,
    s_limit_split,
    verify_identity,
    verify_modica,
)
from core.kernels import trace_scaling
from core.profiles import (
    check_layer_quality,
    check_necessary_conditions,
    check_radial_conditions,
    continuation_in_s,
    effective_nonlinearity,
    interface_width,
    make_nonlinearity,
    necessary_conditions_report,
    solve_layer,
    solve_ode_layer,
    solve_radial,
)
from utils.common import ensure_directory, format_s
from utils.serialization import load_grid_function, save_field, save_grid_function, write_csv, write_json
from . import plots
from .console import check_table, rows_table, show, summary_line
from .suites import run_property_suite

logger = structlog.get_logger(__name__)

DEFAULT_CONFIG = Path(__file__).resolve().parents[1] / "config" / "default_run.yaml"
RESOLVED_CONFIG = "resolved_config.yaml"
EXIT_OK = 0
EXIT_CHECK_FAILED = 1


class CommandResult(BaseModel):
    """命令结果：退出码与摘要"""

    exit_code: int = Field(default=EXIT_OK, description="进程退出码")
    summary: Dict[str, Any] = Field(default_factory=dict, description="写入 summary JSON 的内容")


# ===== 公共部分 =====

def build_nonlinearity(config: RunConfig) -> Nonlinearity:
    return make_nonlinearity(config.nonlinearity.name, config.nonlinearity.params)


def _named_report(name: str, status: CheckStatus, value: float, tolerance: float) -> CheckReport:
    return CheckReport(name=name, status=status, value=value, tolerance=tolerance)


def write_layer_bundle(
    layer: LayerSolution, nl: Nonlinearity, config: RunConfig, out: Path
) -> Tuple[Dict[str, Any], HamiltonianProfile, List[CheckReport]]:
    """
    层解产物

    trace.csv、field.csv、hamiltonian.csv（x,H,G_gap,margin_min_y）、modica_margin.csv 及三张 SVG 图。
    """
    tolerances = config.tolerances
    ensure_directory(out)
    profile = layer_profile(layer, threads=config.threads)
    identity = verify_identity(layer, nl, tolerances, profile=profile)
    modica = verify_modica(layer, nl, tolerances, profile=profile)
    far_field = check_far_field(layer, nl, tolerances, profile=profile)
    symmetry = check_symmetry(profile, tolerances)
    quality = check_layer_quality(layer, nl, tolerances)

    mesh = layer.field.mesh
    x = profile.xs
    trace = layer.field.values[0]
    gap = nl.gap(trace)
    margin = modica_margin(profile, gap)

    save_grid_function(layer.trace, out / "trace.csv", s=layer.order.s)
    save_field(layer.field, out / "field.csv")
    write_csv(
        pd.DataFrame({"x": x, "H": profile.H, "G_gap": gap, "margin_min_y": modica.margin_min_y}),
        out / "hamiltonian.csv",
    )
    margin_frame = pd.DataFrame(margin, columns=[f"x{i}" for i in range(mesh.nx + 1)])
    margin_frame.insert(0, "y", mesh.y_nodes)
    write_csv(margin_frame, out / "modica_margin.csv")

    reference = None
    if check_necessary_conditions(nl).passed:
        reference = solve_ode_layer(nl, x).values
    label = f"s={layer.order.s:g}, {nl.name}"
    plots.plot_trace(x, trace, out / "trace.svg", reference=reference, title=label)
    plots.plot_hamiltonian(x, profile.H, gap, out / "hamiltonian.svg", title=label)
    plots.plot_margin(x, mesh.y_nodes, margin, out / "modica_margin.svg", title=label)

    checks = [
        _named_report("hamiltonian_identity", identity.status, identity.relative_residual,
                      tolerances.identity_relative),
        _named_report("modica", modica.status, modica.min_margin, modica.tolerance),
        far_field,
        symmetry,
        quality,
    ]
    summary = {
        "s": layer.order.s,
        "nonlinearity": nl.name,
        "scale": nl.scale,
        "identity": identity,
        "modica": modica.model_dump(exclude={"margin_min_y"}),
        "far_field": far_field,
        "symmetry": symmetry,
        "layer_quality": quality,
        "stats": layer.stats,
        "max_tail": float(np.max(np.abs(profile.tail))),
        "max_tail_bound": float(np.max(profile.tail_bound)),
    }
    return summary, profile, checks


# ===== eval =====

def _eval_input(config: RunConfig) -> Tuple[GridFunction, Optional[np.ndarray]]:
    """测试函数与 (-Δ)^s 的已知值（若有）"""
    ev = config.eval
    s = config.s
    if ev.profile is not None:
        return load_grid_function(ev.profile), None
    hw, count = ev.half_width, ev.points
    name = ev.test_function
    if name == "bump":
        return GridFunction.sample(lambda x: np.exp(-x ** 2), -hw, hw, count,
                                   left_asymptote=0.0, right_asymptote=0.0), None
    if name == "cos":
        k = ev.wavenumber
        v = GridFunction.sample(lambda x: np.cos(k * x), 0.0, 2.0 * np.pi, count, periodic=True)
        return v, float(k) ** (2.0 * s) * v.values
    if name == "arctan":
        v = GridFunction.sample(
            lambda x: 2.0 / np.pi * np.arctan(x), -hw, hw, count,
            left_asymptote=-1.0, right_asymptote=1.0, asymptote_decay=AsymptoteDecay.POWER, decay_exponent=1.0,
        )
        return v, None
    if name == "constant":
        v = GridFunction.sample(lambda x: np.ones_like(x), -hw, hw, count, left_asymptote=1.0, right_asymptote=1.0)
        return v, np.zeros(count)
    raise ConfigError(f"未知的测试函数: {name}")


def cmd_eval(config: RunConfig, out: Path) -> CommandResult:
    """PV 与 Fourier 两种方法求值并比较；cos 与常数有精确值，arctan 在 s=1/2 时报告层方程残差"""
    order = config.order
    v, expected = _eval_input(config)
    margin = config.solver.edge_margin
    pv = evaluate_fraclap(v, order, OperatorMethod.PV, edge_margin=margin)
    fourier = evaluate_fraclap(v, order, OperatorMethod.FOURIER, edge_margin=margin)
    both = pv.valid & fourier.valid
    disagreement = float(np.max(np.abs(pv.values.values - fourier.values.values)[both])) if np.any(both) else 0.0
    tolerance = config.tolerances.method_agreement
    checks = [CheckReport.from_bool("method_agreement", disagreement <= tolerance, value=disagreement,
                                    tolerance=tolerance)]

    frame = pd.DataFrame({
        "x": v.x,
        "value": v.values,
        "pv": pv.values.values,
        "fourier": fourier.values.values,
        "pv_valid": pv.valid.astype(int),
        "fourier_valid": fourier.valid.astype(int),
    })
    summary: Dict[str, Any] = {
        "s": order.s,
        "test_function": config.eval.test_function if config.eval.profile is None else str(config.eval.profile),
        "points": v.size,
        "method_disagreement": disagreement,
        "tail_estimate": {"pv": pv.tail_estimate, "fourier": fourier.tail_estimate},
    }
    if expected is not None:
        frame["expected"] = expected
        errors = {
            "pv": float(np.max(np.abs(pv.values.values - expected)[pv.valid])),
            "fourier": float(np.max(np.abs(fourier.values.values - expected)[fourier.valid])),
        }
        summary["exact_error"] = errors
        checks.append(CheckReport.from_bool("exact_value", max(errors.values()) <= tolerance,
                                            value=max(errors.values()), tolerance=tolerance))
    if config.eval.test_function == "arctan" and config.eval.profile is None and order.s == 0.5:
        residual = nonlocal_residual(v, make_nonlinearity("sine_pi"), order, OperatorMethod.PV,
                                     scaling=trace_scaling(order.s), edge_margin=margin)
        frame["layer_residual"] = residual.values
        inner = np.abs(v.x) <= 0.5 * config.eval.half_width
        summary["layer_residual"] = float(np.nanmax(np.abs(residual.values)[inner]))

    write_csv(frame, out / "eval.csv")
    curves = {"pv": np.where(pv.valid, pv.values.values, np.nan),
              "fourier": np.where(fourier.valid, fourier.values.values, np.nan)}
    plots.plot_curves(v.x, curves, out / "eval.svg", title=f"(-Δ)^s, s={order.s:g}", styles={"fourier": "--"})
    summary["checks"] = checks
    write_json(summary, out / "eval_report.json")
    show(check_table("eval", checks))
    return CommandResult(summary=summary)


# ===== layer =====

def cmd_layer(config: RunConfig, out: Path) -> CommandResult:
    """层解、哈密顿恒等式、Modica 估计与必要条件"""
    order = config.order
    base = build_nonlinearity(config)
    nl = effective_nonlinearity(base, order.s, config.solver.normalize_trace)
    necessary = check_necessary_conditions(nl)
    write_json(necessary, out / "necessary_conditions.json")
    if not necessary.passed:
        logger.warning(f"{nl.name} 不满足必要条件，层解预计不存在: {necessary.failing_clauses}")
    mesh = config.mesh.build(order, width=interface_width(base))
    layer = solve_layer(nl, order, mesh, solver=config.solver, tolerances=config.tolerances)
    summary, _, checks = write_layer_bundle(layer, nl, config, out)
    checks.insert(0, necessary_conditions_report(necessary))
    summary["necessary_conditions"] = necessary
    write_json(summary, out / "summary.json")
    show(check_table(f"layer s={order.s:g}", checks))
    return CommandResult(summary=summary)


# ===== sweep =====

def _sweep_rows(
    nl: Nonlinearity, config: RunConfig, out: Path, s_values: Sequence[float],
    layers: Sequence[LayerSolution], errors: Sequence[float],
) -> List[Dict[str, float]]:
    rows = []
    for s, layer, error in zip(s_values, layers, errors):
        layer_nl = effective_nonlinearity(nl, s, config.solver.normalize_trace)
        summary, profile, _ = write_layer_bundle(layer, layer_nl, config, out / format_s(s))
        write_json(summary, out / format_s(s) / "summary.json")
        rows.append({
            "s": s,
            "ode_error": error,
            "x_part_x0": float(np.interp(0.0, profile.xs, profile.x_part)),
            "y_part_x0": float(np.interp(0.0, profile.xs, profile.y_part)),
            "identity_relative": summary["identity"].relative_residual,
        })
    return rows


def cmd_sweep(config: RunConfig, out: Path) -> CommandResult:
    """
    s 延拓扫描

    中途失败时先写出已完成部分，再抛出 PartialResultsError（退出码 5）。
    """
    nl = build_nonlinearity(config)
    failure: Optional[PartialResultsError] = None
    try:
        result = continuation_in_s(nl, config.s_list, config.mesh, solver=config.solver,
                                   tolerances=config.tolerances)
    except PartialResultsError as e:
        failure = e
        result = e.partial

    rows = _sweep_rows(nl, config, out, result.s_values, result.layers, result.ode_errors)
    columns = ["s", "ode_error", "x_part_x0", "y_part_x0", "identity_relative"]
    write_csv(pd.DataFrame(rows, columns=columns), out / "sweep.csv")
    s_limit = s_limit_split(result.layers, [0.0], nl, config.tolerances)
    summary = {
        "s_values": result.s_values,
        "ode_errors": result.ode_errors,
        "error_window": result.error_window,
        "monotone_verdict": result.monotone_verdict,
        "s_limit": s_limit,
        "completed": failure is None,
    }
    if failure is not None:
        summary["failure"] = {"message": str(failure), "cause": repr(failure.cause)}
    write_json(summary, out / "sweep_summary.json")
    if rows:
        plots.plot_sweep(
            [r["s"] for r in rows],
            {"sup|v_s - v̄|": [r["ode_error"] for r in rows], "y-part(0)": [r["y_part_x0"] for r in rows]},
            out / "sweep.svg",
        )
    show(rows_table("sweep", columns, [[r[c] for c in columns] for r in rows]))
    if failure is not None:
        raise failure
    return CommandResult(summary=summary)


# ===== radial =====

def cmd_radial(config: RunConfig, out: Path) -> CommandResult:
    """
    径向解与径向哈密顿量单调性

    只得到零解时状态为 not_exercised，仍对零解检查常数剖面，退出码 0。
    """
    n = config.dimension
    order = config.order
    nl = effective_nonlinearity(build_nonlinearity(config), order.s, config.solver.normalize_trace)
    mesh = config.mesh.build(order, MeshGeometry.RADIAL, n)
    result = solve_radial(nl, order, n, mesh, solver=config.solver, tolerances=config.tolerances)
    summary: Dict[str, Any] = {"s": order.s, "dimension": n, "nonlinearity": nl.name,
                               "status": result.status, "attempts": result.attempts}
    checks: List[CheckReport] = []

    if result.status == RadialStatus.FOUND:
        solution = result.solution
        report = radial_hamiltonian(solution, nl, config.tolerances)
        conditions = check_radial_conditions(nl, solution.amplitude, decreasing=solution.is_decreasing)
        save_grid_function(solution.profile, out / "radial_trace.csv", s=order.s)
        save_field(solution.field, out / "radial_field.csv")
        write_csv(pd.DataFrame({"r": report.r, "v": solution.profile.values, "hamiltonian": report.profile}),
                  out / "radial_profile.csv")
        plots.plot_curves(report.r, {"v": solution.profile.values, "hamiltonian": report.profile},
                          out / "radial.svg", xlabel="r", title=f"n={n}, s={order.s:g}")
        checks = [
            CheckReport.from_bool("radial_monotone", report.monotone_pass, value=report.max_increase,
                                  tolerance=config.tolerances.radial_monotone),
            CheckReport.from_bool("radial_derivative", report.derivative_pass,
                                  value=report.derivative_max_relative_error,
                                  tolerance=config.tolerances.radial_derivative_relative),
            conditions,
        ]
        summary.update(amplitude=solution.amplitude, decreasing=solution.is_decreasing,
                       hamiltonian=report.model_dump(exclude={"r", "profile"}), radial_conditions=conditions)
    else:
        summary["verdict"] = CheckStatus.NOT_EXERCISED
        if result.trivial_field is not None:
            trivial = RadialSolution(
                profile=GridFunction(x0=0.0, h=mesh.hx, values=result.trivial_field.values[0].copy()),
                field=result.trivial_field, order=order.with_dimension(n), dimension=n,
            )
            report = radial_hamiltonian(trivial, nl, config.tolerances)
            checks = [CheckReport.from_bool("radial_constant_profile", report.monotone_pass,
                                            value=report.max_increase,
                                            tolerance=config.tolerances.radial_monotone)]
            summary["trivial_hamiltonian"] = report.model_dump(exclude={"r", "profile"})
        checks.append(CheckReport(name="radial_solution", status=CheckStatus.NOT_EXERCISED))

    summary["checks"] = checks
    write_json(summary, out / "radial_summary.json")
    show(check_table(f"radial n={n}", checks))
    return CommandResult(summary=summary)


# ===== properties =====

def cmd_properties(config: RunConfig, out: Path) -> CommandResult:
    """随机性质检查套件，任何 FAIL 时退出码 1"""
    reports = run_property_suite(config)
    counts = {status.value: sum(1 for r in reports if r.status == status) for status in CheckStatus}
    write_csv(
        pd.DataFrame(
            [[r.name, r.status.value, r.value, r.tolerance] for r in reports],
            columns=["check", "status", "value", "tolerance"],
        ),
        out / "properties.csv",
    )
    summary = {"seed": config.seed, "s": config.s, "counts": counts, "checks": reports}
    write_json(summary, out / "properties.json")
    show(check_table("properties", reports))
    code = EXIT_CHECK_FAILED if counts[CheckStatus.FAIL.value] else EXIT_OK
    return CommandResult(exit_code=code, summary=summary)


COMMANDS: Dict[CommandName, Callable[[RunConfig, Path], CommandResult]] = {
    CommandName.EVAL: cmd_eval,
    CommandName.LAYER: cmd_layer,
    CommandName.SWEEP: cmd_sweep,
    CommandName.RADIAL: cmd_radial,
    CommandName.PROPERTIES: cmd_properties,
}


# ===== 执行与退出码 =====

def load_run_config(
    command: CommandName,
    config_path: Optional[Path] = None,
    overrides: Sequence[str] = (),
    output_dir: Optional[Path] = None,
    normalize_trace: bool = False,
) -> RunConfig:
    """
    解析配置：YAML 文件（缺省为 config/default_run.yaml）、--set 覆盖项，再应用命令行开关

    Raises:
        ConfigError: 文件无法读取或校验失败
    """
    if config_path is None and DEFAULT_CONFIG.exists():
        config_path = DEFAULT_CONFIG
    config = RunConfig.from_yaml(config_path, list(overrides))
    data = config.model_dump()
    data["command"] = command
    if output_dir is not None:
        data["output_dir"] = output_dir
    if normalize_trace:
        data["solver"]["normalize_trace"] = True
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"配置校验失败: {e}") from e


def write_diagnostics(error: ConvergenceError, out: Path) -> None:
    """未收敛时的诊断 JSON，附带部分解（若有）"""
    write_json({"message": str(error), "exit_code": error.exit_code, "stats": error.stats},
               out / "diagnostics.json")
    partial = error.partial
    if partial is not None and hasattr(partial, "mesh"):
        save_field(partial, out / "partial_field.csv")


def execute(
    command: CommandName,
    config_path: Optional[Path] = None,
    overrides: Sequence[str] = (),
    output_dir: Optional[Path] = None,
    normalize_trace: bool = False,
    settings: Optional[RuntimeSettings] = None,
) -> int:
    """运行一个命令并返回退出码：2 配置、3 数值、4 未收敛、5 部分结果、1 性质检查失败"""
    settings = settings or RuntimeSettings()
    try:
        config = load_run_config(command, config_path, overrides, output_dir, normalize_trace)
    except FracHamError as e:
        logger.error(f"配置错误: {e}")
        return e.exit_code

    out = ensure_directory(config.output_dir or settings.output_dir)
    resolved = RunConfig.model_validate({**config.model_dump(), "output_dir": out})
    (out / RESOLVED_CONFIG).write_text(resolved.to_yaml(), encoding="utf-8")
    logger.info(f"开始运行 {command.value}: 输出目录 {out}")

    try:
        result = COMMANDS[command](resolved, out)
    except ConvergenceError as e:
        logger.error(f"求解未收敛: {e}")
        write_diagnostics(e, out)
        return e.exit_code
    except FracHamError as e:
        logger.error(f"{command.value} 失败: {e}")
        return e.exit_code

    summary_line(f"{command.value} 完成", {"exit_code": result.exit_code, "output_dir": str(out)})
    return result.exit_code


__all__ = [
    "CommandResult",
    "COMMANDS",
    "build_nonlinearity",
    "write_layer_bundle",
    "cmd_eval",
    "cmd_layer",
    "cmd_sweep",
    "cmd_radial",
    "cmd_properties",
    "load_run_config",
    "write_diagnostics",
    "execute",
]
