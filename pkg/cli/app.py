"""
FracHam Command Line

typer 应用：eval、layer、sweep、radial、properties 五个命令共用同一组选项
"""

from pathlib import Path
from typing import Annotated, List, Optional

import typer

from models.config import CommandName, RuntimeSettings
from utils.logging import configure_logging, resolve_level
from .commands import execute

app = typer.Typer(
    name="fracham",
    help="分数阶 Laplacian 的延拓求解、层解与哈密顿量检查",
    add_completion=False,
    no_args_is_help=True,
)

ConfigOption = Annotated[Optional[Path], typer.Option("--config", "-c", help="YAML 运行配置")]
SetOption = Annotated[Optional[List[str]], typer.Option("--set", help="覆盖配置项 section.key=value，可重复")]
OutputOption = Annotated[Optional[Path], typer.Option("--output-dir", "-o", help="输出目录")]
NormalizeOption = Annotated[bool, typer.Option("--normalize-trace", help="f 预先除以 d_s/(2(1-s))")]
VerboseOption = Annotated[bool, typer.Option("--verbose", "-v", help="输出调试日志")]
QuietOption = Annotated[bool, typer.Option("--quiet", "-q", help="只输出警告与错误")]


def _run(
    command: CommandName,
    config: Optional[Path],
    overrides: Optional[List[str]],
    output_dir: Optional[Path],
    normalize_trace: bool,
    verbose: bool,
    quiet: bool,
) -> None:
    settings = RuntimeSettings()
    configure_logging(resolve_level(verbose, quiet, settings.log_level))
    code = execute(
        command,
        config_path=config,
        overrides=overrides or [],
        output_dir=output_dir,
        normalize_trace=normalize_trace,
        settings=settings,
    )
    raise typer.Exit(code=code)


@app.command("eval")
def eval_command(
    config: ConfigOption = None,
    overrides: SetOption = None,
    output_dir: OutputOption = None,
    normalize_trace: NormalizeOption = False,
    verbose: VerboseOption = False,
    quiet: QuietOption = False,
) -> None:
    """用主值积分与 Fourier 两种方法计算 (-Δ)^s 并比较"""
    _run(CommandName.EVAL, config, overrides, output_dir, normalize_trace, verbose, quiet)


@app.command("layer")
def layer_command(
    config: ConfigOption = None,
    overrides: SetOption = None,
    output_dir: OutputOption = None,
    normalize_trace: NormalizeOption = False,
    verbose: VerboseOption = False,
    quiet: QuietOption = False,
) -> None:
    """求解层解并检查哈密顿恒等式与 Modica 估计"""
    _run(CommandName.LAYER, config, overrides, output_dir, normalize_trace, verbose, quiet)


@app.command("sweep")
def sweep_command(
    config: ConfigOption = None,
    overrides: SetOption = None,
    output_dir: OutputOption = None,
    normalize_trace: NormalizeOption = False,
    verbose: VerboseOption = False,
    quiet: QuietOption = False,
) -> None:
    """沿 s_list 延拓层解并与经典层解比较"""
    _run(CommandName.SWEEP, config, overrides, output_dir, normalize_trace, verbose, quiet)


@app.command("radial")
def radial_command(
    config: ConfigOption = None,
    overrides: SetOption = None,
    output_dir: OutputOption = None,
    normalize_trace: NormalizeOption = False,
    verbose: VerboseOption = False,
    quiet: QuietOption = False,
) -> None:
    """求径向解并检查径向哈密顿量的单调性"""
    _run(CommandName.RADIAL, config, overrides, output_dir, normalize_trace, verbose, quiet)


@app.command("properties")
def properties_command(
    config: ConfigOption = None,
    overrides: SetOption = None,
    output_dir: OutputOption = None,
    normalize_trace: NormalizeOption = False,
    verbose: VerboseOption = False,
    quiet: QuietOption = False,
) -> None:
    """运行最大值原理、比较原理、Harnack、Hopf 与对偶原理的随机检查"""
    _run(CommandName.PROPERTIES, config, overrides, output_dir, normalize_trace, verbose, quiet)


__all__ = [
    "app",
]
