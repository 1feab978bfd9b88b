"""
FracHam Plots

静态 SVG 图：迹、H 与 G 势能差的叠加、Modica 裕度热图、径向剖面、s 扫描表
"""

from pathlib import Path
from typing import Dict, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import structlog  # noqa: E402

logger = structlog.get_logger(__name__)

SVG_HASHSALT = "fracham"


def _save(fig, path: Path) -> Path:
    """固定 hashsalt、去掉 Date 元数据，重复运行输出一致"""
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASHSALT, "svg.fonttype": "path"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug(f"写入 SVG: {path}")
    return path


def plot_curves(
    x: np.ndarray,
    curves: Dict[str, np.ndarray],
    path: Path,
    *,
    title: str = "",
    xlabel: str = "x",
    ylabel: str = "",
    styles: Optional[Dict[str, str]] = None,
) -> Path:
    """多条曲线的折线图"""
    styles = styles or {}
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for label, values in curves.items():
        ax.plot(x, values, styles.get(label, "-"), label=label, linewidth=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, linewidth=0.3)
    if len(curves) > 1:
        ax.legend()
    fig.tight_layout()
    return _save(fig, path)


def plot_trace(x: np.ndarray, trace: np.ndarray, path: Path, reference: Optional[np.ndarray] = None,
               title: str = "") -> Path:
    curves = {"trace": trace}
    if reference is not None:
        curves["reference"] = reference
    return plot_curves(x, curves, path, title=title, ylabel="v", styles={"reference": "--"})


def plot_hamiltonian(x: np.ndarray, H: np.ndarray, gap: np.ndarray, path: Path, title: str = "") -> Path:
    """H(x) 与 G(v(x)) - G(1) 的叠加"""
    return plot_curves(
        x, {"H": H, "G(v) - G(1)": gap}, path, title=title, styles={"G(v) - G(1)": "--"},
    )


def plot_margin(x: np.ndarray, y: np.ndarray, margin: np.ndarray, path: Path, title: str = "") -> Path:
    """Modica 裕度 (x, y) 热图，负值与正值用发散色图区分"""
    bound = float(np.max(np.abs(margin))) or 1.0
    fig, ax = plt.subplots(figsize=(7.0, 3.0))
    mesh = ax.pcolormesh(x, y, margin, cmap="RdBu", vmin=-bound, vmax=bound, shading="nearest", rasterized=False)
    fig.colorbar(mesh, ax=ax, label="margin")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_sweep(s_values: Sequence[float], columns: Dict[str, Sequence[float]], path: Path) -> Path:
    """s 扫描的各列，对数纵轴"""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, values in columns.items():
        vals = np.abs(np.asarray(values, dtype=np.float64))
        ax.semilogy(s_values, np.where(vals > 0.0, vals, np.nan), "o-", label=label)
    ax.set_xlabel("s")
    ax.grid(True, which="both", linewidth=0.3)
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


__all__ = [
    "plot_curves",
    "plot_trace",
    "plot_hamiltonian",
    "plot_margin",
    "plot_sweep",
]
