"""
FracHam Serialization

网格函数与延拓场的 CSV + JSON 边车读写，以及确定性的 JSON 输出
"""

import json
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
import pandas as pd
import structlog
from pydantic import BaseModel

from models.base import GridFunction
from models.errors import ConfigError
from models.mesh import HalfStripField, HalfStripMesh

logger = structlog.get_logger(__name__)

FLOAT_FORMAT = "%.17g"

PathLike = Union[str, Path]


def sidecar_path(path: PathLike) -> Path:
    """data.csv 的边车为 data.json"""
    return Path(path).with_suffix(".json")


def to_jsonable(obj: Any) -> Any:
    """把 pydantic 模型、numpy 数组与标量、Enum、Path 转换为 JSON 类型"""
    if isinstance(obj, BaseModel):
        return to_jsonable(obj.model_dump(mode="python"))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if np.isfinite(value) else None
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps_json(data: Any) -> str:
    """键排序、无时间戳的 JSON 文本"""
    return json.dumps(to_jsonable(data), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(data: Any, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_json(data), encoding="utf-8")
    logger.debug(f"写入 JSON: {path}")
    return path


def read_json(path: PathLike) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def write_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    """固定浮点格式的 CSV，保证重复运行字节一致"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug(f"写入 CSV: {path}")
    return path


# ===== 网格函数 =====

def save_grid_function(v: GridFunction, path: PathLike, s: Optional[float] = None) -> Path:
    """
    保存网格函数

    CSV 列为 x,value；边车 JSON 含 x0、h、渐近值、衰减类型、periodic 与 s。
    """
    path = Path(path)
    write_csv(pd.DataFrame({"x": v.x, "value": v.values}), path)
    meta = v.metadata()
    meta["s"] = s
    write_json(meta, sidecar_path(path))
    return path


def load_grid_function(path: PathLike) -> GridFunction:
    """
    读取 save_grid_function 写出的网格函数

    Raises:
        ConfigError: 文件缺失、列缺失或 x 列与边车的 x0、h 不一致
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path)
        meta = read_json(sidecar_path(path))
    except (OSError, ValueError) as e:
        raise ConfigError(f"无法读取网格函数 {path}: {e}") from e
    if "value" not in frame.columns:
        raise ConfigError(f"{path} 缺少 value 列")
    meta = dict(meta)
    meta.pop("s", None)
    try:
        v = GridFunction(values=frame["value"].to_numpy(dtype=np.float64), **meta)
    except ValueError as e:
        raise ConfigError(f"网格函数元数据无效 {path}: {e}") from e
    if "x" in frame.columns and not np.allclose(frame["x"].to_numpy(), v.x, rtol=0.0, atol=1e-9 * max(1.0, abs(v.x_end))):
        raise ConfigError(f"{path} 的 x 列与 x0、h 不一致")
    return v


# ===== 延拓场 =====

def save_field(u: HalfStripField, path: PathLike) -> Path:
    """
    保存延拓场

    CSV 每行对应一个 y 节点，列为 x 节点；边车 JSON 含网格、通量迹与迹的元数据。
    """
    path = Path(path)
    columns = [f"x{i}" for i in range(u.mesh.nx + 1)]
    write_csv(pd.DataFrame(u.values, columns=columns), path)
    write_json(
        {
            "mesh": u.mesh.model_dump(mode="json"),
            "flux_trace": u.flux_trace,
            "trace": u.trace.metadata(),
        },
        sidecar_path(path),
    )
    return path


def load_field(path: PathLike) -> HalfStripField:
    """读取 save_field 写出的延拓场"""
    path = Path(path)
    try:
        frame = pd.read_csv(path)
        meta = read_json(sidecar_path(path))
    except (OSError, ValueError) as e:
        raise ConfigError(f"无法读取延拓场 {path}: {e}") from e
    try:
        mesh = HalfStripMesh.model_validate(meta["mesh"])
        values = frame.to_numpy(dtype=np.float64)
        trace = GridFunction(values=values[0].copy(), **meta["trace"])
        return HalfStripField(mesh=mesh, values=values, trace=trace, flux_trace=np.asarray(meta["flux_trace"]))
    except (KeyError, ValueError) as e:
        raise ConfigError(f"延拓场数据无效 {path}: {e}") from e


__all__ = [
    "FLOAT_FORMAT",
    "sidecar_path",
    "to_jsonable",
    "dumps_json",
    "write_json",
    "read_json",
    "write_csv",
    "save_grid_function",
    "load_grid_function",
    "save_field",
    "load_field",
]
