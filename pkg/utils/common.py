from pathlib import Path
from typing import Union

import numpy as np


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """由 (seed, stream) 派生的独立随机数生成器，结果与调用顺序无关"""
    return np.random.default_rng([int(seed), int(stream)])


def ensure_directory(path: Union[str, Path]) -> Path:
    """创建目录（已存在时不报错）"""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def format_s(s: float) -> str:
    """文件名中使用的 s 标记，例如 0.5 -> s0.5"""
    return f"s{float(s):g}"
