#!/usr/bin/env python3
"""
FracHam Entry Point

命令行入口
"""

import os
import sys

# 添加项目根目录到 Python 路径
project_root = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, project_root)

from cli import app  # noqa: E402

if __name__ == "__main__":
    app()
