"""
FracHam CLI

命令行应用、命令驱动与产物写出
"""

from .app import app
from .commands import COMMANDS, CommandResult, execute

__all__ = [
    "app",
    "COMMANDS",
    "CommandResult",
    "execute",
]
