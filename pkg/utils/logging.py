"""
FracHam Logging Setup

structlog 的一次性配置：级别过滤，输出到 stderr，磁盘上的产物不含日志
"""

import logging
import sys
from typing import Optional, TextIO

import structlog

LEVELS = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
}


def resolve_level(verbose: bool = False, quiet: bool = False, default: str = "INFO") -> int:
    """--verbose 优先于 --quiet，其次是环境变量给出的级别"""
    if verbose:
        return logging.DEBUG
    if quiet:
        return logging.WARNING
    return LEVELS.get(default.upper(), logging.INFO)


def configure_logging(level: int = logging.INFO, stream: Optional[TextIO] = None) -> None:
    """配置 structlog，可重复调用"""
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(level),
        logger_factory=structlog.PrintLoggerFactory(file=stream or sys.stderr),
        cache_logger_on_first_use=False,
    )


__all__ = [
    "LEVELS",
    "resolve_level",
    "configure_logging",
]
