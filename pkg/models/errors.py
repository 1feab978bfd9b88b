"""
FracHam Exceptions

异常层次结构：库代码只抛出异常，退出码映射由 cli 负责
"""

from typing import Any, Optional


class FracHamError(Exception):
    """所有 FracHam 异常的基类"""

    exit_code: int = 3


# ===== 配置与定义域错误 =====

class ConfigError(FracHamError, ValueError):
    """运行配置无效"""

    exit_code = 2


class DomainError(FracHamError, ValueError):
    """参数超出定义域（s、n、y 等前置条件）"""

    exit_code = 2


class NonlinearityError(DomainError):
    """非线性项的一致性检查失败（G' ≠ -f 或 f' 不匹配）"""


# ===== 数值错误 =====

class NumericalError(FracHamError):
    """数值计算失败"""

    exit_code = 3


class TailError(NumericalError):
    """远场尾部贡献无法被控制（渐近值未声明或超出容差）"""


class SingularityError(NumericalError):
    """在奇点处求值"""


class SolutionQualityError(NumericalError):
    """解收敛但不满足质量要求（如单调性）"""


class PreconditionViolation(NumericalError):
    """检查器的前置条件不成立"""


class ConvergenceError(NumericalError):
    """
    Solver Non-convergence

    求解器在最大迭代次数内未收敛，携带统计信息与部分结果
    """

    exit_code = 4

    def __init__(self, message: str, stats: Optional[Any] = None, partial: Optional[Any] = None):
        super().__init__(message)
        self.stats = stats
        self.partial = partial


class PartialResultsError(NumericalError):
    """
    Partial Results

    多步运行（延拓、批处理）中途失败，携带已完成的结果
    """

    exit_code = 5

    def __init__(self, message: str, partial: Optional[Any] = None, cause: Optional[BaseException] = None):
        super().__init__(message)
        self.partial = partial
        self.cause = cause


__all__ = [
    "FracHamError",
    "ConfigError",
    "DomainError",
    "NonlinearityError",
    "NumericalError",
    "TailError",
    "SingularityError",
    "SolutionQualityError",
    "PreconditionViolation",
    "ConvergenceError",
    "PartialResultsError",
]
