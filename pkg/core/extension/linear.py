"""
FracHam Sparse Linear Solver

对称正定子块 A_II 的求解：规模不超过 direct_limit 时用稀疏 LU，否则用 Jacobi 预条件 CG
"""

import numpy as np
import scipy.sparse as sp
import structlog
from scipy.sparse.linalg import LinearOperator, cg, splu

from models.errors import ConvergenceError
from models.mesh import LinearSystemStats

logger = structlog.get_logger(__name__)


class InteriorSolver:
    """
    Interior Solver

    分解一次、多次求解；CG 路径按列迭代并累计迭代次数
    """

    def __init__(self, A: sp.spmatrix, direct_limit: int = 1_000_000, rtol: float = 1e-12, maxiter: int = 20000):
        self.A = sp.csc_matrix(A)
        self.size = self.A.shape[0]
        self.rtol = rtol
        self.maxiter = maxiter
        self.iterations = 0
        self.direct = self.size <= direct_limit
        if self.size == 0:
            self._lu = None
        elif self.direct:
            self._lu = splu(self.A)
        else:
            inv_diag = 1.0 / self.A.diagonal()
            self._precond = LinearOperator(self.A.shape, matvec=lambda x: inv_diag * x)
            logger.info(f"未知数 {self.size} 超过直接分解上限，使用 CG")

    @property
    def name(self) -> str:
        return "splu" if self.direct else "cg"

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """求解 A x = rhs，rhs 可以是一维或二维（按列）"""
        rhs = np.asarray(rhs, dtype=np.float64)
        if self.size == 0:
            return np.zeros_like(rhs)
        if self.direct:
            return self._lu.solve(rhs)
        if rhs.ndim == 1:
            return self._solve_cg(rhs)
        return np.column_stack([self._solve_cg(rhs[:, k]) for k in range(rhs.shape[1])])

    def _solve_cg(self, b: np.ndarray) -> np.ndarray:
        count = [0]

        def _callback(_xk):
            count[0] += 1

        x, info = cg(self.A, b, rtol=self.rtol, atol=0.0, maxiter=self.maxiter, M=self._precond, callback=_callback)
        self.iterations += count[0]
        if info != 0:
            residual = float(np.linalg.norm(self.A @ x - b))
            stats = LinearSystemStats(
                iterations=self.iterations, residual_norm=residual, converged=False, solver="cg"
            )
            raise ConvergenceError(f"CG 未收敛 (info={info})，残差 {residual:.3e}", stats=stats)
        return x


__all__ = [
    "InteriorSolver",
]
