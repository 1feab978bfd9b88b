"""
FracHam Models Package

提供 FracHam 的核心数据模型定义
"""

from .errors import *
from .base import *
from .mesh import *
from .profiles import *
from .hamiltonian import *
from .config import *

__all__ = [
    # Errors
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

    # Base models
    "OperatorMethod",
    "AsymptoteDecay",
    "CheckStatus",
    "SolverStrategy",
    "MeshGeometry",
    "SideCondition",
    "TopCondition",
    "frozen_array",
    "FracOrder",
    "KernelConstants",
    "GridFunction",
    "OperatorReport",
    "CheckReport",

    # Mesh models
    "HalfStripMesh",
    "BoundaryData",
    "HalfStripField",
    "LinearSystemStats",

    # Profile models
    "ScalarMap",
    "Nonlinearity",
    "LayerSolution",
    "RadialSolution",
    "RadialStatus",
    "RadialSolveResult",
    "ContinuationResult",
    "NecessaryConditionsReport",
    "ODELayerTable",

    # Hamiltonian models
    "HamiltonianProfile",
    "IdentityReport",
    "ModicaReport",
    "RadialHamiltonianReport",
    "SLimitReport",

    # Configuration
    "CommandName",
    "MeshConfig",
    "NonlinearityConfig",
    "ToleranceConfig",
    "SolverConfig",
    "EvalConfig",
    "PropertySuiteConfig",
    "RunConfig",
    "RuntimeSettings",
    "apply_override",
]
