"""
FracHam Core Package

提供分数阶 Laplace 算子、延拓问题、剖面求解与哈密顿量检查的核心模块
"""
