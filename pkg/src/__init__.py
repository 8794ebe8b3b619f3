"""
bayes-ridge-analyzer: 高维贝叶斯岭回归的精确有限样本分析与 Monte Carlo 校验
"""

__version__ = "0.1.0"
