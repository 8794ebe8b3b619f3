"""
异常模块
统一定义各模块抛出的异常类型

InputError 表示调用方给出的输入超出定义域（CLI 退出码 2），
NumericalError 表示问题本身良定但数值计算失败（CLI 退出码 3）。
"""

from typing import Optional


class RidgeAnalysisError(Exception):
    """所有异常的基类"""


class InputError(RidgeAnalysisError, ValueError):
    """输入超出操作的定义域"""


class NumericalError(RidgeAnalysisError, ArithmeticError):
    """数值计算失败"""


# ---- 输入类 ----

class ShapeError(InputError):
    """维度不匹配"""


class DataError(InputError):
    """数据包含非有限值"""


class DomainError(InputError):
    """参数超出定义域"""


class TemperatureOutOfRange(InputError):
    """有限β时要求 β > ζ"""


class DegreesOfFreedomError(InputError):
    """自由度不足（d > N 或 N ≤ d+1）"""


class MGFPole(InputError):
    """矩母函数在 α ≥ 1/σ0² 处发散"""


class DeltaOutOfRange(InputError):
    """偏差 δ 超出界的有效范围"""


class AlphaOutOfRange(InputError):
    """速率函数的 α 超出有效范围"""


class SpectrumDomainError(InputError):
    """谱密度在被积函数无定义处有质量"""


class IntegrandError(InputError):
    """被积函数在支撑集上取非有限值"""


class EnsembleTooSmall(InputError):
    """系综样本数不足"""


class PriorError(InputError):
    """噪声先验不支持所请求的运算"""


class ConfigError(InputError):
    """实验配置无效"""


class UnsupportedCheck(InputError):
    """校验项不存在或与当前配置不兼容"""


# ---- 数值类 ----

class CovarianceNotPD(NumericalError):
    """总体协方差矩阵非正定（Cholesky 失败）"""


class SingularSystem(NumericalError):
    """线性方程组奇异"""


class NoConvergence(NumericalError):
    """不动点迭代在最大步数内未收敛"""

    def __init__(
        self,
        message: str,
        last_iterate: Optional[float] = None,
        defect: Optional[float] = None,
        iterations: int = 0
    ):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.defect = defect
        self.iterations = iterations


class QuadratureError(NumericalError):
    """数值积分未收敛"""


class OptimizerNoBracket(NumericalError):
    """搜索区间内目标函数单调，无法构造极小值括号"""


class EmptySupport(NumericalError):
    """网格上的密度全部下溢"""


class TrialFailure(RidgeAnalysisError):
    """单次试验失败且超出失败预算"""

    def __init__(self, message: str, trial_index: int, cause: Optional[BaseException] = None):
        super().__init__(message)
        self.trial_index = trial_index
        self.cause = cause
