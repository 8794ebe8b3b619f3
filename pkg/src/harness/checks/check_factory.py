"""
校验工厂模块
使用工厂模式按名称创建校验实例
"""

import logging
from typing import Dict, Iterable, List, Type

from ...core.exceptions import UnsupportedCheck
from .base import BaseCheck, CheckName
from .freenergy import (
    AsymptoticFeCheck,
    CovEnergyEntropyCheck,
    HelmholtzCheck,
    MapFeDensityCheck,
    MapFeVarianceCheck,
    MlFeDensityCheck,
    MlFeVarianceCheck,
)
from .laws import MapConditionalGaussianKsCheck, StudentTMarginalKsCheck
from .mse import MseCfCheck, MseDeviationDecayCheck, MseMeanCheck, MseVarCheck
from .noise import NoiseCfCheck, NoiseMeanCheck, NoiseMgfCheck, NoiseTailBoundCheck, NoiseVarCheck
from .sigma import SigmaFixedPointBetaCheck, SigmaRecursionSelfAveragingCheck, SigmaUnbiasedBeta1Check
from .spectrum import MpKsCheck

logger = logging.getLogger(__name__)


class CheckFactory:
    """校验工厂类"""

    # 校验类映射，顺序即 "all" 的执行顺序
    _check_classes: Dict[CheckName, Type[BaseCheck]] = {
        CheckName.NOISE_MEAN: NoiseMeanCheck,
        CheckName.NOISE_VAR: NoiseVarCheck,
        CheckName.NOISE_MGF: NoiseMgfCheck,
        CheckName.NOISE_CF: NoiseCfCheck,
        CheckName.NOISE_TAIL_BOUND: NoiseTailBoundCheck,
        CheckName.STUDENT_T_MARGINAL_KS: StudentTMarginalKsCheck,
        CheckName.MAP_CONDITIONAL_GAUSSIAN_KS: MapConditionalGaussianKsCheck,
        CheckName.MSE_MEAN: MseMeanCheck,
        CheckName.MSE_VAR: MseVarCheck,
        CheckName.MSE_CF: MseCfCheck,
        CheckName.MSE_DEVIATION_DECAY: MseDeviationDecayCheck,
        CheckName.HELMHOLTZ: HelmholtzCheck,
        CheckName.COV_E_S_ZERO: CovEnergyEntropyCheck,
        CheckName.ML_FE_DENSITY: MlFeDensityCheck,
        CheckName.ML_FE_VARIANCE: MlFeVarianceCheck,
        CheckName.MAP_FE_DENSITY: MapFeDensityCheck,
        CheckName.MAP_FE_VARIANCE: MapFeVarianceCheck,
        CheckName.ASYMPTOTIC_FE: AsymptoticFeCheck,
        CheckName.SIGMA_FIXED_POINT_BETA: SigmaFixedPointBetaCheck,
        CheckName.SIGMA_UNBIASED_BETA1: SigmaUnbiasedBeta1Check,
        CheckName.SIGMA_RECURSION_SELF_AVERAGING: SigmaRecursionSelfAveragingCheck,
        CheckName.MP_KS: MpKsCheck,
    }

    @classmethod
    def create(cls, check_name: CheckName) -> BaseCheck:
        """
        创建校验实例

        Args:
            check_name: 校验名称

        Returns:
            BaseCheck: 校验实例

        Raises:
            UnsupportedCheck: 未注册的校验
        """
        if check_name not in cls._check_classes:
            available = ', '.join(n.value for n in cls._check_classes)
            raise UnsupportedCheck(f"不支持的校验: {check_name}。可用的校验: {available}")
        return cls._check_classes[check_name]()

    @classmethod
    def create_from_string(cls, name: str) -> BaseCheck:
        """
        从字符串创建校验实例

        Args:
            name: 校验名称字符串（如 "noise-mean"）

        Raises:
            UnsupportedCheck: 无效的校验名称
        """
        name = name.strip()
        for check_name in CheckName:
            if check_name.value.lower() == name.lower():
                return cls.create(check_name)

        available = ', '.join(n.value for n in cls._check_classes)
        raise UnsupportedCheck(f"无效的校验名称: {name}。可用的校验: {available}")

    @classmethod
    def create_many(cls, names: Iterable[str]) -> List[BaseCheck]:
        """按名称列表创建，"all" 展开为全部已注册校验，重复名称只保留第一次"""
        checks: List[BaseCheck] = []
        seen = set()
        for name in names:
            if name.strip().lower() == "all":
                expanded = [cls.create(n) for n in cls._check_classes]
            else:
                expanded = [cls.create_from_string(name)]
            for check in expanded:
                if check.check_name not in seen:
                    seen.add(check.check_name)
                    checks.append(check)
        return checks

    @classmethod
    def get_available_checks(cls) -> List[CheckName]:
        """
        获取可用的校验列表

        Returns:
            list: 已注册的校验名称
        """
        return list(cls._check_classes.keys())

    @classmethod
    def is_available(cls, name: str) -> bool:
        """
        检查校验是否已注册

        Args:
            name: 校验名称字符串

        Returns:
            bool: 是否可用
        """
        return any(n.value.lower() == name.strip().lower() for n in cls._check_classes)
