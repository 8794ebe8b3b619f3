"""
可复现随机数

每个试验由 (master_seed, stream_index) 确定；试验内部按用途再拆分子流，
底层使用计数器型生成器 Philox，跨平台结果一致。
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from ..core.exceptions import DomainError

UINT64_MAX = 2 ** 64 - 1


class StreamPurpose(IntEnum):
    """试验内子流的用途"""
    DESIGN = 0
    THETA = 1
    NOISE = 2
    AUX = 3


@dataclass(frozen=True)
class SeedSpec:
    """一次试验的种子：主种子与流编号"""
    master_seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        for name in ("master_seed", "stream_index"):
            value = getattr(self, name)
            if not 0 <= value <= UINT64_MAX:
                raise DomainError(f"{name} 必须是 64 位无符号整数: {value}")

    def generator(self, purpose: StreamPurpose = StreamPurpose.AUX) -> np.random.Generator:
        """返回该试验指定用途的独立生成器"""
        sequence = np.random.SeedSequence(
            self.master_seed, spawn_key=(self.stream_index, int(purpose))
        )
        return np.random.Generator(np.random.Philox(sequence))

    def child(self, offset: int) -> "SeedSpec":
        """同一主种子下的另一条流"""
        return SeedSpec(self.master_seed, self.stream_index + offset)
