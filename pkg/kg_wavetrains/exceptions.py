"""
异常定义 - 所有可预期的错误都从 WaveTrainError 派生
"""


class WaveTrainError(Exception):
    """基础异常"""


class GridAlignmentError(WaveTrainError, ValueError):
    """波数不是 1/N 的整数倍，或剖面长度与网格不符"""


class ProfileError(WaveTrainError, ValueError):
    """剖面数据不满足前置条件（非有限值、均值非零、不在锥内）"""


class DegenerateProfileError(ProfileError):
    """改进算子在 X = 0 或 Z = 0 处无定义"""


class PotentialError(WaveTrainError, ValueError):
    """未知势函数或非法参数"""


class BracketError(WaveTrainError, RuntimeError):
    """标量求根无法找到变号区间"""


class ChainError(WaveTrainError, ValueError):
    """晶格模拟参数不兼容"""


class ResultFileError(WaveTrainError, OSError):
    """结果文件缺失或损坏"""


class OracleError(WaveTrainError, ValueError):
    """验证预言机的前置条件不满足（如 k ≠ 0 时做时间映射检查）"""
