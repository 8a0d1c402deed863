"""
配置模块 - 运行参数与预设实验
"""

from .settings import Settings
from .presets import ExperimentPreset, PRESETS, get_preset

__all__ = ["Settings", "ExperimentPreset", "PRESETS", "get_preset"]
