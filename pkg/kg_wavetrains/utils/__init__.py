"""
工具模块 - 日志与结果文件

file_manager 依赖 core，需显式导入：from kg_wavetrains.utils.file_manager import ResultStore
"""

from .logger import configure_logging, get_logger

__all__ = ["configure_logging", "get_logger"]
