"""
日志系统
"""
import logging
import sys
from pathlib import Path
from typing import Optional, Union

ROOT_LOGGER = "kg_wavetrains"


def get_logger(name: str = ROOT_LOGGER) -> logging.Logger:
    """获取日志记录器

    所有记录器都挂在 ``kg_wavetrains`` 命名空间下，处理器只在根记录器上配置一次。

    Args:
        name: 日志记录器名称（如 "solver"）

    Returns:
        日志记录器
    """
    if name == ROOT_LOGGER or name.startswith(ROOT_LOGGER + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


def configure_logging(
    level: Union[int, str] = logging.INFO,
    log_file: Optional[Path] = None
) -> logging.Logger:
    """配置包级日志

    Args:
        level: 日志级别
        log_file: 日志文件路径（可选）

    Returns:
        配置好的根日志记录器
    """
    logger = logging.getLogger(ROOT_LOGGER)
    logger.setLevel(level)
    logger.propagate = False

    # 避免重复添加handler；已有的控制台处理器跟随当前 stdout
    consoles = [h for h in logger.handlers if getattr(h, "_kg_console", False)]
    for handler in consoles:
        handler.setStream(sys.stdout)  # type: ignore[attr-defined]
    if not consoles:
        console_handler = logging.StreamHandler(sys.stdout)
        console_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        ))
        console_handler._kg_console = True  # type: ignore[attr-defined]
        logger.addHandler(console_handler)

    for handler in logger.handlers:
        handler.setLevel(level)

    # 文件处理器（如果指定）
    if log_file:
        log_file = Path(log_file)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(level)
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        ))
        logger.addHandler(file_handler)

    return logger
