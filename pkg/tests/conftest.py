"""
Pytest配置
"""
import logging
import math
import shutil
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

# 添加项目根目录到Python路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from kg_wavetrains.core.grid import PeriodicGrid  # noqa: E402
from kg_wavetrains.core.potential import builtin  # noqa: E402
from kg_wavetrains.core.solver import SolveConfig  # noqa: E402
from kg_wavetrains.utils.logger import ROOT_LOGGER  # noqa: E402


def harmonic_omega2(k: float, c: float = 1.0) -> float:
    """线性色散关系 ω² = (4sin²(πk) + c) / (4π²)"""
    return (4.0 * math.sin(math.pi * k) ** 2 + c) / (4.0 * math.pi ** 2)


def random_smooth_profile(rng: np.random.Generator, grid: PeriodicGrid, modes: int = 5) -> np.ndarray:
    """低频三角多项式，零均值"""
    phi = grid.nodes
    X = np.zeros(grid.n)
    for m in range(1, modes + 1):
        a, b = rng.normal(size=2) / m ** 2
        X += a * np.cos(2 * np.pi * m * phi) + b * np.sin(2 * np.pi * m * phi)
    return X


@pytest.fixture
def temp_dir():
    """创建临时目录"""
    temp = tempfile.mkdtemp()
    yield Path(temp)
    shutil.rmtree(temp)


@pytest.fixture
def rng():
    """固定种子的随机数发生器"""
    return np.random.default_rng(20240601)


@pytest.fixture
def harmonic_config():
    """harmonic(c=1)、k=1/4、γ=1、N=512 的求解配置"""
    return SolveConfig(gamma=1.0, k=0.25, n=512, potential=builtin("harmonic", c=1.0))


@pytest.fixture(autouse=True)
def reset_logging():
    """每个测试后移除包日志处理器（CliRunner 会替换 stdout）"""
    yield
    logger = logging.getLogger(ROOT_LOGGER)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
