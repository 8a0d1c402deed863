"""
KG Wave Trains - Klein-Gordon 晶格周期行波的变分求解器
"""

__version__ = "0.1.0"

from .core.potential import Potential, parse_potential
from .core.solver import SolveConfig, WaveTrain, solve
from .core.sweep import SweepRunner
from .exceptions import WaveTrainError

__all__ = [
    "Potential",
    "parse_potential",
    "SolveConfig",
    "WaveTrain",
    "solve",
    "SweepRunner",
    "WaveTrainError",
]
