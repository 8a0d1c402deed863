"""
核心模块 - 网格、势函数、能量、求解器、验证与参数扫描
"""

from .grid import PeriodicGrid, WaveNumber
from .potential import Potential, builtin, parse_potential
from .energy import EnergyBreakdown, solve_xhat
from .solver import SolveConfig, SolveStatus, WaveTrain, improve, iterate, residual, solve
from .validate import check_k0, check_nesting, simulate_chain, time_map
from .sweep import SweepRunner, SweepState

__all__ = [
    "PeriodicGrid",
    "WaveNumber",
    "Potential",
    "builtin",
    "parse_potential",
    "EnergyBreakdown",
    "solve_xhat",
    "SolveConfig",
    "SolveStatus",
    "WaveTrain",
    "improve",
    "iterate",
    "residual",
    "solve",
    "check_k0",
    "check_nesting",
    "simulate_chain",
    "time_map",
    "SweepRunner",
    "SweepState",
]
