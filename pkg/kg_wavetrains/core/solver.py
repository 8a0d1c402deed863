"""
求解器 - 改进算子 T_{k,γ} 及其不动点迭代

一次改进：
1. x̂ = x̂(X)
2. Z = -Δ_k X + Ψ'(x̂ + X)
3. U = -IIZ（两次梯形累积积分）
4. ω² = ‖U'‖₂ / √(2γ)
5. X_new = U / ω²

迭代在 H1 半范数下相邻迭代差 ≤ tol·√(2γ) 时停止；达到 max_iter 时返回未收敛状态。
"""
import math
from enum import Enum
from typing import Iterator, List, Literal, NamedTuple, Optional, Union

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..exceptions import DegenerateProfileError, ProfileError
from ..utils.logger import get_logger
from .energy import EnergyBreakdown, XhatMethod, gradient, kinetic_gamma, potential_energy, solve_xhat
from .grid import (
    PeriodicGrid,
    Profile,
    WaveNumber,
    as_profile,
    cumulative,
    derivative,
    is_unimodal_even,
    laplacian_k,
    norms,
    second_difference,
)
from .potential import Potential

logger = get_logger("solver")

InitialKind = Literal["cosine", "vonmises"]

# vonmises 初始剖面的集中参数
VONMISES_KAPPA = 2.0


class SolveStatus(str, Enum):
    """求解状态"""
    CONVERGED = "converged"
    MAX_ITER = "max_iter"


class SolveConfig(BaseModel):
    """一次求解的全部参数"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    gamma: float = Field(..., gt=0, description="约束水平 ½‖X'‖² = γ")
    k: float = Field(..., description="波数，必须是 1/N 的整数倍")
    n: int = Field(..., description="网格节点数")
    potential: Potential
    tol_fixedpoint: float = Field(default=1e-10, gt=0, description="相邻迭代 H1 距离容差（相对 √(2γ)）")
    tol_xhat: float = Field(default=1e-12, gt=0, description="x̂ 条件函数容差")
    max_iter: int = Field(default=5000, ge=1, description="最大迭代次数")
    xhat_method: XhatMethod = Field(default="newton", description="x̂ 求解方法")
    initial: Union[InitialKind, np.ndarray] = Field(default="cosine", description="初始剖面")
    unimodal_slack: Optional[float] = Field(default=None, description="锥判定容差，None 为相对默认值")

    @field_validator("gamma", "k")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError(f"parameter must be finite, got {v}")
        return v

    @model_validator(mode="after")
    def _check_grid(self) -> "SolveConfig":
        grid = PeriodicGrid(n=self.n)
        grid.wave_number(self.k)
        if isinstance(self.initial, np.ndarray) and self.initial.shape != (self.n,):
            raise ValueError(
                f"initial profile has shape {self.initial.shape}, expected ({self.n},)"
            )
        return self

    @property
    def grid(self) -> PeriodicGrid:
        return PeriodicGrid(n=self.n)

    @property
    def wave(self) -> WaveNumber:
        return WaveNumber.from_k(self.k, self.n)


class Improvement(NamedTuple):
    """一次改进的结果"""
    x_new: Profile
    omega2: float
    xhat: float
    energy: EnergyBreakdown
    omega2_integral: float


class IterationRecord(NamedTuple):
    """迭代器的单步输出"""
    index: int
    X: Profile
    step: Improvement
    distance: float


class WaveTrain(BaseModel):
    """波列解 Y = x̂ + X 及诊断量"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    gamma: float
    k: WaveNumber
    potential: Potential
    X: np.ndarray
    xhat: float
    omega2: float = Field(..., gt=0)
    residual_sup: float
    energy: EnergyBreakdown
    iterations: int
    in_cone: bool
    gamma_actual: float
    status: SolveStatus = SolveStatus.CONVERGED
    energy_history: List[float] = Field(default_factory=list)
    ascent_violations: int = 0

    @property
    def n(self) -> int:
        return int(self.X.size)

    @property
    def grid(self) -> PeriodicGrid:
        return PeriodicGrid(n=self.n)

    @property
    def converged(self) -> bool:
        return self.status is SolveStatus.CONVERGED

    @property
    def omega(self) -> float:
        return math.sqrt(self.omega2)

    @property
    def Y(self) -> Profile:
        return self.xhat + self.X

    @property
    def velocity(self) -> Profile:
        """速度剖面 V = -ωX'"""
        return -self.omega * derivative(self.X)


def initial_profile(grid: PeriodicGrid, gamma: float, kind: InitialKind = "cosine") -> Profile:
    """锥 C 内的初始剖面

    - cosine:   X₀ = √γ/π·cos(2πφ)
    - vonmises: -X₀'' ∝ exp(κ cos 2πφ) 去均值，两次积分后缩放到 ∂B_γ
    """
    phi = grid.nodes
    if kind == "cosine":
        return math.sqrt(gamma) / math.pi * np.cos(2.0 * math.pi * phi)
    if kind == "vonmises":
        bump = np.exp(VONMISES_KAPPA * np.cos(2.0 * math.pi * phi))
        profile = -cumulative(cumulative(bump - np.mean(bump)))
        return profile * math.sqrt(gamma / kinetic_gamma(profile))
    raise ValueError(f"unknown initial profile kind '{kind}'")


def in_cone(X: ArrayLike, slack: Optional[float] = None) -> bool:
    """是否属于锥 C：-X'' 偶且单峰"""
    return is_unimodal_even(-second_difference(X), slack)


def resolve_initial(cfg: SolveConfig) -> Profile:
    """取出并检查初始剖面：零均值、非零、属于锥 C

    Raises:
        ProfileError: 初始剖面不满足前置条件
    """
    if isinstance(cfg.initial, np.ndarray):
        X0 = as_profile(cfg.initial, cfg.n).copy()
    else:
        X0 = initial_profile(cfg.grid, cfg.gamma, cfg.initial)
    if not np.all(np.isfinite(X0)):
        raise ProfileError("initial profile contains non-finite samples")
    sup = float(np.max(np.abs(X0), initial=0.0))
    if sup == 0.0:
        raise DegenerateProfileError("initial profile is identically zero")
    if abs(float(np.mean(X0))) > 1e-10 * (1.0 + sup):
        raise ProfileError(f"initial profile must be mean-zero, got mean {np.mean(X0):.3e}")
    if not in_cone(X0, cfg.unimodal_slack):
        raise ProfileError("initial profile is not in the cone C (-X'' must be even and unimodal)")
    return X0


def improve(X: ArrayLike, cfg: SolveConfig, x0: float = 0.0) -> Improvement:
    """改进算子 T_{k,γ}[X]

    Args:
        X: 非零零均值剖面
        cfg: 求解参数
        x0: x̂ 的初始猜测

    Raises:
        DegenerateProfileError: X = 0 或 Z = 0
    """
    k = cfg.wave
    arr = as_profile(X, k.n)
    if not np.any(arr):
        raise DegenerateProfileError("improvement operator is undefined at X = 0")

    xhat = solve_xhat(arr, cfg.potential, cfg.tol_xhat, cfg.xhat_method, x0)
    Z = gradient(xhat, arr, k, cfg.potential)
    if not np.any(Z):
        raise DegenerateProfileError("energy gradient vanishes, improvement is undefined")

    U1 = cumulative(Z)
    U = -cumulative(U1)
    norm_dU = norms(U).h1semi
    if not norm_dU > 0.0 or not math.isfinite(norm_dU):
        raise DegenerateProfileError(f"degenerate double antiderivative (|U'| = {norm_dU})")

    root = math.sqrt(2.0 * cfg.gamma)
    omega2 = norm_dU / root
    return Improvement(
        x_new=U / omega2,
        omega2=omega2,
        xhat=xhat,
        energy=potential_energy(xhat, arr, k, cfg.potential),
        omega2_integral=norms(U1).l2 / root,
    )


def iterate(cfg: SolveConfig) -> Iterator[IterationRecord]:
    """逐步产生改进迭代，直到收敛或达到 max_iter"""
    X = resolve_initial(cfg)
    threshold = cfg.tol_fixedpoint * math.sqrt(2.0 * cfg.gamma)
    xhat = 0.0
    for index in range(1, cfg.max_iter + 1):
        step = improve(X, cfg, x0=xhat)
        distance = norms(step.x_new - X).h1semi
        X, xhat = step.x_new, step.xhat
        logger.debug(
            f"iter {index}: P={step.energy.total:.15g} omega2={step.omega2:.15g} "
            f"dist={distance:.3e}"
        )
        yield IterationRecord(index=index, X=X, step=step, distance=distance)
        if distance <= threshold:
            return


def ascent_violations(history: List[float], slack: float = 1e-10) -> List[int]:
    """能量单调上升被破坏的下标 i（P̂(X_{i+1}) < P̂(X_i) - slack·(1+|P̂(X_i)|)）"""
    return [
        i for i in range(len(history) - 1)
        if history[i + 1] < history[i] - slack * (1.0 + abs(history[i]))
    ]


def solve(cfg: SolveConfig) -> WaveTrain:
    """迭代改进算子直到不动点

    未收敛不抛异常，返回 status=MAX_ITER 的结果并携带最后一次迭代。
    """
    logger.info(
        f"Solving gamma={cfg.gamma:g} k={cfg.k:g} N={cfg.n} potential={cfg.potential.label}"
    )
    threshold = cfg.tol_fixedpoint * math.sqrt(2.0 * cfg.gamma)
    history: List[float] = []
    record: Optional[IterationRecord] = None
    for record in iterate(cfg):
        history.append(record.step.energy.total)
    assert record is not None  # max_iter >= 1

    status = SolveStatus.CONVERGED if record.distance <= threshold else SolveStatus.MAX_ITER
    X = record.X
    k = cfg.wave
    xhat = solve_xhat(X, cfg.potential, cfg.tol_xhat, cfg.xhat_method, record.step.xhat)
    history.append(potential_energy(xhat, X, k, cfg.potential).total)
    violations = ascent_violations(history)
    if violations:
        logger.debug(f"energy ascent violated at {len(violations)} step(s)")

    train = WaveTrain(
        gamma=cfg.gamma,
        k=k,
        potential=cfg.potential,
        X=X,
        xhat=xhat,
        omega2=record.step.omega2,
        residual_sup=0.0,
        energy=potential_energy(xhat, X, k, cfg.potential),
        iterations=record.index,
        in_cone=in_cone(X, cfg.unimodal_slack),
        gamma_actual=kinetic_gamma(X),
        status=status,
        energy_history=history,
        ascent_violations=len(violations),
    )
    train.residual_sup = float(np.max(np.abs(residual(train))))

    if train.converged:
        logger.info(
            f"Converged in {train.iterations} iterations: omega2={train.omega2:.10g} "
            f"residual={train.residual_sup:.3e}"
        )
    else:
        logger.warning(
            f"No convergence within {cfg.max_iter} iterations "
            f"(last distance {record.distance:.3e}, threshold {threshold:.3e})"
        )
    return train


def residual(w: WaveTrain) -> Profile:
    """波列方程残差 R = ω²X'' - Δ_k X + Ψ'(x̂ + X)，X'' 用中心二阶差分"""
    return (
        w.omega2 * second_difference(w.X)
        - laplacian_k(w.X, w.k)
        + w.potential.dpsi(w.xhat + w.X)
    )
