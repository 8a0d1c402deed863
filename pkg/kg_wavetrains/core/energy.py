"""
能量泛函 - 势能 P_k、其梯度、动能因子 Γ 以及标量内层最小化 x̂(X)
"""
from typing import Callable, Literal

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, Field

from ..exceptions import BracketError, ProfileError
from ..utils.logger import get_logger
from .grid import Profile, WaveNumber, as_profile, derivative, integrate, laplacian_k, nabla_k
from .potential import Potential

logger = get_logger("energy")

XhatMethod = Literal["newton", "gradient_flow"]

# 变号区间的最大扩张次数
MAX_WIDENINGS = 60


class EnergyBreakdown(BaseModel):
    """势能分解 P_k(Y) = 耦合能 + 在位能，以及动能因子 Γ(Y)"""

    coupling: float = Field(..., description="½‖∇_k Y‖²")
    onsite: float = Field(..., description="∫Ψ(Y)")
    total: float = Field(..., description="coupling + onsite")
    kinetic_factor: float = Field(..., description="Γ(Y) = ½∫Y'²")

    def lagrangian(self, omega2: float) -> float:
        """作用量密度 L = ω²Γ - P_k"""
        return omega2 * self.kinetic_factor - self.total


def kinetic_gamma(X: ArrayLike) -> float:
    """Γ(X) = ½∫X'²（中心差分导数）"""
    dX = derivative(X)
    return 0.5 * integrate(dX * dX)


def coupling_energy(X: ArrayLike, k: WaveNumber) -> float:
    """½‖∇_k X‖² = -½⟨Δ_k X, X⟩，对奇数 p 同样可用"""
    arr = as_profile(X, k.n)
    value = -0.5 * integrate(laplacian_k(arr, k) * arr)
    # 二次型半正定，负值只可能来自舍入
    return max(value, 0.0)


def coupling_energy_nabla(X: ArrayLike, k: WaveNumber) -> float:
    """直接用 ∇_k 计算的耦合能，仅 p 为偶数时可用，作交叉验证"""
    grad = nabla_k(X, k)
    return 0.5 * integrate(grad * grad)


def potential_energy(x: float, X: ArrayLike, k: WaveNumber, P: Potential) -> EnergyBreakdown:
    """势能 P_k(x + X)

    Args:
        x: 常数分量
        X: 零均值分量
        k: 波数
        P: 在位势
    """
    arr = as_profile(X, k.n)
    coupling = coupling_energy(arr, k)
    onsite = max(integrate(P.psi(x + arr)), 0.0)
    return EnergyBreakdown(
        coupling=coupling,
        onsite=onsite,
        total=coupling + onsite,
        kinetic_factor=kinetic_gamma(arr),
    )


def gradient(x: float, X: ArrayLike, k: WaveNumber, P: Potential) -> Profile:
    """变分导数 ∂_Y P_k[Y] = -Δ_k Y + Ψ'(Y)，Y = x + X"""
    arr = as_profile(X, k.n)
    return -laplacian_k(arr, k) + P.dpsi(x + arr)


def condition_function(X: ArrayLike, P: Potential) -> Callable[[float], float]:
    """ψ'(x) = h·Σ Ψ'(x + X[j])，关于 x 严格单调递增"""
    arr = as_profile(X)

    def psi_prime(x: float) -> float:
        return float(np.mean(P.dpsi(x + arr)))

    return psi_prime


def solve_xhat(
    X: ArrayLike,
    P: Potential,
    tol: float = 1e-12,
    method: XhatMethod = "newton",
    x0: float = 0.0,
    max_steps: int = 200,
) -> float:
    """求解 ∫Ψ'(x̂ + X) = 0

    默认使用带保护的 Newton 法（失败时退回二分）；method="gradient_flow" 时
    对 x ↦ ΣΨ(x + X[j]) 做显式梯度流，步长 1/M。

    Args:
        X: 剖面
        P: 在位势
        tol: 条件函数的容差，实际阈值为 tol·(1 + M·sup|X|)
        method: "newton" 或 "gradient_flow"
        x0: 初始猜测（如上一迭代的 x̂）
        max_steps: Newton 的最大步数；梯度流使用其 100 倍

    Raises:
        ProfileError: 剖面含非有限值
        BracketError: 无法找到变号区间或不收敛
    """
    arr = as_profile(X)
    if not np.all(np.isfinite(arr)):
        raise ProfileError("profile contains non-finite samples")
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")

    sup = float(np.max(np.abs(arr), initial=0.0))
    psi_prime = condition_function(arr, P)

    def threshold(x: float) -> float:
        return tol * (1.0 + float(np.max(P.ddpsi(x + arr))) * sup)

    if method == "gradient_flow":
        return _gradient_flow(arr, P, psi_prime, threshold, x0, 100 * max_steps)
    if method != "newton":
        raise ValueError(f"unknown x-hat method '{method}'")

    lo, hi = -sup - 1.0, sup + 1.0
    f_lo, f_hi = psi_prime(lo), psi_prime(hi)
    for _ in range(MAX_WIDENINGS):
        if f_lo <= 0.0 <= f_hi:
            break
        width = hi - lo
        if f_lo > 0.0:
            lo -= width
            f_lo = psi_prime(lo)
        if f_hi < 0.0:
            hi += width
            f_hi = psi_prime(hi)
    else:
        raise BracketError(f"could not bracket the root of psi' (last bracket [{lo}, {hi}])")

    x = float(np.clip(x0, lo, hi))
    for _ in range(max_steps):
        f = psi_prime(x)
        if abs(f) <= threshold(x):
            return x
        if f > 0.0:
            hi = x
        else:
            lo = x
        slope = float(np.mean(P.ddpsi(x + arr)))
        x_new = x - f / slope if slope > 0.0 else 0.5 * (lo + hi)
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if hi - lo <= 4.0 * np.finfo(float).eps * (1.0 + abs(x_new)):
            logger.debug(f"x-hat bracket collapsed at {x_new!r} with psi'={f:.3e}")
            return x_new
        x = x_new
    raise BracketError(f"x-hat Newton iteration did not converge in {max_steps} steps")


def _gradient_flow(
    arr: Profile,
    P: Potential,
    psi_prime: Callable[[float], float],
    threshold: Callable[[float], float],
    x0: float,
    max_steps: int,
) -> float:
    x = float(x0)
    for _ in range(max_steps):
        f = psi_prime(x)
        if abs(f) <= threshold(x):
            return x
        step = float(np.max(P.ddpsi(x + arr)))
        x -= f / step
    raise BracketError(f"x-hat gradient flow did not converge in {max_steps} steps")
