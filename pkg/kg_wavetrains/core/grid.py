"""
周期网格 - 单位胞 [-1/2, 1/2) 上的均匀离散化及全部离散微积分算子

剖面（Profile）用长度为 N 的 float64 数组表示，samples[j] 是 φ_j = -1/2 + j/N 处的值。
φ = 0 对应节点 N/2，偶对称配对为 j <-> (N - j) mod N。
"""
from typing import Callable, NamedTuple, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.ndimage import convolve1d

from ..exceptions import GridAlignmentError, ProfileError

Profile = NDArray[np.float64]

# k·N 与整数的允许偏差（吸收 0.1*800 之类的浮点误差）
ALIGNMENT_SLACK = 1e-9


class WaveNumber(BaseModel):
    """网格对齐的波数 k = p/N"""

    model_config = ConfigDict(frozen=True)

    k: float = Field(..., ge=0.0, le=0.5, description="折叠到 [0, 1/2] 的波数")
    p: int = Field(..., ge=0, description="平移节点数 p = k·N")
    n: int = Field(..., ge=1, description="网格节点数")

    @model_validator(mode="after")
    def _check_alignment(self) -> "WaveNumber":
        if abs(self.k * self.n - self.p) > ALIGNMENT_SLACK:
            raise ValueError(f"k={self.k} with N={self.n} does not give p={self.p}")
        return self

    @classmethod
    def from_k(cls, k: float, n: int) -> "WaveNumber":
        """由实数波数构造，先按 Δ_k 关于 k 的偶性折叠到 [0, 1/2]

        Raises:
            GridAlignmentError: k·N 不是整数
        """
        if not np.isfinite(k):
            raise GridAlignmentError(f"wave number must be finite, got {k}")
        folded = abs(float(k)) % 1.0
        if folded > 0.5:
            folded = 1.0 - folded
        p_real = folded * n
        p = int(round(p_real))
        if abs(p_real - p) > ALIGNMENT_SLACK * max(1.0, n):
            raise GridAlignmentError(
                f"k={k} is not a multiple of 1/N (k*N = {k * n!r} must be an integer, N={n})"
            )
        return cls(k=p / n, p=p, n=n)

    @property
    def half_shift(self) -> int:
        """半步平移 p/2，仅在 p 为偶数时存在"""
        if self.p % 2:
            raise GridAlignmentError(
                f"half shift k/2 needs an even shift count, got p={self.p} (k={self.k}, N={self.n})"
            )
        return self.p // 2


class PeriodicGrid(BaseModel):
    """单位胞 Λ = [-1/2, 1/2) 上的 N 点均匀周期网格"""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=8, description="节点数，偶数且 >= 8")

    @field_validator("n")
    @classmethod
    def _even(cls, v: int) -> int:
        if v % 2:
            raise ValueError(f"grid size N must be even, got {v}")
        return v

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def nodes(self) -> Profile:
        return -0.5 + np.arange(self.n) * self.h

    @property
    def center(self) -> int:
        """φ = 0 所在的节点下标"""
        return self.n // 2

    def wave_number(self, k: float) -> WaveNumber:
        return WaveNumber.from_k(k, self.n)

    def sample(self, func: Callable[[Profile], ArrayLike]) -> Profile:
        """在节点上采样一个 1-周期函数"""
        return as_profile(func(self.nodes), self.n)


class ProfileNorms(NamedTuple):
    """剖面范数"""
    l2: float
    sup: float
    h1semi: float


def as_profile(X: ArrayLike, n: Optional[int] = None) -> Profile:
    """转换为一维 float64 数组并检查长度"""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 1:
        raise ProfileError(f"profile must be one-dimensional, got shape {arr.shape}")
    if n is not None and arr.size != n:
        raise GridAlignmentError(f"profile has {arr.size} samples, grid has N={n}")
    return arr


def _with_wave(X: ArrayLike, k: WaveNumber) -> Profile:
    return as_profile(X, k.n)


def shift(X: ArrayLike, s: int) -> Profile:
    """精确周期平移：result[j] = X[(j+s) mod N]"""
    return np.roll(as_profile(X), -int(s))


def laplacian_k(X: ArrayLike, k: WaveNumber) -> Profile:
    """离散 Laplace 算子 (Δ_k X)(φ) = X(φ+k) + X(φ-k) - 2X(φ)"""
    arr = _with_wave(X, k)
    if k.p == 0:
        return np.zeros_like(arr)
    return shift(arr, k.p) + shift(arr, -k.p) - 2.0 * arr


def nabla_k(X: ArrayLike, k: WaveNumber) -> Profile:
    """中心差分 (∇_k X)(φ) = X(φ+k/2) - X(φ-k/2)，要求 p 为偶数"""
    arr = _with_wave(X, k)
    q = k.half_shift
    return shift(arr, q) - shift(arr, -q)


def averaging_k(X: ArrayLike, k: WaveNumber) -> Profile:
    """滑动窗口积分 (A_k X)(φ) = ∫_{φ-k/2}^{φ+k/2} X，梯形公式"""
    arr = _with_wave(X, k)
    q = k.half_shift
    if q == 0:
        return np.zeros_like(arr)
    weights = np.ones(2 * q + 1)
    weights[0] = weights[-1] = 0.5
    return convolve1d(arr, weights / k.n, mode="wrap")


def derivative(X: ArrayLike) -> Profile:
    """中心差分导数 (X[j+1] - X[j-1]) / 2h"""
    arr = as_profile(X)
    return (shift(arr, 1) - shift(arr, -1)) * (0.5 * arr.size)


def second_difference(X: ArrayLike) -> Profile:
    """中心二阶差分 (X[j+1] - 2X[j] + X[j-1]) / h²"""
    arr = as_profile(X)
    return (shift(arr, 1) - 2.0 * arr + shift(arr, -1)) * float(arr.size) ** 2


def integrate(X: ArrayLike) -> float:
    """Riemann 和 h·Σ X[j]（周期均匀网格上即梯形公式）"""
    arr = as_profile(X)
    return float(np.sum(arr)) / arr.size


def cumulative(X: ArrayLike, tol: float = 1e-10) -> Profile:
    """从 φ = 0 起的梯形累积积分，再投影到零均值

    Raises:
        ProfileError: 输入均值不为零（原函数不周期）
    """
    arr = as_profile(X)
    n = arr.size
    mean = float(np.mean(arr))
    scale = 1.0 + float(np.max(np.abs(arr), initial=0.0))
    if abs(mean) > tol * scale:
        raise ProfileError(
            f"cumulative integral needs a mean-zero profile, got mean {mean:.3e}"
        )
    centered = arr - mean
    c = n // 2
    rolled = np.roll(centered, -c)
    increments = 0.5 / n * (rolled + np.roll(rolled, -1))
    partial = np.concatenate(([0.0], np.cumsum(increments[:-1])))
    out = np.roll(partial, c)
    return out - np.mean(out)


def norms(X: ArrayLike) -> ProfileNorms:
    """L2 范数、上确界范数和 H1 半范数"""
    arr = as_profile(X)
    return ProfileNorms(
        l2=float(np.sqrt(integrate(arr * arr))),
        sup=float(np.max(np.abs(arr), initial=0.0)),
        h1semi=float(np.sqrt(integrate(derivative(arr) ** 2))),
    )


def mirror(X: ArrayLike) -> Profile:
    """关于 φ = 0 的镜像：result[j] = X[(N - j) mod N]"""
    arr = as_profile(X)
    return arr[(-np.arange(arr.size)) % arr.size]


def default_slack(X: ArrayLike) -> float:
    arr = as_profile(X)
    return 1e-8 * (1.0 + float(np.max(np.abs(arr), initial=0.0)))


def is_even(X: ArrayLike, tol: Optional[float] = None) -> bool:
    arr = as_profile(X)
    if tol is None:
        tol = default_slack(arr)
    return bool(np.all(np.abs(arr - mirror(arr)) <= tol))


def is_unimodal_even(X: ArrayLike, tol: Optional[float] = None) -> bool:
    """是否属于锥 U：偶函数且在 [0, 1/2] 上不增

    Args:
        X: 剖面
        tol: 容差，默认 1e-8·(1 + sup 范数)
    """
    arr = as_profile(X)
    if tol is None:
        tol = default_slack(arr)
    if tol < 0:
        raise ValueError(f"tolerance must be non-negative, got {tol}")
    if not is_even(arr, tol):
        return False
    c = arr.size // 2
    right_half = np.concatenate((arr[c:], arr[:1]))
    return bool(np.all(np.diff(right_half) <= tol))
