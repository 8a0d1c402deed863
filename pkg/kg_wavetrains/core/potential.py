"""
在位势 Ψ - 一致凸、Ψ(0) = Ψ'(0) = 0，给出 Ψ、Ψ'、Ψ'' 的解析表达式

内置势：
- harmonic:   Ψ = c x²/2
- exp_decay:  Ψ'' = exp(-x)
- quartic:    Ψ'' = 1 + x²
- saturating: Ψ'' = exp(-max(x, 0)²)
"""
from typing import Callable, Dict, Literal, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import erf

from ..exceptions import PotentialError

PotentialName = Literal["harmonic", "exp_decay", "quartic", "saturating"]
Evaluator = Callable[[NDArray[np.float64], float], NDArray[np.float64]]

HALF_SQRT_PI = 0.5 * np.sqrt(np.pi)

# bounds_on 的采样点数
BOUNDS_SAMPLES = 1024


def _harmonic(x: NDArray[np.float64], c: float) -> NDArray[np.float64]:
    return 0.5 * c * x * x


def _harmonic_d(x: NDArray[np.float64], c: float) -> NDArray[np.float64]:
    return c * x


def _harmonic_dd(x: NDArray[np.float64], c: float) -> NDArray[np.float64]:
    return np.full_like(x, c)


def _exp_decay(x: NDArray[np.float64], c: float) -> NDArray[np.float64]:
    # x - 1 + e^{-x}，小 |x| 时用 expm1 保留精度
    return np.expm1(-x) + x


def _exp_decay_d(x: NDArray[np.float64], c: float) -> NDArray[np.float64]:
    return -np.expm1(-x)


def _exp_decay_dd(x: NDArray[np.float64], c: float) -> NDArray[np.float64]:
    return np.exp(-x)


def _quartic(x: NDArray[np.float64], c: float) -> NDArray[np.float64]:
    x2 = x * x
    return 0.5 * x2 + x2 * x2 / 12.0


def _quartic_d(x: NDArray[np.float64], c: float) -> NDArray[np.float64]:
    return x + x ** 3 / 3.0


def _quartic_dd(x: NDArray[np.float64], c: float) -> NDArray[np.float64]:
    return 1.0 + x * x


def _saturating(x: NDArray[np.float64], c: float) -> NDArray[np.float64]:
    pos = np.maximum(x, 0.0)
    right = HALF_SQRT_PI * pos * erf(pos) + 0.5 * np.expm1(-pos * pos)
    return np.where(x > 0.0, right, 0.5 * x * x)


def _saturating_d(x: NDArray[np.float64], c: float) -> NDArray[np.float64]:
    return np.where(x > 0.0, HALF_SQRT_PI * erf(np.maximum(x, 0.0)), x)


def _saturating_dd(x: NDArray[np.float64], c: float) -> NDArray[np.float64]:
    pos = np.maximum(x, 0.0)
    return np.exp(-pos * pos)


_REGISTRY: Dict[str, Tuple[Evaluator, Evaluator, Evaluator]] = {
    "harmonic": (_harmonic, _harmonic_d, _harmonic_dd),
    "exp_decay": (_exp_decay, _exp_decay_d, _exp_decay_dd),
    "quartic": (_quartic, _quartic_d, _quartic_dd),
    "saturating": (_saturating, _saturating_d, _saturating_dd),
}

BUILTIN_NAMES = tuple(_REGISTRY)


class Potential(BaseModel):
    """一致凸在位势

    只保存名称和参数，求值函数按名称查表，因此实例可以被 pickle 并送入进程池。
    """

    model_config = ConfigDict(frozen=True)

    name: PotentialName = Field(..., description="势函数名称")
    c: float = Field(default=1.0, description="harmonic 势的刚度，其余势忽略")

    @model_validator(mode="after")
    def _check_params(self) -> "Potential":
        if self.name == "harmonic" and not self.c > 0:
            raise ValueError(f"harmonic stiffness c must be positive, got {self.c}")
        return self

    @property
    def label(self) -> str:
        """CLI 字符串，如 "harmonic:c=1" 或 "quartic" """
        if self.name == "harmonic":
            return f"harmonic:c={self.c:.17g}"
        return self.name

    def psi(self, x: ArrayLike) -> NDArray[np.float64]:
        return _REGISTRY[self.name][0](np.asarray(x, dtype=np.float64), self.c)

    def dpsi(self, x: ArrayLike) -> NDArray[np.float64]:
        return _REGISTRY[self.name][1](np.asarray(x, dtype=np.float64), self.c)

    def ddpsi(self, x: ArrayLike) -> NDArray[np.float64]:
        return _REGISTRY[self.name][2](np.asarray(x, dtype=np.float64), self.c)

    def bounds_on(self, lo: float, hi: float) -> Tuple[float, float]:
        """闭区间 [lo, hi] 上 Ψ'' 的下界 m 和上界 M

        稠密采样加端点；区间包含 0 时也采样 0（内置势 Ψ'' 的极值只可能在端点或 0 处）。
        """
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise PotentialError(f"bounds need a finite interval, got [{lo}, {hi}]")
        if lo > hi:
            lo, hi = hi, lo
        samples = np.linspace(lo, hi, BOUNDS_SAMPLES)
        if lo < 0.0 < hi:
            samples = np.append(samples, 0.0)
        values = self.ddpsi(samples)
        return float(np.min(values)), float(np.max(values))


def builtin(name: str, **params: float) -> Potential:
    """按名称构造内置势

    Raises:
        PotentialError: 未知名称或 c <= 0
    """
    if name not in _REGISTRY:
        raise PotentialError(
            f"unknown potential '{name}', expected one of {', '.join(BUILTIN_NAMES)}"
        )
    unknown = set(params) - {"c"}
    if unknown:
        raise PotentialError(f"unknown parameter(s) for {name}: {', '.join(sorted(unknown))}")
    c = float(params.get("c", 1.0))
    if name == "harmonic" and not c > 0:
        raise PotentialError(f"harmonic stiffness c must be positive, got {c}")
    return Potential(name=name, c=c)  # type: ignore[arg-type]


def parse_potential(text: str) -> Potential:
    """解析 CLI 字符串 "name" 或 "name:key=value,..." """
    name, _, rest = text.strip().partition(":")
    params: Dict[str, float] = {}
    if rest:
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            if not sep:
                raise PotentialError(f"malformed potential parameter '{item}' in '{text}'")
            try:
                params[key.strip()] = float(value)
            except ValueError:
                raise PotentialError(f"parameter {key.strip()} is not a number: '{value}'") from None
    return builtin(name.strip(), **params)
