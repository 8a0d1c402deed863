"""
独立验证 - k = 0 时间映射、晶格直接模拟、相平面轨迹与嵌套诊断
"""
import math
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from ..exceptions import BracketError, ChainError, OracleError
from ..utils.logger import get_logger
from .grid import derivative, is_even, mirror
from .potential import Potential
from .solver import InitialKind, SolveConfig, WaveTrain, solve

logger = get_logger("validate")

# 几何判定的绝对容差
GEOMETRIC_EPS = 1e-12

# 转折点区间的最大倍增次数
MAX_DOUBLINGS = 200


class Trace(BaseModel):
    """相平面闭曲线 φ ↦ (X(φ), V(φ))"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    points: np.ndarray = Field(..., description="形状 (N, 2)，循环闭合")
    gamma: float
    k: float
    potential: str

    @property
    def X(self) -> NDArray[np.float64]:
        return self.points[:, 0]

    @property
    def V(self) -> NDArray[np.float64]:
        return self.points[:, 1]


class ChainState(BaseModel):
    """周期晶格状态（质量 1、线性近邻弹簧、无阻尼）"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    y: np.ndarray
    v: np.ndarray
    t: float = 0.0

    @property
    def J(self) -> int:
        return int(self.y.size)


class ChainReport(NamedTuple):
    """晶格模拟与行波假设的比较"""
    max_deviation: float
    energy_drift: float


class K0Report(BaseModel):
    """k = 0 振子检查"""
    energy_mean: float
    energy_variation: float = Field(..., description="(max E - min E) / |mean E|")
    period: float = Field(..., description="T(mean E)")
    period_mismatch: float = Field(..., description="|ω·T(E) - 1|")


# ---------------------------------------------------------------- 时间映射

def turning_points(E: float, P: Potential) -> Tuple[float, float]:
    """Ψ(y±) = E 的转折点 y- < 0 < y+

    Raises:
        BracketError: 无法在有限步内包住转折点
    """
    def bracket(direction: float) -> float:
        edge = direction
        for _ in range(MAX_DOUBLINGS):
            if float(P.psi(edge)) >= E:
                return edge
            edge *= 2.0
        raise BracketError(f"no turning point for E={E} in direction {direction:+g}")

    def level(y: float) -> float:
        return float(P.psi(y)) - E

    y_minus = brentq(level, bracket(-1.0), 0.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    y_plus = brentq(level, 0.0, bracket(1.0), xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return float(y_minus), float(y_plus)


def time_map(E: float, P: Potential, quad_n: int = 256) -> float:
    """振子 ÿ = -Ψ'(y) 在能量 E 处的周期 T(E) = √2∫dy/√(E-Ψ(y))

    代换 y = 中点 + 半宽·s 后用 Gauss-Chebyshev 求积吸收两端的平方根奇性。
    """
    if not E > 0:
        raise OracleError(f"time map needs positive energy, got {E}")
    if quad_n < 1:
        raise ValueError(f"quad_n must be positive, got {quad_n}")
    y_minus, y_plus = turning_points(E, P)
    mid, half = 0.5 * (y_plus + y_minus), 0.5 * (y_plus - y_minus)
    s = np.cos((2.0 * np.arange(1, quad_n + 1) - 1.0) * math.pi / (2.0 * quad_n))
    gap = np.maximum(E - P.psi(mid + half * s), np.finfo(float).tiny)
    weights = half * np.sqrt((1.0 - s * s) / gap)
    return float(math.sqrt(2.0) * math.pi / quad_n * np.sum(weights))


def check_k0(w: WaveTrain, P: Optional[Potential] = None, quad_n: int = 256) -> K0Report:
    """k = 0 时波列退化为振子 ω²Y'' = -Ψ'(Y)，能量 E = ½ω²Y'² + Ψ(Y) 守恒且 ω·T(E) = 1"""
    if w.k.p != 0:
        raise OracleError(f"oscillator check needs k = 0, got k={w.k.k}")
    P = P or w.potential
    energy = 0.5 * w.omega2 * derivative(w.X) ** 2 + P.psi(w.Y)
    mean = float(np.mean(energy))
    period = time_map(mean, P, quad_n)
    report = K0Report(
        energy_mean=mean,
        energy_variation=float((np.max(energy) - np.min(energy)) / abs(mean)),
        period=period,
        period_mismatch=abs(w.omega * period - 1.0),
    )
    logger.info(
        f"k=0 check: E={mean:.10g} variation={report.energy_variation:.3e} "
        f"|omega*T-1|={report.period_mismatch:.3e}"
    )
    return report


# ---------------------------------------------------------------- 晶格模拟

def wrap_phase(phi: NDArray[np.float64]) -> NDArray[np.float64]:
    """映射到 [-1/2, 1/2)"""
    return np.mod(phi + 0.5, 1.0) - 0.5


def profile_spline(w: WaveTrain) -> CubicSpline:
    """X 的周期三次样条插值"""
    grid = w.grid
    knots = np.append(grid.nodes, 0.5)
    values = np.append(w.X, w.X[0])
    return CubicSpline(knots, values, bc_type="periodic")


def chain_acceleration(y: NDArray[np.float64], P: Potential) -> NDArray[np.float64]:
    """ÿ_j = y_{j+1} + y_{j-1} - 2y_j - Ψ'(y_j)"""
    return np.roll(y, -1) + np.roll(y, 1) - 2.0 * y - P.dpsi(y)


def chain_energy(state: ChainState, P: Potential) -> float:
    """Σ(½v² + ½(y_{j+1} - y_j)² + Ψ(y_j))"""
    stretch = np.roll(state.y, -1) - state.y
    return float(np.sum(0.5 * state.v ** 2 + 0.5 * stretch ** 2 + P.psi(state.y)))


def verlet(
    state: ChainState,
    P: Potential,
    dt: float,
    steps: int,
    observer: Optional[Callable[[ChainState], None]] = None,
) -> ChainState:
    """速度 Verlet 积分

    Args:
        state: 初始状态（不会被修改）
        P: 在位势
        dt: 时间步长
        steps: 步数
        observer: 每步之后调用
    """
    y, v = state.y.copy(), state.v.copy()
    t = state.t
    acc = chain_acceleration(y, P)
    for step in range(1, steps + 1):
        v += 0.5 * dt * acc
        y += dt * v
        acc = chain_acceleration(y, P)
        v += 0.5 * dt * acc
        t = state.t + step * dt
        if observer is not None:
            observer(ChainState(y=y, v=v, t=t))
    return ChainState(y=y, v=v, t=t)


def max_stable_dt(w: WaveTrain) -> float:
    """时间步长上限 min(0.05/ω, 0.1/√(4 + M))，M 为剖面取值范围上 Ψ'' 的上界"""
    Y = w.Y
    spread = 0.1 * (1.0 + float(np.ptp(Y)))
    _, M = w.potential.bounds_on(float(np.min(Y)) - spread, float(np.max(Y)) + spread)
    return min(0.05 / w.omega, 0.1 / math.sqrt(4.0 + M))


def simulate_chain(
    w: WaveTrain,
    J: int,
    t_end: Optional[float] = None,
    dt: Optional[float] = None,
) -> ChainReport:
    """把波列放入 J 个粒子的周期晶格，直接积分并与 Y(kj - ωt) 比较

    Args:
        w: 波列
        J: 粒子数，k·J 必须为整数
        t_end: 积分时长，默认一个时间周期 1/ω
        dt: 步长，默认 max_stable_dt 的四分之一

    Raises:
        ChainError: (k, J) 不兼容或步长不稳定
    """
    k = w.k.k
    if J < 2 or abs(k * J - round(k * J)) > 1e-9:
        raise ChainError(f"chain length J={J} is incompatible with k={k} (k*J must be an integer)")
    dt_max = max_stable_dt(w)
    if dt is None:
        dt = 0.25 * dt_max
    if not 0 < dt <= dt_max:
        raise ChainError(f"time step dt={dt} exceeds the stability bound {dt_max:.4g}")
    if t_end is None:
        t_end = 1.0 / w.omega
    steps = max(1, int(math.ceil(t_end / dt)))
    dt = t_end / steps

    spline = profile_spline(w)
    slope = spline.derivative()
    sites = k * np.arange(J)
    omega = w.omega

    def travelling(t: float) -> NDArray[np.float64]:
        return w.xhat + spline(wrap_phase(sites - omega * t))

    start = ChainState(y=travelling(0.0), v=-omega * slope(wrap_phase(sites)))
    e0 = chain_energy(start, w.potential)
    worst = {"deviation": 0.0, "drift": 0.0}

    def observe(state: ChainState) -> None:
        worst["deviation"] = max(
            worst["deviation"], float(np.max(np.abs(state.y - travelling(state.t))))
        )
        worst["drift"] = max(worst["drift"], abs(chain_energy(state, w.potential) - e0))

    verlet(start, w.potential, dt, steps, observe)
    drift = worst["drift"] / abs(e0) if e0 != 0 else worst["drift"]
    logger.info(
        f"Chain J={J} steps={steps} dt={dt:.4g}: deviation={worst['deviation']:.3e} "
        f"drift={drift:.3e}"
    )
    return ChainReport(max_deviation=worst["deviation"], energy_drift=drift)


# ---------------------------------------------------------------- 轨迹

def build_trace(w: WaveTrain) -> Trace:
    """轨迹点 (X[j], V[j])，V = -ωX'"""
    return Trace(
        points=np.column_stack((w.X, w.velocity)),
        gamma=w.gamma,
        k=w.k.k,
        potential=w.potential.label,
    )


def trace_is_symmetric(trace: Trace, tol: Optional[float] = None) -> bool:
    """X 偶、V 奇，即轨迹关于 V -> -V 对称"""
    if tol is None:
        tol = 1e-8 * (1.0 + float(np.max(np.abs(trace.points))))
    odd_gap = np.abs(trace.V + mirror(trace.V))
    return is_even(trace.X, tol) and bool(np.all(odd_gap <= tol))


def trace_area(trace: Trace) -> float:
    """鞋带公式求闭曲线包围的面积"""
    x, y = trace.X, trace.V
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def areas_increasing(traces: Sequence[Trace]) -> bool:
    """按 γ 排序后面积严格递增"""
    areas = [trace_area(t) for t in sorted(traces, key=lambda t: t.gamma)]
    return all(b > a for a, b in zip(areas, areas[1:]))


def _strictly_inside(points: NDArray[np.float64], polygon: NDArray[np.float64], eps: float) -> bool:
    px, py = points[:, :1], points[:, 1:]
    x1, y1 = polygon[:, 0][None, :], polygon[:, 1][None, :]
    x2, y2 = np.roll(x1, -1, axis=1), np.roll(y1, -1, axis=1)

    # 奇偶射线法
    straddles = (y1 > py) != (y2 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
    crossings = np.sum(straddles & (px < x_cross), axis=1)
    if not np.all(crossings % 2 == 1):
        return False

    # 到边界的距离必须大于 eps
    ex, ey = x2 - x1, y2 - y1
    length2 = ex * ex + ey * ey
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.clip(np.where(length2 > 0, ((px - x1) * ex + (py - y1) * ey) / length2, 0.0), 0.0, 1.0)
    dist2 = (px - x1 - s * ex) ** 2 + (py - y1 - s * ey) ** 2
    return bool(np.min(dist2) > eps * eps)


def _segments_cross(a: NDArray[np.float64], b: NDArray[np.float64]) -> bool:
    a1, a2 = a[:, None, :], np.roll(a, -1, axis=0)[:, None, :]
    b1, b2 = b[None, :, :], np.roll(b, -1, axis=0)[None, :, :]

    def orient(p, q, r):  # type: ignore[no-untyped-def]
        return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - \
               (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])

    o1, o2 = orient(a1, a2, b1), orient(a1, a2, b2)
    o3, o4 = orient(b1, b2, a1), orient(b1, b2, a2)
    return bool(np.any((o1 * o2 < 0) & (o3 * o4 < 0)))


def check_nesting(traces: Sequence[Trace]) -> bool:
    """相邻 γ 的轨迹是否严格嵌套且互不相交

    Raises:
        OracleError: 少于两条轨迹或 k、势函数不一致
    """
    if len(traces) < 2:
        raise OracleError("nesting check needs at least two traces")
    if len({t.k for t in traces}) != 1 or len({t.potential for t in traces}) != 1:
        raise OracleError("nesting check needs traces with the same k and potential")

    ordered: List[Trace] = sorted(traces, key=lambda t: t.gamma)
    for inner, outer in zip(ordered, ordered[1:]):
        scale = 1.0 + float(np.max(np.abs(outer.points)))
        if not _strictly_inside(inner.points, outer.points, GEOMETRIC_EPS * scale):
            logger.info(f"Trace gamma={inner.gamma:g} is not strictly inside gamma={outer.gamma:g}")
            return False
        if _segments_cross(inner.points, outer.points):
            logger.info(f"Traces gamma={inner.gamma:g} and gamma={outer.gamma:g} intersect")
            return False
    return True


def initial_independence(
    cfg: SolveConfig,
    kinds: Sequence[InitialKind] = ("cosine", "vonmises"),
) -> float:
    """不同锥内初值求得剖面的最大上确界差（诊断量）"""
    profiles = [solve(cfg.model_copy(update={"initial": kind})).X for kind in kinds]
    return max(
        float(np.max(np.abs(a - b))) for i, a in enumerate(profiles) for b in profiles[i + 1:]
    ) if len(profiles) > 1 else 0.0
