"""
参数扫描 - 在 (γ, k) 网格上批量求解波列

各参数点相互独立，可串行执行，也可交给进程池并行执行；
结果按 (γ, k) 排序后统一写出，与执行顺序无关。
"""
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime
from enum import Enum
from itertools import groupby
from pathlib import Path
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Tuple, Union

from ..config.settings import Settings
from ..exceptions import OracleError, WaveTrainError
from ..utils.file_manager import SUMMARY_COLUMNS, ResultStore
from ..utils.logger import get_logger
from .potential import Potential
from .solver import InitialKind, SolveConfig, WaveTrain, solve
from .validate import areas_increasing, build_trace, check_nesting, trace_area


class SweepState(Enum):
    """扫描状态"""
    IDLE = "idle"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


class SweepPoint(NamedTuple):
    """一个参数点"""
    gamma: float
    k: float

    @property
    def dirname(self) -> str:
        return f"g{self.gamma:g}_k{self.k:g}"


class SweepResult(NamedTuple):
    """一个参数点的结果；失败时 wave_train 为 None"""
    point: SweepPoint
    wave_train: Optional[WaveTrain]
    outdir: Path
    error: Optional[str] = None


def _solve_point(cfg: SolveConfig) -> Tuple[WaveTrain, str, str]:
    """进程池工作函数（必须在模块顶层以便 pickle）"""
    started_at = datetime.now().isoformat()
    train = solve(cfg)
    return train, started_at, datetime.now().isoformat()


def _run_safely(cfg: SolveConfig) -> Union[Tuple[WaveTrain, str, str], WaveTrainError]:
    try:
        return _solve_point(cfg)
    except WaveTrainError as e:
        return e


class SweepRunner:
    """参数扫描执行器

    负责：
    1. 为每个参数点构造 SolveConfig
    2. 串行或用进程池求解
    3. 把每个点写入 <out>/g<γ>_k<k>/
    4. 汇总 summary.csv
    """

    def __init__(
        self,
        out_dir: Union[str, Path],
        settings: Settings,
        potential: Potential,
        n: int,
        initial: InitialKind = "cosine",
    ):
        self.out_dir = Path(out_dir)
        self.settings = settings
        self.potential = potential
        self.n = n
        self.initial = initial
        self.logger = get_logger("sweep")

        self.state = SweepState.IDLE
        self.failures = 0

    def config_for(self, point: SweepPoint) -> SolveConfig:
        """参数点对应的求解配置"""
        return SolveConfig(
            gamma=point.gamma,
            k=point.k,
            n=self.n,
            potential=self.potential,
            tol_fixedpoint=self.settings.tol_fixedpoint,
            tol_xhat=self.settings.tol_xhat,
            max_iter=self.settings.max_iter,
            xhat_method=self.settings.xhat_method,
            initial=self.initial,
            unimodal_slack=self.settings.unimodal_slack,
        )

    def run(self, points: Iterable[Tuple[float, float]]) -> List[SweepResult]:
        """求解全部参数点

        Args:
            points: (γ, k) 序列，重复点只算一次

        Returns:
            按 (γ, k) 排序的结果列表

        Raises:
            WaveTrainError: 参数点列表为空，或某个点的参数本身非法
        """
        ordered = [SweepPoint(float(g), float(k)) for g, k in sorted(set(points))]
        if not ordered:
            raise WaveTrainError("sweep needs at least one (gamma, k) point")
        # 参数非法时在启动任何求解之前失败
        configs = [self.config_for(p) for p in ordered]

        self.state = SweepState.RUNNING
        self.failures = 0
        workers = min(self.settings.workers, len(configs))
        self.logger.info(f"Starting sweep over {len(configs)} point(s) with {workers} worker(s)")

        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(_run_safely, configs))
        else:
            outcomes = [_run_safely(cfg) for cfg in configs]

        results = [self._record(point, outcome) for point, outcome in zip(ordered, outcomes)]

        self.state = SweepState.FAILED if self.failures else SweepState.COMPLETED
        self.logger.info(
            f"Sweep finished: {len(results) - self.failures}/{len(results)} point(s) solved"
        )
        return results

    def _record(
        self,
        point: SweepPoint,
        outcome: Union[Tuple[WaveTrain, str, str], WaveTrainError],
    ) -> SweepResult:
        outdir = self.out_dir / point.dirname
        if isinstance(outcome, WaveTrainError):
            self.failures += 1
            self.logger.error(f"Point gamma={point.gamma:g} k={point.k:g} failed: {outcome}")
            return SweepResult(point, None, outdir, str(outcome))

        train, started_at, finished_at = outcome
        ResultStore(outdir, self.settings).write_wave_train(train, {
            "command": "sweep",
            "tol_fixedpoint": self.settings.tol_fixedpoint,
            "max_iter": self.settings.max_iter,
            "started_at": started_at,
            "finished_at": finished_at,
        })
        log = self.logger.info if train.converged else self.logger.warning
        log(
            f"Point gamma={point.gamma:g} k={point.k:g}: {train.status.value} "
            f"omega2={train.omega2:.10g} iterations={train.iterations}"
        )
        return SweepResult(point, train, outdir)

    def nesting(self, results: List[SweepResult]) -> bool:
        """同一 k 下相邻 γ 的轨迹是否严格嵌套

        Raises:
            OracleError: 没有任何 k 拥有至少两条轨迹
        """
        verdicts = [check_nesting(group) for group in self._trace_groups(results)]
        if not verdicts:
            raise OracleError("nesting check needs at least two solved gammas at a common k")
        return all(verdicts)

    def areas_increasing(self, results: List[SweepResult]) -> bool:
        """同一 k 下轨迹面积随 γ 严格递增"""
        return all(areas_increasing(group) for group in self._trace_groups(results))

    def _trace_groups(self, results: List[SweepResult]) -> List[list]:
        traces = [build_trace(r.wave_train) for r in results if r.wave_train is not None]
        traces.sort(key=lambda t: (t.k, t.gamma))
        groups = [list(g) for _, g in groupby(traces, key=lambda t: t.k)]
        return [g for g in groups if len(g) >= 2]

    def write_summary(
        self,
        results: List[SweepResult],
        nesting: Optional[bool] = None,
    ) -> Path:
        """写出 summary.csv；失败的参数点不出现在汇总中"""
        columns = list(SUMMARY_COLUMNS) + ["area"]
        if nesting is not None:
            columns += ["nesting", "areas_increasing"]
            increasing = self.areas_increasing(results)

        rows: List[Dict[str, Any]] = []
        for result in results:
            w = result.wave_train
            if w is None:
                continue
            row: Dict[str, Any] = {
                "gamma": w.gamma,
                "k": w.k.k,
                "omega2": w.omega2,
                "residual_sup": w.residual_sup,
                "iterations": w.iterations,
                "converged": w.converged,
                "in_cone": w.in_cone,
                "area": trace_area(build_trace(w)),
            }
            if nesting is not None:
                row["nesting"] = nesting
                row["areas_increasing"] = increasing
            rows.append(row)
        return ResultStore(self.out_dir, self.settings).write_summary(rows, columns)

    def get_status(self) -> Dict[str, Any]:
        """获取扫描状态"""
        return {
            "state": self.state.value,
            "failures": self.failures,
            "out_dir": str(self.out_dir),
        }
