"""
结果文件管理 - profile.csv / trace.csv / meta.json / summary.csv 的读写
"""
import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from pydantic import ValidationError

from ..config.settings import Settings
from ..core.energy import EnergyBreakdown, kinetic_gamma
from ..core.grid import WaveNumber, derivative, second_difference
from ..core.potential import parse_potential
from ..core.solver import SolveStatus, WaveTrain
from ..exceptions import ResultFileError, WaveTrainError
from .logger import get_logger

PROFILE_HEADER = "phi,X,dX,ddX,V"
TRACE_HEADER = "X,V"
SUMMARY_COLUMNS = ["gamma", "k", "omega2", "residual_sup", "iterations", "converged", "in_cone"]

# 读回时派生列与重算值的相对容差
CONSISTENCY_RTOL = 1e-9


def format_number(value: float) -> str:
    """17 位有效数字"""
    return f"{value:.17g}"


def _format_cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format_number(float(value))
    return str(value)


def _json_value(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return json.dumps(bool(value))
    if isinstance(value, (float, np.floating)) and np.isfinite(value):
        return format_number(float(value))
    return json.dumps(value, ensure_ascii=False)


def meta_text(meta: Dict[str, Any]) -> str:
    """扁平 JSON 对象，浮点数写成 17 位有效数字"""
    items = [f"  {json.dumps(key, ensure_ascii=False)}: {_json_value(value)}" for key, value in meta.items()]
    return "{\n" + ",\n".join(items) + "\n}\n"


def meta_dict(w: WaveTrain) -> Dict[str, Any]:
    """meta.json 中与求解结果一一对应的键"""
    return {
        "gamma": w.gamma,
        "k": w.k.k,
        "N": w.n,
        "potential": w.potential.label,
        "omega2": w.omega2,
        "xhat": w.xhat,
        "residual_sup": w.residual_sup,
        "gamma_actual": w.gamma_actual,
        "iterations": w.iterations,
        "converged": w.converged,
        "in_cone": w.in_cone,
        "coupling": w.energy.coupling,
        "onsite": w.energy.onsite,
        "total": w.energy.total,
        "lagrangian": w.energy.lagrangian(w.omega2),
        "status": w.status.value,
        "ascent_violations": w.ascent_violations,
    }


class ResultStore:
    """一次求解的输出目录"""

    def __init__(self, root_path: Union[str, Path], settings: Optional[Settings] = None):
        self.root_path = Path(root_path)
        self.settings = settings or Settings()
        self.logger = get_logger("file_manager")

    @property
    def profile_path(self) -> Path:
        return self.root_path / self.settings.profile_file

    @property
    def trace_path(self) -> Path:
        return self.root_path / self.settings.trace_file

    @property
    def meta_path(self) -> Path:
        return self.root_path / self.settings.meta_file

    @property
    def summary_path(self) -> Path:
        return self.root_path / self.settings.summary_file

    def write_wave_train(
        self,
        w: WaveTrain,
        manifest: Optional[Dict[str, Any]] = None,
    ) -> Dict[str, Path]:
        """写出 profile.csv、trace.csv 和 meta.json

        Args:
            w: 波列
            manifest: 追加到 meta.json 的运行信息（命令、时间戳、容差等）

        Returns:
            文件路径字典
        """
        try:
            self.root_path.mkdir(parents=True, exist_ok=True)
            dX = derivative(w.X)
            V = -w.omega * dX
            columns = np.column_stack((w.grid.nodes, w.X, dX, second_difference(w.X), V))
            np.savetxt(self.profile_path, columns, fmt="%.17g", delimiter=",",
                       header=PROFILE_HEADER, comments="")
            np.savetxt(self.trace_path, np.column_stack((w.X, V)), fmt="%.17g", delimiter=",",
                       header=TRACE_HEADER, comments="")

            meta = meta_dict(w)
            meta.update(manifest or {})
            meta["profile_file"] = self.settings.profile_file
            meta["trace_file"] = self.settings.trace_file
            with open(self.meta_path, 'w', encoding='utf-8') as f:
                f.write(meta_text(meta))
        except OSError as e:
            raise ResultFileError(f"Failed to write results to {self.root_path}: {e}") from e

        self.logger.info(f"Results written: {self.root_path}")
        return {"profile": self.profile_path, "trace": self.trace_path, "meta": self.meta_path}

    def read_meta(self) -> Dict[str, Any]:
        """读取 meta.json"""
        try:
            with open(self.meta_path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ResultFileError(f"Failed to read {self.meta_path}: {e}") from e
        if not isinstance(data, dict):
            raise ResultFileError(f"{self.meta_path} is not a JSON object")
        return data

    def read_wave_train(self) -> WaveTrain:
        """读回波列并做完整性检查

        Raises:
            ResultFileError: 文件缺失、格式错误或数据不自洽
        """
        meta = self.read_meta()
        table = read_profile_table(self.profile_path)
        try:
            n = int(meta["N"])
            omega2 = float(meta["omega2"])
            w = WaveTrain(
                gamma=float(meta["gamma"]),
                k=WaveNumber.from_k(float(meta["k"]), n),
                potential=parse_potential(str(meta["potential"])),
                X=table[:, 1].copy(),
                xhat=float(meta["xhat"]),
                omega2=omega2,
                residual_sup=float(meta["residual_sup"]),
                energy=EnergyBreakdown(
                    coupling=float(meta["coupling"]),
                    onsite=float(meta["onsite"]),
                    total=float(meta["total"]),
                    kinetic_factor=float(meta["gamma_actual"]),
                ),
                iterations=int(meta["iterations"]),
                in_cone=bool(meta["in_cone"]),
                gamma_actual=float(meta["gamma_actual"]),
                status=SolveStatus(meta.get("status", "converged" if meta["converged"] else "max_iter")),
            )
        except (KeyError, TypeError, ValueError, ValidationError, WaveTrainError) as e:
            raise ResultFileError(f"Invalid metadata in {self.meta_path}: {e}") from e

        if table.shape[0] != n:
            raise ResultFileError(f"{self.profile_path} has {table.shape[0]} rows, meta says N={n}")
        self._check_consistency(w, table)
        self.logger.info(f"Loaded wave train from {self.root_path}")
        return w

    def _check_consistency(self, w: WaveTrain, table: np.ndarray) -> None:
        X = w.X
        dX = derivative(X)
        expected = {
            "phi": w.grid.nodes,
            "dX": dX,
            "ddX": second_difference(X),
            "V": -w.omega * dX,
        }
        for name, column in zip(("phi", "dX", "ddX", "V"), (0, 2, 3, 4)):
            reference = expected[name]
            scale = 1.0 + float(np.max(np.abs(reference)))
            if not np.allclose(table[:, column], reference, rtol=0.0, atol=CONSISTENCY_RTOL * scale):
                raise ResultFileError(f"column {name} in {self.profile_path} is inconsistent with X")
        if abs(kinetic_gamma(X) - w.gamma_actual) > CONSISTENCY_RTOL * (1.0 + w.gamma_actual):
            raise ResultFileError("gamma_actual in meta.json does not match the stored profile")

    def write_summary(self, rows: Sequence[Dict[str, Any]], columns: Optional[List[str]] = None) -> Path:
        """写出 summary.csv"""
        columns = columns or list(SUMMARY_COLUMNS)
        try:
            self.root_path.mkdir(parents=True, exist_ok=True)
            with open(self.summary_path, 'w', encoding='utf-8', newline='') as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(columns)
                for row in rows:
                    writer.writerow([_format_cell(row[c]) for c in columns])
        except OSError as e:
            raise ResultFileError(f"Failed to write {self.summary_path}: {e}") from e
        self.logger.info(f"Summary written: {self.summary_path}")
        return self.summary_path


def read_profile_table(path: Union[str, Path]) -> np.ndarray:
    """读取 profile.csv 为 (N, 5) 数组"""
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            header = f.readline().strip()
        if header != PROFILE_HEADER:
            raise ResultFileError(f"{path} has header '{header}', expected '{PROFILE_HEADER}'")
        table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except OSError as e:
        raise ResultFileError(f"Failed to read {path}: {e}") from e
    except ValueError as e:
        raise ResultFileError(f"Malformed numbers in {path}: {e}") from e
    if table.ndim != 2 or table.shape[1] != 5:
        raise ResultFileError(f"{path} must have 5 columns, got shape {table.shape}")
    if not np.all(np.isfinite(table)):
        raise ResultFileError(f"{path} contains non-finite values")
    return table


def read_initial_profile(path: Union[str, Path], n: int) -> np.ndarray:
    """从 profile.csv 取 X 列作为初始剖面"""
    table = read_profile_table(path)
    if table.shape[0] != n:
        raise ResultFileError(f"{path} has {table.shape[0]} samples, expected N={n}")
    return table[:, 1].copy()
