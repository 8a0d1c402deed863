"""
全局配置管理
"""
from pathlib import Path
from typing import Literal, Optional
from pydantic import BaseModel, Field
import json


class Settings(BaseModel):
    """全局配置设置"""

    # 迭代配置
    tol_fixedpoint: float = Field(default=1e-10, gt=0, description="不动点容差（相对 √(2γ)）")
    tol_xhat: float = Field(default=1e-12, gt=0, description="x̂ 条件函数容差")
    max_iter: int = Field(default=5000, ge=1, description="最大迭代次数")
    xhat_method: Literal["newton", "gradient_flow"] = Field(default="newton", description="x̂ 求解方法")
    unimodal_slack: Optional[float] = Field(default=None, description="锥判定容差，None 为 1e-8·(1+sup)")

    # 验证配置
    quad_n: int = Field(default=256, ge=1, description="时间映射求积节点数")
    chain_particles: int = Field(default=40, ge=2, description="晶格模拟粒子数")
    residual_tol: float = Field(default=1e-3, gt=0, description="残差上确界阈值")
    k0_tol: float = Field(default=1e-3, gt=0, description="k=0 能量变化与周期失配阈值")
    chain_deviation_tol: float = Field(default=1e-2, gt=0, description="晶格偏差阈值（相对振幅）")
    chain_drift_tol: float = Field(default=1e-3, gt=0, description="晶格能量漂移阈值")
    chain_linear_deviation_tol: float = Field(default=1e-3, gt=0, description="harmonic 势的晶格偏差阈值（相对振幅）")
    chain_linear_drift_tol: float = Field(default=1e-6, gt=0, description="harmonic 势的晶格能量漂移阈值")

    # 扫描配置
    workers: int = Field(default=1, ge=1, description="并行进程数")

    # 输出文件
    profile_file: str = Field(default="profile.csv")
    trace_file: str = Field(default="trace.csv")
    meta_file: str = Field(default="meta.json")
    summary_file: str = Field(default="summary.csv")

    @classmethod
    def load(cls, config_path: Optional[Path] = None) -> "Settings":
        """从文件加载配置"""
        if config_path and config_path.exists():
            with open(config_path, 'r', encoding='utf-8') as f:
                data = json.load(f)
                return cls(**data)
        return cls()

    def save(self, config_path: Path):
        """保存配置到文件"""
        with open(config_path, 'w', encoding='utf-8') as f:
            json.dump(self.model_dump(mode='json'), f, indent=2, ensure_ascii=False)
