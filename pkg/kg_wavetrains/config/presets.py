"""
实验预设 - 三组数值实验的参数
"""
from typing import Dict, List, Tuple
from pydantic import BaseModel, Field, field_validator

from ..core.potential import Potential, parse_potential


class ExperimentPreset(BaseModel):
    """一组数值实验"""

    name: str = Field(..., description="预设名称")
    description: str = Field(default="", description="说明")
    gammas: List[float] = Field(..., min_length=1, description="约束水平列表")
    ks: List[float] = Field(..., min_length=1, description="波数列表")
    potential: str = Field(..., description="势函数规格字符串")
    n: int = Field(default=800, description="网格节点数")
    check_nesting: bool = Field(default=False, description="是否做轨迹嵌套诊断")

    @field_validator("gammas")
    @classmethod
    def validate_gammas(cls, v):
        """γ 必须为正"""
        if any(g <= 0 for g in v):
            raise ValueError("all gamma values must be positive")
        return v

    @field_validator("potential")
    @classmethod
    def validate_potential(cls, v):
        """提前解析势函数规格"""
        parse_potential(v)
        return v

    def build_potential(self) -> Potential:
        return parse_potential(self.potential)

    def points(self) -> List[Tuple[float, float]]:
        """全部 (γ, k) 参数点，按 (γ, k) 排序"""
        return sorted((g, k) for g in self.gammas for k in self.ks)


PRESETS: Dict[str, ExperimentPreset] = {
    "ex1": ExperimentPreset(
        name="ex1",
        description="gamma=10, k=0.1, psi''(x)=exp(-x)",
        gammas=[10.0],
        ks=[0.1],
        potential="exp_decay",
    ),
    "ex2": ExperimentPreset(
        name="ex2",
        description="gamma=50, k in {0.1, 0.3, 0.5}, psi''(x)=1+x^2",
        gammas=[50.0],
        ks=[0.1, 0.3, 0.5],
        potential="quartic",
    ),
    "ex3": ExperimentPreset(
        name="ex3",
        description="gamma in {0.1, 3, 12, 30, 60, 100}, k=0.1, psi''(x)=exp(-max(x,0)^2)",
        gammas=[0.1, 3.0, 12.0, 30.0, 60.0, 100.0],
        ks=[0.1],
        potential="saturating",
        check_nesting=True,
    ),
}


def get_preset(name: str) -> ExperimentPreset:
    """按名称取预设"""
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset '{name}', expected one of {', '.join(PRESETS)}") from None
