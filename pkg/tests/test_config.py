"""
配置与预设测试
"""
import pytest
from pydantic import ValidationError

from kg_wavetrains.config.presets import PRESETS, ExperimentPreset, get_preset
from kg_wavetrains.config.settings import Settings


class TestSettings:
    """设置测试"""

    def test_default_settings(self):
        """测试默认设置"""
        settings = Settings()

        assert settings.tol_fixedpoint == 1e-10
        assert settings.tol_xhat == 1e-12
        assert settings.max_iter == 5000
        assert settings.xhat_method == "newton"
        assert settings.quad_n == 256
        assert settings.chain_particles == 40
        assert settings.chain_deviation_tol == 1e-2
        assert settings.chain_drift_tol == 1e-3
        assert settings.chain_linear_deviation_tol == 1e-3
        assert settings.chain_linear_drift_tol == 1e-6
        assert settings.workers == 1
        assert settings.profile_file == "profile.csv"

    def test_save_and_load(self, temp_dir):
        """测试保存和加载设置"""
        config_file = temp_dir / "config.json"

        settings1 = Settings()
        settings1.max_iter = 200
        settings1.xhat_method = "gradient_flow"
        settings1.save(config_file)

        settings2 = Settings.load(config_file)
        assert settings2.max_iter == 200
        assert settings2.xhat_method == "gradient_flow"

    def test_load_missing(self, temp_dir):
        """测试文件不存在时使用默认值"""
        assert Settings.load(temp_dir / "missing.json") == Settings()
        assert Settings.load(None) == Settings()

    @pytest.mark.parametrize("field, value", [
        ("tol_fixedpoint", 0.0),
        ("max_iter", 0),
        ("xhat_method", "secant"),
        ("workers", 0),
    ])
    def test_invalid_values(self, field, value):
        """测试非法取值"""
        with pytest.raises(ValidationError):
            Settings(**{field: value})


class TestPresets:
    """预设实验测试"""

    def test_datasets(self):
        """测试三组实验参数"""
        assert get_preset("ex1").points() == [(10.0, 0.1)]
        assert get_preset("ex2").points() == [(50.0, 0.1), (50.0, 0.3), (50.0, 0.5)]
        assert [g for g, _ in get_preset("ex3").points()] == [0.1, 3.0, 12.0, 30.0, 60.0, 100.0]
        assert get_preset("ex3").check_nesting
        assert all(p.n == 800 for p in PRESETS.values())

    def test_potentials(self):
        """测试预设的势函数"""
        assert get_preset("ex1").build_potential().name == "exp_decay"
        assert get_preset("ex2").build_potential().name == "quartic"
        assert get_preset("ex3").build_potential().name == "saturating"

    def test_unknown(self):
        """测试未知预设"""
        with pytest.raises(KeyError, match="unknown preset"):
            get_preset("ex4")

    def test_validation(self):
        """测试预设校验"""
        with pytest.raises(ValidationError):
            ExperimentPreset(name="bad", gammas=[-1.0], ks=[0.1], potential="quartic")
        with pytest.raises(ValidationError):
            ExperimentPreset(name="bad", gammas=[1.0], ks=[0.1], potential="cubic")
        with pytest.raises(ValidationError):
            ExperimentPreset(name="bad", gammas=[], ks=[0.1], potential="quartic")
