"""
在位势测试
"""
import math
import pickle

import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from kg_wavetrains.core.potential import BUILTIN_NAMES, Potential, builtin, parse_potential
from kg_wavetrains.exceptions import PotentialError


@pytest.fixture(params=BUILTIN_NAMES)
def potential(request):
    """全部内置势"""
    return builtin(request.param)


class TestBuiltinPotentials:
    """内置势测试"""

    def test_normalisation(self, potential):
        """测试 Ψ(0) = Ψ'(0) = 0"""
        assert float(potential.psi(0.0)) == 0.0
        assert float(potential.dpsi(0.0)) == 0.0

    def test_derivatives_consistent(self, potential):
        """测试 Ψ' 与 Ψ'' 与差商一致"""
        x = np.linspace(-2.0, 2.0, 41)
        eps = 1e-5
        dpsi_fd = (potential.psi(x + eps) - potential.psi(x - eps)) / (2 * eps)
        ddpsi_fd = (potential.dpsi(x + eps) - potential.dpsi(x - eps)) / (2 * eps)
        assert_allclose(potential.dpsi(x), dpsi_fd, atol=1e-8)
        assert_allclose(potential.ddpsi(x), ddpsi_fd, atol=1e-7)

    def test_convex(self, potential):
        """测试 Ψ'' > 0"""
        assert np.all(potential.ddpsi(np.linspace(-3.0, 3.0, 101)) > 0.0)

    def test_closed_forms(self):
        """测试各势的 Ψ''"""
        x = np.linspace(-1.5, 1.5, 13)
        assert_allclose(builtin("harmonic", c=2.5).ddpsi(x), 2.5)
        assert_allclose(builtin("exp_decay").ddpsi(x), np.exp(-x))
        assert_allclose(builtin("quartic").ddpsi(x), 1.0 + x ** 2)
        assert_allclose(builtin("saturating").ddpsi(x), np.exp(-np.maximum(x, 0.0) ** 2))

    def test_saturating_tail(self):
        """测试 saturating 的 Ψ' 有界，趋于 √π/2"""
        P = builtin("saturating")
        assert float(P.dpsi(10.0)) == pytest.approx(math.sqrt(math.pi) / 2)

    def test_small_argument_precision(self):
        """测试 exp_decay 在小 x 处保留精度"""
        P = builtin("exp_decay")
        assert float(P.psi(1e-8)) == pytest.approx(0.5e-16, rel=1e-6)

    def test_scalar_and_array(self, potential):
        """测试标量和数组输入"""
        assert np.shape(potential.psi(0.3)) == ()
        assert potential.psi(np.zeros((3,))).shape == (3,)


class TestBounds:
    """Ψ'' 界测试"""

    def test_quartic(self):
        """测试 quartic 在 [-1, 2] 上的界"""
        m, M = builtin("quartic").bounds_on(-1.0, 2.0)
        assert m == pytest.approx(1.0)
        assert M == pytest.approx(5.0)

    def test_exp_decay(self):
        """测试 exp_decay 在 [-1, 1] 上的界"""
        m, M = builtin("exp_decay").bounds_on(1.0, -1.0)
        assert m == pytest.approx(math.exp(-1.0))
        assert M == pytest.approx(math.e)

    def test_non_finite(self):
        """测试无界区间"""
        with pytest.raises(PotentialError):
            builtin("harmonic").bounds_on(-np.inf, 1.0)


class TestPotentialLabel:
    """CLI 字符串测试"""

    def test_parse(self):
        """测试解析"""
        P = parse_potential("harmonic:c=4")
        assert P.name == "harmonic"
        assert P.c == 4.0
        assert parse_potential(" quartic ").name == "quartic"

    def test_label_round_trip(self):
        """测试 label 可以被重新解析"""
        P = builtin("harmonic", c=0.3)
        assert parse_potential(P.label) == P
        assert builtin("quartic").label == "quartic"

    def test_unknown_name(self):
        """测试未知名称"""
        with pytest.raises(PotentialError, match="unknown potential"):
            parse_potential("cubic")

    @pytest.mark.parametrize("text", ["harmonic:c=-1", "harmonic:c=0", "harmonic:c", "harmonic:c=x",
                                      "quartic:d=1"])
    def test_invalid_parameters(self, text):
        """测试非法参数"""
        with pytest.raises(PotentialError):
            parse_potential(text)

    def test_direct_construction(self):
        """测试直接构造时的校验"""
        with pytest.raises(ValidationError):
            Potential(name="harmonic", c=-2.0)
        with pytest.raises(ValidationError):
            Potential(name="cubic")

    def test_picklable(self):
        """测试可以送入进程池"""
        P = builtin("saturating")
        clone = pickle.loads(pickle.dumps(P))
        assert clone == P
        assert float(clone.psi(0.7)) == float(P.psi(0.7))
