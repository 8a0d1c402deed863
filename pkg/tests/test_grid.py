"""
周期网格与离散算子测试
"""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from kg_wavetrains.core.grid import (
    PeriodicGrid,
    WaveNumber,
    averaging_k,
    cumulative,
    derivative,
    integrate,
    is_even,
    is_unimodal_even,
    laplacian_k,
    mirror,
    nabla_k,
    norms,
    second_difference,
    shift,
)
from kg_wavetrains.exceptions import GridAlignmentError, ProfileError
from tests.conftest import random_smooth_profile


def cosine(grid: PeriodicGrid, m: int = 1) -> np.ndarray:
    return np.cos(2 * math.pi * m * grid.nodes)


def sine(grid: PeriodicGrid, m: int = 1) -> np.ndarray:
    return np.sin(2 * math.pi * m * grid.nodes)


def refinement_order(errors: list) -> float:
    """相邻两次网格加倍的误差比给出的经验阶"""
    return math.log2(errors[0] / errors[1])


class TestPeriodicGrid:
    """网格测试"""

    def test_nodes(self):
        """测试节点位置与中心下标"""
        grid = PeriodicGrid(n=8)
        assert_allclose(grid.nodes, -0.5 + np.arange(8) / 8)
        assert grid.nodes[grid.center] == 0.0
        assert grid.h == pytest.approx(0.125)

    @pytest.mark.parametrize("n", [6, 9, 0])
    def test_invalid_size(self, n):
        """测试非法节点数"""
        with pytest.raises(ValidationError):
            PeriodicGrid(n=n)

    def test_sample(self):
        """测试采样"""
        grid = PeriodicGrid(n=16)
        assert_allclose(grid.sample(lambda phi: phi ** 2), grid.nodes ** 2)


class TestWaveNumber:
    """波数对齐测试"""

    def test_aligned(self):
        """测试 0.1·800 的浮点误差被吸收"""
        k = WaveNumber.from_k(0.1, 800)
        assert k.p == 80
        assert k.k == pytest.approx(0.1)

    def test_misaligned(self):
        """测试 k·N 非整数"""
        with pytest.raises(GridAlignmentError, match="multiple of 1/N"):
            WaveNumber.from_k(0.1234, 800)

    @pytest.mark.parametrize("k, folded", [(0.9, 0.1), (-0.3, 0.3), (1.25, 0.25), (0.5, 0.5)])
    def test_folding(self, k, folded):
        """测试折叠到 [0, 1/2]"""
        assert WaveNumber.from_k(k, 40).k == pytest.approx(folded)

    def test_half_shift(self):
        """测试半步平移只在 p 为偶数时存在"""
        assert WaveNumber.from_k(0.25, 16).half_shift == 2
        with pytest.raises(GridAlignmentError):
            WaveNumber.from_k(0.125, 8).half_shift

    def test_grid_wave_number(self):
        """测试网格给出的波数"""
        grid = PeriodicGrid(n=800)
        assert grid.wave_number(0.3).p == 240


class TestShift:
    """平移测试"""

    def test_constant(self):
        """测试常数不变"""
        assert_allclose(shift(np.full(16, 2.5), 5), 2.5)

    def test_full_period(self, rng):
        """测试平移 N 个节点"""
        X = rng.normal(size=32)
        assert np.array_equal(shift(X, 32), X)

    def test_quarter_period(self):
        """测试 cos 平移四分之一周期得到 -sin"""
        grid = PeriodicGrid(n=64)
        assert_allclose(shift(cosine(grid), 16), -sine(grid), atol=1e-14)

    def test_index_convention(self):
        """测试 result[j] = X[(j+s) mod N]"""
        X = np.arange(8.0)
        assert_allclose(shift(X, 3), [3, 4, 5, 6, 7, 0, 1, 2])


class TestLaplacian:
    """离散 Laplace 算子测试"""

    def test_constant(self):
        """测试常数被消去"""
        k = WaveNumber.from_k(0.1, 80)
        assert_allclose(laplacian_k(np.full(80, 3.0), k), 0.0, atol=1e-14)

    @pytest.mark.parametrize("kv", [0.1, 0.25, 0.5])
    def test_eigenvector(self, kv):
        """测试 cos 是特征向量，特征值 -4sin²(πk)"""
        grid = PeriodicGrid(n=200)
        X = cosine(grid)
        expected = -4 * math.sin(math.pi * kv) ** 2 * X
        assert_allclose(laplacian_k(X, grid.wave_number(kv)), expected, atol=1e-13)

    def test_hand_evaluation(self):
        """测试 N=4 手算示例"""
        k = WaveNumber.from_k(0.25, 4)
        assert_allclose(laplacian_k([1.0, 0.0, 0.0, 0.0], k), [-2.0, 1.0, 0.0, 1.0])

    def test_wrong_length(self):
        """测试剖面长度与波数网格不一致"""
        with pytest.raises(GridAlignmentError):
            laplacian_k(np.zeros(10), WaveNumber.from_k(0.25, 8))

    def test_factorisation(self, rng):
        """测试 Δ_k = ∇_k∇_k（p 为偶数）"""
        grid = PeriodicGrid(n=120)
        k = grid.wave_number(0.2)
        X = rng.normal(size=grid.n)
        assert_allclose(nabla_k(nabla_k(X, k), k), laplacian_k(X, k), atol=1e-12)


class TestNablaAndAveraging:
    """中心差分与滑动平均测试"""

    def test_nabla_constant(self):
        """测试常数被消去"""
        k = WaveNumber.from_k(0.25, 16)
        assert_allclose(nabla_k(np.ones(16), k), 0.0)

    def test_nabla_cosine(self):
        """测试 ∇_k cos = -2sin(πk) sin"""
        grid = PeriodicGrid(n=200)
        k = grid.wave_number(0.1)
        expected = -2 * math.sin(math.pi * 0.1) * sine(grid)
        assert_allclose(nabla_k(cosine(grid), k), expected, atol=1e-13)

    def test_nabla_odd_shift(self):
        """测试 p 为奇数时报错"""
        with pytest.raises(GridAlignmentError):
            nabla_k(np.zeros(8), WaveNumber.from_k(0.125, 8))

    def test_nabla_adjoint(self, rng):
        """测试 ⟨∇_k a, b⟩ = -⟨a, ∇_k b⟩"""
        grid = PeriodicGrid(n=128)
        k = grid.wave_number(0.25)
        for _ in range(100):
            a = random_smooth_profile(rng, grid)
            b = random_smooth_profile(rng, grid)
            scale = 1.0 + np.max(np.abs(a)) * np.max(np.abs(b))
            gap = integrate(nabla_k(a, k) * b) + integrate(a * nabla_k(b, k))
            assert abs(gap) <= 1e-12 * scale

    def test_averaging_constant(self):
        """测试常数 c 映射为 k·c"""
        grid = PeriodicGrid(n=100)
        out = averaging_k(np.full(grid.n, 2.0), grid.wave_number(0.2))
        assert_allclose(out, 0.4, rtol=1e-14)

    def test_averaging_cosine(self):
        """测试 A_k cos ≈ sin(πk)/π cos，误差 O(N⁻²)"""
        kv = 0.2
        errors = []
        for n in (200, 400):
            grid = PeriodicGrid(n=n)
            out = averaging_k(cosine(grid), grid.wave_number(kv))
            expected = math.sin(math.pi * kv) / math.pi * cosine(grid)
            errors.append(float(np.max(np.abs(out - expected))))
        assert errors[1] < 1e-5
        assert refinement_order(errors) > 1.9

    def test_averaging_odd_shift(self):
        """测试 p 为奇数时报错"""
        with pytest.raises(GridAlignmentError):
            averaging_k(np.zeros(8), WaveNumber.from_k(0.125, 8))

    def test_averaging_derivative(self):
        """测试 (A_k X)' ≈ ∇_k X"""
        grid = PeriodicGrid(n=400)
        k = grid.wave_number(0.1)
        X = cosine(grid) + 0.3 * sine(grid, 2)
        assert_allclose(derivative(averaging_k(X, k)), nabla_k(X, k), atol=1e-3)


class TestSymmetryPreservation:
    """偶剖面在各算子下的奇偶性（逐点比较 j ↔ N-j）"""

    @pytest.fixture
    def even_profile(self, rng):
        grid = PeriodicGrid(n=256)
        X = random_smooth_profile(rng, grid)
        e = 0.5 * (X + mirror(X))
        return grid, e - np.mean(e)

    def test_even_to_even(self, even_profile):
        """测试 Δ_k、A_k 与二次累积积分保持偶性"""
        grid, e = even_profile
        k = grid.wave_number(0.125)
        for out in (laplacian_k(e, k), averaging_k(e, k), cumulative(cumulative(e))):
            assert np.max(np.abs(out - mirror(out))) <= 1e-13

    def test_even_to_odd(self, even_profile):
        """测试导数、∇_k 与累积积分把偶剖面变成奇剖面"""
        grid, e = even_profile
        k = grid.wave_number(0.125)
        for out in (derivative(e), nabla_k(e, k), cumulative(e)):
            assert np.max(np.abs(out + mirror(out))) <= 1e-13


class TestCalculus:
    """导数、积分与累积积分测试"""

    def test_derivative_constant(self):
        """测试常数的导数为零"""
        assert_allclose(derivative(np.full(32, 1.5)), 0.0)

    def test_derivative_order(self):
        """测试中心差分二阶收敛"""
        errors = []
        for n in (64, 128):
            grid = PeriodicGrid(n=n)
            errors.append(float(np.max(np.abs(derivative(cosine(grid)) + 2 * math.pi * sine(grid)))))
        assert refinement_order(errors) >= 1.95

    def test_second_difference_cosine(self):
        """测试二阶差分的特征值 -(2sin(πh)/h)²"""
        grid = PeriodicGrid(n=64)
        factor = (2 * math.sin(math.pi * grid.h) / grid.h) ** 2
        assert_allclose(second_difference(cosine(grid)), -factor * cosine(grid), atol=1e-9)

    def test_integrate(self):
        """测试 Riemann 和"""
        grid = PeriodicGrid(n=8)
        assert integrate(np.full(8, 3.0)) == pytest.approx(3.0)
        assert abs(integrate(cosine(grid))) < 1e-15
        assert integrate(cosine(grid) ** 2) == pytest.approx(0.5, abs=1e-15)

    def test_cumulative_zero(self):
        """测试零剖面"""
        assert_allclose(cumulative(np.zeros(16)), 0.0)

    def test_cumulative_cosine(self):
        """测试 I cos = sin/(2π)，二阶收敛"""
        errors = []
        for n in (64, 128):
            grid = PeriodicGrid(n=n)
            out = cumulative(cosine(grid))
            errors.append(float(np.max(np.abs(out - sine(grid) / (2 * math.pi)))))
        assert refinement_order(errors) >= 1.95

    def test_cumulative_sine(self):
        """测试 I sin = -cos/(2π)，输出零均值"""
        grid = PeriodicGrid(n=128)
        out = cumulative(sine(grid))
        assert_allclose(out, -cosine(grid) / (2 * math.pi), atol=1e-4)
        assert abs(integrate(out)) < 1e-15

    def test_cumulative_rejects_mean(self):
        """测试非零均值输入被拒绝"""
        with pytest.raises(ProfileError, match="mean-zero"):
            cumulative(np.ones(16))

    def test_inverse_pair(self, rng):
        """测试 derivative(cumulative(X)) -> X 二阶收敛"""
        errors = []
        for n in (128, 256):
            grid = PeriodicGrid(n=n)
            X = cosine(grid) + 0.5 * sine(grid, 3)
            errors.append(float(np.max(np.abs(derivative(cumulative(X)) - X))))
        assert refinement_order(errors) >= 1.9


class TestNorms:
    """范数测试"""

    def test_constant(self):
        """测试常数 1"""
        result = norms(np.ones(16))
        assert result.l2 == pytest.approx(1.0)
        assert result.sup == pytest.approx(1.0)
        assert result.h1semi == pytest.approx(0.0)

    def test_cosine(self):
        """测试 a cos 的范数"""
        grid = PeriodicGrid(n=512)
        a = 1.7
        result = norms(a * cosine(grid))
        assert result.l2 == pytest.approx(a / math.sqrt(2), rel=1e-14)
        assert result.h1semi == pytest.approx(math.sqrt(2) * math.pi * a, rel=1e-4)

    def test_embedding_chain(self, rng):
        """测试零均值剖面 L2 ≤ sup ≤ H1 半范数"""
        grid = PeriodicGrid(n=256)
        for _ in range(100):
            result = norms(random_smooth_profile(rng, grid))
            assert result.l2 <= result.sup
            assert result.sup <= result.h1semi + 1e-8


class TestCone:
    """偶性与单峰性测试"""

    def test_mirror(self):
        """测试镜像下标 j <-> N - j"""
        assert_allclose(mirror(np.arange(8.0)), [0, 7, 6, 5, 4, 3, 2, 1])

    def test_cosine(self):
        """测试 cos 属于锥"""
        assert is_unimodal_even(cosine(PeriodicGrid(n=64)))

    def test_sine(self):
        """测试 sin 不是偶函数"""
        grid = PeriodicGrid(n=64)
        assert not is_even(sine(grid))
        assert not is_unimodal_even(sine(grid))

    def test_double_frequency(self):
        """测试 cos(4πφ) 在 [0, 1/2] 上先减后增"""
        grid = PeriodicGrid(n=64)
        assert is_even(cosine(grid, 2))
        assert not is_unimodal_even(cosine(grid, 2))

    def test_tolerance(self):
        """测试容差吸收微小扰动"""
        X = cosine(PeriodicGrid(n=64))
        X[40] += 1e-12
        assert is_unimodal_even(X)
        assert not is_unimodal_even(X, tol=0.0)

    def test_negative_tolerance(self):
        """测试负容差"""
        with pytest.raises(ValueError):
            is_unimodal_even(np.zeros(8), tol=-1.0)
