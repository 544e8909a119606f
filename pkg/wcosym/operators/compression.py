"""
加权复合算子 W_{ψ,φ}f = ψ·(f∘φ) 的有限压缩
矩阵在正交基 e_α = z^α/‖z^α‖（grlex 排序，|α| ≤ D）下给出
"""

import logging
from dataclasses import dataclass

import numpy as np

from config import settings
from wcosym.errors import DenominatorVanishesAtOrigin, DimensionMismatch, NotInBall
from wcosym.maps.lfmap import LinearFractionalMap, assoc_matrix, canonical, eval_map
from wcosym.maps.linalg import frozen, norm_sq
from wcosym.series.multi_index import count_monomials_leq, grlex_basis
from wcosym.series.power_series import PowerSeries, map_component_series, weight_series
from wcosym.spaces.kernels import SpaceKind, monomial_norms
from wcosym.spaces.weights import WeightSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class WeightedCompositionSpec:
    """加权复合算子的符号：空间、乘子 ψ 与线性分式映射 φ"""

    space: SpaceKind
    psi: WeightSpec
    phi: LinearFractionalMap

    def __post_init__(self):
        dim = self.space.dim
        if self.phi.dim != dim:
            raise DimensionMismatch(f"φ 的维数 {self.phi.dim} 与空间维数 {dim} 不一致")
        if self.psi.dim is not None and self.psi.dim != dim:
            raise DimensionMismatch(f"ψ 的维数 {self.psi.dim} 与空间维数 {dim} 不一致")
        if abs(self.phi.d) < settings.tolerance("denominator"):
            raise DenominatorVanishesAtOrigin("φ 的分母在原点消失")
        origin = eval_map(self.phi, np.zeros(dim))
        if norm_sq(origin) >= 1.0:
            raise NotInBall(f"φ(0) = {origin} 不在单位球内")

    @property
    def dim(self):
        return self.space.dim

    def apply(self, f):
        """返回函数 z ↦ ψ(z)·f(φ(z))"""
        return lambda z: self.psi.evaluate(z) * f(eval_map(self.phi, z))

    def degree_preserving(self, tol=None):
        """
        ψ 为常数且 φ 为线性映射时，W 把 |α| = k 的齐次多项式映到次数 k 的齐次多项式，
        此时有限压缩与 W 在多项式子空间上的限制一致
        """
        tol = settings.tolerance("linear") if tol is None else tol
        m = canonical(assoc_matrix(self.phi)).m
        dim = self.dim
        linear = np.linalg.norm(m[:dim, dim]) <= tol and np.linalg.norm(m[dim, :dim]) <= tol
        return bool(linear and self.psi.is_constant(dim, tol))


@dataclass(frozen=True, eq=False)
class OperatorCompression:
    """P_D W P_D 在正交基下的矩阵"""

    space: SpaceKind
    degree_cap: int
    matrix: np.ndarray

    def __post_init__(self):
        size = count_monomials_leq(self.space.dim, self.degree_cap)
        if self.matrix.shape != (size, size):
            raise DimensionMismatch(f"压缩矩阵形状应为 ({size}, {size})，得到 {self.matrix.shape}")
        object.__setattr__(self, 'matrix', frozen(self.matrix))

    @property
    def size(self):
        return self.matrix.shape[0]

    @property
    def basis(self):
        return grlex_basis(self.space.dim, self.degree_cap)

    def leading_size(self, leading_degree=None):
        """前导块（|α| ≤ leading_degree）的行数，None 表示整个矩阵"""
        if leading_degree is None:
            return self.size
        if leading_degree > self.degree_cap:
            raise DimensionMismatch(f"前导次数 {leading_degree} 超过截断次数 {self.degree_cap}")
        return count_monomials_leq(self.space.dim, leading_degree)

    def apply(self, coeffs):
        """作用在正交坐标向量上"""
        return self.matrix @ np.asarray(coeffs, dtype=complex)


def to_orthonormal(series, space):
    """单项式系数转为正交基坐标：v_α = c_α·‖z^α‖"""
    return series.coeffs * monomial_norms(space, series.degree_cap)


def from_orthonormal(coeffs, space, degree):
    """正交基坐标转回单项式系数的幂级数"""
    return PowerSeries(space.dim, degree, np.asarray(coeffs, dtype=complex) / monomial_norms(space, degree))


def build_compression(w, degree=None):
    """
    构建 W_{ψ,φ} 的截断矩阵

    第 β 列为 ψ·φ^β 的截断展开，entry(α, β) = coeff_α(ψ·φ^β)·‖z^α‖/‖z^β‖。
    φ^β 由 φ^(β−e_j)·φ_j 递推得到，grlex 升序保证前者已算出。

    Args:
        w (WeightedCompositionSpec): 算子符号
        degree (int, optional): 截断次数 D，默认按维数取 settings 中的值

    Returns:
        OperatorCompression: 压缩矩阵
    """
    dim = w.dim
    degree = settings.default_degree_cap(dim) if degree is None else int(degree)
    try:
        psi_series = weight_series(w.psi, degree, dim)
        components = map_component_series(w.phi, degree)
        basis = grlex_basis(dim, degree)
        norms = monomial_norms(w.space, degree)

        powers = {basis[0]: PowerSeries.constant(1.0, dim, degree)}
        matrix = np.zeros((len(basis), len(basis)), dtype=complex)
        for col, beta in enumerate(basis):
            if col > 0:
                j = next(k for k, e in enumerate(beta) if e > 0)
                lowered = beta[:j] + (beta[j] - 1,) + beta[j + 1:]
                powers[beta] = powers[lowered] * components[j]
            matrix[:, col] = (psi_series * powers[beta]).coeffs * norms / norms[col]
        logger.debug(f"压缩矩阵构建完成: {w.space.kind.value}, N={dim}, D={degree}, 维数 {len(basis)}")
        return OperatorCompression(w.space, degree, matrix)
    except Exception as e:
        logger.error(f"构建压缩矩阵失败: {str(e)}")
        raise
