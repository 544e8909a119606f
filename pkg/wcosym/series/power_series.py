"""
截断多元幂级数
系数按 grlex 基存成稠密复向量，乘法通过预先计算的下标表完成
"""

import logging
import math
from enum import Enum

import numpy as np

from config import settings
from wcosym.errors import DenominatorVanishesAtOrigin, DimensionMismatch, NotInBall
from wcosym.maps.linalg import as_cvec, norm_sq
from wcosym.series.multi_index import (
    count_monomials_leq,
    exponent_matrix,
    grlex_basis,
    grlex_positions,
    multi_factorial,
    product_table,
    total_degrees,
    unit_index,
)

logger = logging.getLogger(__name__)


class PowerSeries:
    """
    截断幂级数 Σ_{|α|≤D} c_α z^α

    Args:
        dim (int): 变量个数 N
        degree_cap (int): 截断次数 D
        coeffs: 长度为 binom(N+D, N) 的系数向量，按 grlex 排列；缺省为零级数
    """

    __slots__ = ("dim", "degree_cap", "coeffs")

    def __init__(self, dim, degree_cap, coeffs=None):
        self.dim = int(dim)
        self.degree_cap = int(degree_cap)
        size = count_monomials_leq(self.dim, self.degree_cap)
        if coeffs is None:
            data = np.zeros(size, dtype=complex)
        else:
            data = np.array(coeffs, dtype=complex)
            if data.shape != (size,):
                raise DimensionMismatch(f"系数向量长度应为 {size}，得到 {data.shape}")
        data.setflags(write=False)
        self.coeffs = data

    # ------------------------------------------------------------------
    # 构造
    # ------------------------------------------------------------------

    @classmethod
    def zero(cls, dim, degree_cap):
        return cls(dim, degree_cap)

    @classmethod
    def constant(cls, value, dim, degree_cap):
        data = np.zeros(count_monomials_leq(dim, degree_cap), dtype=complex)
        data[0] = value
        return cls(dim, degree_cap, data)

    @classmethod
    def variable(cls, j, dim, degree_cap):
        """坐标函数 z_j（0 起始）"""
        return cls.from_dict({unit_index(dim, j): 1.0}, dim, degree_cap)

    @classmethod
    def from_dict(cls, mapping, dim, degree_cap):
        """由 {多重指标: 系数} 构造，超出截断次数的项被丢弃"""
        positions = grlex_positions(dim, degree_cap)
        data = np.zeros(len(positions), dtype=complex)
        for alpha, value in mapping.items():
            alpha = tuple(int(k) for k in alpha)
            if len(alpha) != dim:
                raise DimensionMismatch(f"多重指标 {alpha} 的长度不是 {dim}")
            if sum(alpha) <= degree_cap:
                data[positions[alpha]] += value
        return cls(dim, degree_cap, data)

    @property
    def basis(self):
        return grlex_basis(self.dim, self.degree_cap)

    def coefficient(self, alpha):
        """z^α 的系数，|α| > D 时为 0"""
        alpha = tuple(int(k) for k in alpha)
        if sum(alpha) > self.degree_cap:
            return 0j
        return complex(self.coeffs[grlex_positions(self.dim, self.degree_cap)[alpha]])

    def to_dict(self, tol=0.0):
        """非零系数的字典表示"""
        return {alpha: complex(value) for alpha, value in zip(self.basis, self.coeffs)
                if abs(value) > tol}

    def homogeneous_part(self, k):
        """总次数为 k 的齐次部分"""
        mask = total_degrees(self.dim, self.degree_cap) == k
        return PowerSeries(self.dim, self.degree_cap, np.where(mask, self.coeffs, 0))

    def truncate(self, degree):
        """截断到较低次数 degree"""
        if degree > self.degree_cap:
            raise DimensionMismatch(f"无法从 D={self.degree_cap} 截断到 D={degree}")
        size = count_monomials_leq(self.dim, degree)
        return PowerSeries(self.dim, degree, self.coeffs[:size])

    # ------------------------------------------------------------------
    # 运算
    # ------------------------------------------------------------------

    def _check_compatible(self, other):
        if (self.dim, self.degree_cap) != (other.dim, other.degree_cap):
            raise DimensionMismatch(
                f"幂级数不兼容: (N={self.dim}, D={self.degree_cap}) 与 (N={other.dim}, D={other.degree_cap})"
            )

    def __add__(self, other):
        if isinstance(other, PowerSeries):
            self._check_compatible(other)
            return PowerSeries(self.dim, self.degree_cap, self.coeffs + other.coeffs)
        return self + PowerSeries.constant(other, self.dim, self.degree_cap)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(self.dim, self.degree_cap, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor):
        return PowerSeries(self.dim, self.degree_cap, complex(factor) * self.coeffs)

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return self.scale(other)
        self._check_compatible(other)
        left, right, target = product_table(self.dim, self.degree_cap)
        terms = self.coeffs[left] * other.coeffs[right]
        size = self.coeffs.shape[0]
        data = (np.bincount(target, weights=terms.real, minlength=size)
                + 1j * np.bincount(target, weights=terms.imag, minlength=size))
        return PowerSeries(self.dim, self.degree_cap, data)

    __rmul__ = __mul__

    def power(self, k):
        """截断乘法意义下的 k 次幂（k ≥ 0）"""
        if k < 0:
            raise ValueError("幂次不能为负")
        result = PowerSeries.constant(1.0, self.dim, self.degree_cap)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    __pow__ = power

    def partial(self, j):
        """∂/∂z_j，最高次项变为零"""
        exps = exponent_matrix(self.dim, self.degree_cap)
        positions = grlex_positions(self.dim, self.degree_cap)
        data = np.zeros_like(self.coeffs)
        for pos, alpha in enumerate(self.basis):
            if alpha[j] == 0:
                continue
            lowered = list(alpha)
            lowered[j] -= 1
            data[positions[tuple(lowered)]] += exps[pos, j] * self.coeffs[pos]
        return PowerSeries(self.dim, self.degree_cap, data)

    def evaluate(self, z):
        """在 z 处对截断级数求和"""
        z = as_cvec(z, self.dim)
        monomials = np.prod(z[None, :] ** exponent_matrix(self.dim, self.degree_cap), axis=1)
        return complex(self.coeffs @ monomials)

    __call__ = evaluate

    def allclose(self, other, tol=1e-12):
        self._check_compatible(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs), initial=0.0) <= tol)

    def __repr__(self):
        return f"PowerSeries(dim={self.dim}, degree_cap={self.degree_cap}, terms={len(self.to_dict())})"


class SeriesOp(str, Enum):
    ADD = "add"
    MUL = "mul"
    SCALE = "scale"
    POWER = "power"


def series_arith(op, *args):
    """
    截断幂级数环上的运算

    Args:
        op (SeriesOp | str): add / mul / scale / power
        *args: add、mul 为若干幂级数；scale 为 (级数, 标量)；power 为 (级数, 整数)

    Returns:
        PowerSeries: 运算结果
    """
    op = SeriesOp(op)
    if op is SeriesOp.SCALE:
        series, factor = args
        return series.scale(factor)
    if op is SeriesOp.POWER:
        series, k = args
        return series.power(int(k))
    if not args:
        raise ValueError(f"{op.value} 至少需要一个操作数")
    result = args[0]
    for operand in args[1:]:
        result = result + operand if op is SeriesOp.ADD else result * operand
    return result


# ---------------------------------------------------------------------------
# 闭式函数的展开
# ---------------------------------------------------------------------------

def _check_ball(c, formal):
    if not formal and norm_sq(c) >= 1.0:
        raise NotInBall(f"‖c‖² = {norm_sq(c):.6f} ≥ 1")


def _conj_monomials(c, degree):
    """conj(c)^α 在 grlex 基上的取值"""
    return np.prod(c.conj()[None, :] ** exponent_matrix(c.shape[0], degree), axis=1)


def expand_reciprocal_linear(c, m, degree, formal=False):
    """
    (1 − ⟨z, c⟩)^(−m) 展开到 degree 次

    z^α 的系数为 (m−1+|α|)!/((m−1)!·α!)·conj(c)^α。

    Args:
        c: 系数向量，非形式展开时要求 ‖c‖ < 1
        m (int): 幂次
        degree (int): 截断次数 D
        formal (bool): 只做形式展开，不检查收敛

    Returns:
        PowerSeries: 截断级数
    """
    c = as_cvec(c)
    _check_ball(c, formal)
    dim = c.shape[0]
    if m == 0:
        return PowerSeries.constant(1.0, dim, degree)
    if m < 0:
        raise ValueError("幂次必须为正整数")
    weights = np.array([
        math.comb(m - 1 + sum(alpha), sum(alpha)) * math.factorial(sum(alpha)) // multi_factorial(alpha)
        for alpha in grlex_basis(dim, degree)
    ], dtype=float)
    return PowerSeries(dim, degree, weights * _conj_monomials(c, degree))


def expand_log_reciprocal(c, degree, formal=False):
    """
    ln(1/(1 − ⟨z, c⟩)) = Σ_{k≥1} ⟨z, c⟩^k/k 展开到 degree 次，不含常数项 1

    z^α（|α| ≥ 1）的系数为 (|α|−1)!/α!·conj(c)^α
    """
    c = as_cvec(c)
    _check_ball(c, formal)
    dim = c.shape[0]
    weights = np.array([
        0.0 if sum(alpha) == 0 else math.factorial(sum(alpha) - 1) / multi_factorial(alpha)
        for alpha in grlex_basis(dim, degree)
    ])
    return PowerSeries(dim, degree, weights * _conj_monomials(c, degree))


def map_component_series(phi, degree):
    """
    线性分式映射各分量的截断 Taylor 展开

    1/(⟨z,c⟩ + d) = (1/d)·(1 − ⟨z, −c/d̄⟩)^(−1)，再与仿射分子逐分量相乘

    Args:
        phi (LinearFractionalMap): 线性分式映射
        degree (int): 截断次数 D

    Returns:
        list: N 个 PowerSeries
    """
    if abs(phi.d) < settings.tolerance("denominator"):
        raise DenominatorVanishesAtOrigin(f"|d| = {abs(phi.d):.3e}，分母在原点消失")
    dim = phi.dim
    reciprocal = expand_reciprocal_linear(-phi.c / np.conj(phi.d), 1, degree, formal=True).scale(1.0 / phi.d)
    variables = [PowerSeries.variable(k, dim, degree) for k in range(dim)]
    components = []
    for j in range(dim):
        numerator = PowerSeries.constant(phi.b[j], dim, degree)
        for k in range(dim):
            if phi.a[j, k] != 0:
                numerator = numerator + variables[k].scale(phi.a[j, k])
        components.append(numerator * reciprocal)
    return components


def weight_series(psi, degree, dim=None):
    """
    乘子 ψ = coefficient·(1 − ℓᵀz)^(−power) 的截断展开

    Args:
        psi (WeightSpec): Constant / KernelPower / NormalizedKernel
        degree (int): 截断次数 D
        dim (int, optional): 维数 N，常数乘子必须给出

    Returns:
        PowerSeries: 截断级数
    """
    own_dim = psi.dim
    if dim is None:
        if own_dim is None:
            raise DimensionMismatch("常数乘子需要显式给出维数")
        dim = own_dim
    elif own_dim is not None and own_dim != dim:
        raise DimensionMismatch(f"乘子维数 {own_dim} 与 N={dim} 不一致")
    if psi.power == 0:
        return PowerSeries.constant(psi.coefficient, dim, degree)
    ell = psi.linear_form(dim)
    return expand_reciprocal_linear(ell.conj(), psi.power, degree).scale(psi.coefficient)


def compose_series(outer, inner):
    """
    级数复合 outer(inner_1, …, inner_N)

    内层级数常数项为零时结果在截断次数内精确

    Args:
        outer (PowerSeries): 外层级数
        inner (list): N 个同维同次的 PowerSeries

    Returns:
        PowerSeries: 复合后的级数
    """
    if len(inner) != outer.dim:
        raise DimensionMismatch(f"需要 {outer.dim} 个内层分量，得到 {len(inner)}")
    dim, degree = inner[0].dim, inner[0].degree_cap
    result = PowerSeries.zero(dim, degree)
    cache = {}
    for alpha, value in outer.to_dict().items():
        term = PowerSeries.constant(1.0, dim, degree)
        for j, k in enumerate(alpha):
            if k:
                key = (j, k)
                if key not in cache:
                    cache[key] = inner[j].power(k)
                term = term * cache[key]
        result = result + term.scale(value)
    return result
