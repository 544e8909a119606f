"""
线性分式映射演算模块
φ(z) = (Az + B)/(⟨z, C⟩ + D) 的求值、相伴矩阵、伴随映射、复合、Kreĭn 等距判定与自同构构造
"""

import logging
from dataclasses import dataclass

import numpy as np

from config import settings
from wcosym.errors import DenominatorVanishes, DimensionMismatch, NotInBall
from wcosym.maps.linalg import (
    as_cmat,
    as_cvec,
    frobenius,
    frozen,
    krein_form,
    norm_sq,
    sample_ball,
)

logger = logging.getLogger(__name__)

# 相伴矩阵规范化时判定 D 是否为零的阈值
CANONICAL_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class LinearFractionalMap:
    """线性分式映射 φ(z) = (a·z + b)/(⟨z, c⟩ + d)，不可变"""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: complex

    def __post_init__(self):
        a = as_cmat(self.a)
        dim = a.shape[0]
        b = as_cvec(self.b, dim)
        c = as_cvec(self.c, dim)
        d = complex(self.d)
        if not (np.any(a) or np.any(b) or np.any(c) or d != 0):
            raise ValueError("(a, b, c, d) 不能全为零")
        object.__setattr__(self, 'a', frozen(a))
        object.__setattr__(self, 'b', frozen(b))
        object.__setattr__(self, 'c', frozen(c))
        object.__setattr__(self, 'd', d)

    @property
    def dim(self):
        return self.a.shape[0]

    def denominator(self, z):
        """⟨z, c⟩ + d"""
        return complex(np.vdot(self.c, z)) + self.d

    def __call__(self, z):
        return eval_map(self, z)

    def __repr__(self):
        return (f"LinearFractionalMap(a={self.a.tolist()}, b={self.b.tolist()}, "
                f"c={self.c.tolist()}, d={self.d})")


@dataclass(frozen=True, eq=False)
class AssocMatrix:
    """相伴矩阵 [[A, B], [C*, D]]，仅在相差非零标量意义下确定"""

    m: np.ndarray

    def __post_init__(self):
        m = as_cmat(self.m)
        if m.shape[0] < 2:
            raise DimensionMismatch("相伴矩阵至少为 2×2")
        if not np.any(m):
            raise ValueError("相伴矩阵不能为零")
        object.__setattr__(self, 'm', frozen(m))

    @property
    def dim(self):
        return self.m.shape[0] - 1

    def __matmul__(self, other):
        return AssocMatrix(self.m @ other.m)

    def equivalent(self, other, tol=1e-10):
        """是否与另一相伴矩阵成比例"""
        return proportionality(self, other)[1] <= tol


# ---------------------------------------------------------------------------
# 构造
# ---------------------------------------------------------------------------

def identity_map(dim):
    """恒等映射"""
    return linear_map(np.eye(dim))


def linear_map(s):
    """线性映射 z ↦ Sz"""
    s = as_cmat(s)
    dim = s.shape[0]
    return LinearFractionalMap(s, np.zeros(dim), np.zeros(dim), 1.0)


def affine_map(a, c):
    """仿射映射 σ(z) = Az + c"""
    a = as_cmat(a)
    return LinearFractionalMap(a, as_cvec(c, a.shape[0]), np.zeros(a.shape[0]), 1.0)


# ---------------------------------------------------------------------------
# 求值与导数
# ---------------------------------------------------------------------------

def eval_map(phi, z, tol=None):
    """
    计算 φ(z) = (Az + B)/(⟨z, C⟩ + D)，不检查自映射性质

    Args:
        phi (LinearFractionalMap): 线性分式映射
        z: 求值点
        tol (float, optional): 分母下界，默认 settings 中的 denominator 容差

    Returns:
        np.ndarray: φ(z)
    """
    tol = settings.tolerance("denominator") if tol is None else tol
    z = as_cvec(z, phi.dim)
    den = phi.denominator(z)
    if abs(den) < tol:
        raise DenominatorVanishes(f"分母 |⟨z,c⟩+d| = {abs(den):.3e} 过小")
    return (phi.a @ z + phi.b) / den


def map_jacobian(phi, z):
    """解析雅可比矩阵 J[j, k] = ∂φ_j/∂z_k"""
    z = as_cvec(z, phi.dim)
    den = phi.denominator(z)
    if abs(den) < settings.tolerance("denominator"):
        raise DenominatorVanishes("分母在求导点消失")
    g = phi.c.conj()
    num = phi.a @ z + phi.b
    return phi.a / den - np.outer(num, g) / den ** 2


def map_hessian(phi, z):
    """解析二阶导数 H[j, k, l] = ∂²φ_j/∂z_k∂z_l"""
    z = as_cvec(z, phi.dim)
    den = phi.denominator(z)
    if abs(den) < settings.tolerance("denominator"):
        raise DenominatorVanishes("分母在求导点消失")
    g = phi.c.conj()
    num = phi.a @ z + phi.b
    first = np.einsum('jk,l->jkl', phi.a, g)
    return (-(first + first.transpose(0, 2, 1)) / den ** 2
            + 2 * np.einsum('j,k,l->jkl', num, g, g) / den ** 3)


# ---------------------------------------------------------------------------
# 相伴矩阵
# ---------------------------------------------------------------------------

def assoc_matrix(phi):
    """返回相伴矩阵 [[A, B], [C*, D]]"""
    dim = phi.dim
    m = np.zeros((dim + 1, dim + 1), dtype=complex)
    m[:dim, :dim] = phi.a
    m[:dim, dim] = phi.b
    m[dim, :dim] = phi.c.conj()
    m[dim, dim] = phi.d
    return AssocMatrix(m)


def from_assoc_matrix(m):
    """由相伴矩阵恢复线性分式映射"""
    mat = m.m if isinstance(m, AssocMatrix) else as_cmat(m)
    dim = mat.shape[0] - 1
    return LinearFractionalMap(mat[:dim, :dim], mat[:dim, dim], mat[dim, :dim].conj(), mat[dim, dim])


def canonical(m):
    """
    规范化相伴矩阵：|D| > 1e-12 时使右下角为 1，否则使按行扫描的第一个非零元为 1

    Args:
        m (AssocMatrix): 相伴矩阵

    Returns:
        AssocMatrix: 规范化后的矩阵
    """
    mat = m.m
    corner = mat[-1, -1]
    if abs(corner) > CANONICAL_EPS:
        return AssocMatrix(mat / corner)
    flat = mat.ravel()
    pivot = flat[np.flatnonzero(np.abs(flat) > CANONICAL_EPS)[0]]
    return AssocMatrix(mat / pivot)


def proportionality(m1, m2):
    """
    最小二乘意义下 m1 ≈ k·m2 的比例系数

    Returns:
        tuple: (k, ‖m1 − k·m2‖_F / ‖m1‖_F)
    """
    x, y = m1.m, m2.m
    if x.shape != y.shape:
        raise DimensionMismatch("相伴矩阵维数不一致")
    k = complex(np.vdot(y, x) / np.vdot(y, y))
    return k, frobenius(x - k * y) / frobenius(x)


def adjoint_map(phi):
    """
    伴随映射 σ(z) = (A*z − C)/(⟨z, −B⟩ + D̄)，相伴矩阵为 [[A*, −C], [−B*, D̄]]
    """
    return LinearFractionalMap(phi.a.conj().T, -phi.c, -phi.b, np.conj(phi.d))


def compose(outer, inner):
    """复合 outer∘inner，相伴矩阵为两者之积"""
    if outer.dim != inner.dim:
        raise DimensionMismatch(f"维数不一致: {outer.dim} 与 {inner.dim}")
    return from_assoc_matrix(assoc_matrix(outer) @ assoc_matrix(inner))


# ---------------------------------------------------------------------------
# Kreĭn 等距与自同构
# ---------------------------------------------------------------------------

def krein_multiplier(m, tol=None):
    """
    判定相伴矩阵是否为 Kreĭn 等距的倍数

    在规范化后的矩阵上寻找 |k|² > 0 使 |k|²·m*Jm = J，J = diag(I_N, −1)。

    Args:
        m (AssocMatrix): 相伴矩阵
        tol (float, optional): 相对 Frobenius 容差

    Returns:
        float | None: |k|²，不存在时返回 None
    """
    tol = settings.tolerance("krein") if tol is None else tol
    mat = canonical(m).m
    form = krein_form(m.dim)
    gram = mat.conj().T @ form @ mat
    scale = float(np.trace(form @ gram).real) / (m.dim + 1)
    if scale <= 0:
        return None
    if frobenius(gram - scale * form) > tol * frobenius(gram):
        return None
    return 1.0 / scale


def is_automorphism(phi, grid=None):
    """
    判定 φ 是否为单位球的自同构：Kreĭn 条件成立且在采样网格上为自映射

    Args:
        phi (LinearFractionalMap): 线性分式映射
        grid (np.ndarray, optional): 采样点，默认使用固定种子的网格

    Returns:
        bool: 是否为自同构
    """
    if krein_multiplier(assoc_matrix(phi)) is None:
        return False
    if grid is None:
        grid = sample_ball(phi.dim, settings.AUTOMORPHISM_GRID_SIZE,
                           settings.AUTOMORPHISM_GRID_RADIUS, settings.AUTOMORPHISM_GRID_SEED)
    for z in grid:
        try:
            image = eval_map(phi, z)
        except DenominatorVanishes:
            return False
        if norm_sq(image) >= 1.0:
            logger.debug(f"采样点 {z} 的像落在球外")
            return False
    return True


def involution_heart(a):
    """自伴矩阵 P_a + s_a·Q_a，a = 0 时 P_0 = 0"""
    a = as_cvec(a)
    size = norm_sq(a)
    if size >= 1.0:
        raise NotInBall(f"‖a‖² = {size:.6f} ≥ 1")
    dim = a.shape[0]
    s = np.sqrt(1.0 - size)
    proj = np.outer(a, a.conj()) / size if size > 0 else np.zeros((dim, dim), dtype=complex)
    return proj + s * (np.eye(dim) - proj)


def make_involution(a):
    """
    构造对合自同构 φ_a(z) = (a − P_a z − s_a Q_a z)/(1 − ⟨z, a⟩)

    Args:
        a: 开单位球内的向量

    Returns:
        LinearFractionalMap: φ_a，满足 φ_a∘φ_a ≡ id
    """
    a = as_cvec(a)
    return LinearFractionalMap(-involution_heart(a), a, -a, 1.0)


def make_heart_matrix(b):
    """
    T = √(1−|b|²)·I + (1 − √(1−|b|²))·b bᵀ/|b|²（按原式使用转置），b = 0 时返回 I

    Args:
        b: 开单位球内的向量

    Returns:
        np.ndarray: T
    """
    b = as_cvec(b)
    size = norm_sq(b)
    if size >= 1.0:
        raise NotInBall(f"‖b‖² = {size:.6f} ≥ 1")
    dim = b.shape[0]
    if size == 0:
        return np.eye(dim, dtype=complex)
    s = np.sqrt(1.0 - size)
    return s * np.eye(dim) + (1.0 - s) * np.outer(b, b) / size
