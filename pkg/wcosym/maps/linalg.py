"""
复向量、复矩阵的基础工具
"""

import numpy as np

from wcosym.errors import DimensionMismatch


def as_cvec(values, dim=None):
    """
    转换为一维复向量

    Args:
        values: 序列或数组
        dim (int, optional): 期望维数

    Returns:
        np.ndarray: complex128 向量
    """
    vec = np.atleast_1d(np.asarray(values, dtype=complex))
    if vec.ndim != 1:
        raise DimensionMismatch(f"期望一维向量，得到形状 {vec.shape}")
    if dim is not None and vec.shape[0] != dim:
        raise DimensionMismatch(f"期望长度 {dim}，得到 {vec.shape[0]}")
    if not np.all(np.isfinite(vec)):
        raise ValueError("向量含有非有限元素")
    return vec


def as_cmat(values, dim=None):
    """转换为方阵（complex128）"""
    mat = np.atleast_2d(np.asarray(values, dtype=complex))
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatch(f"期望方阵，得到形状 {mat.shape}")
    if dim is not None and mat.shape[0] != dim:
        raise DimensionMismatch(f"期望 {dim}×{dim} 矩阵，得到 {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise ValueError("矩阵含有非有限元素")
    return mat


def frozen(array):
    """返回只读副本"""
    out = np.array(array, dtype=complex)
    out.setflags(write=False)
    return out


def inner(z, w):
    """C^N 上的内积 ⟨z, w⟩ = Σ z_j conj(w_j)"""
    return complex(np.vdot(w, z))


def norm_sq(z):
    return float(np.vdot(z, z).real)


def frobenius(mat):
    return float(np.linalg.norm(mat, 'fro'))


def relative_frobenius(diff, ref):
    """‖diff‖_F / ‖ref‖_F，ref 为零时退化为绝对范数"""
    scale = frobenius(ref)
    return frobenius(diff) / scale if scale > 0 else frobenius(diff)


def symmetry_defect(mat):
    """‖A − Aᵀ‖_F"""
    return frobenius(mat - mat.T)


def hermitian_defect(mat):
    """‖A − A*‖_F"""
    return frobenius(mat - mat.conj().T)


def unitary_defect(mat):
    """‖A*A − I‖_F"""
    return frobenius(mat.conj().T @ mat - np.eye(mat.shape[0]))


def krein_form(dim):
    """Kreĭn 空间的 J = diag(I_N, −1)"""
    return np.diag(np.r_[np.ones(dim), -1.0]).astype(complex)


def sample_ball(dim, count, radius, seed):
    """
    在半径为 radius 的复球内均匀采样

    Args:
        dim (int): 维数 N
        count (int): 样本数量
        radius (float): 球半径
        seed (int): 随机种子

    Returns:
        np.ndarray: 形状 (count, dim) 的样本
    """
    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * rng.uniform(size=count) ** (1.0 / (2 * dim))
    return directions * radii[:, None]


def sample_pairs(dim, count, radius, seed):
    """采样 (z, w) 点对，供核函数层面的恒等式检验使用"""
    points = sample_ball(dim, 2 * count, radius, seed)
    return [(points[2 * i], points[2 * i + 1]) for i in range(count)]
