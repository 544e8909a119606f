"""
对称性、自伴性、酉性与正规性的残差

矩阵残差作用在压缩矩阵上（相对 Frobenius 范数）；核残差直接用闭式核函数逐点计算，
不受截断影响。leading_degree 把检验限制在 |α| ≤ leading_degree 的前导块上，
用于非保次数的情形观察随 D 的收敛。
"""

import logging

import numpy as np

from config import settings
from wcosym.errors import DimensionMismatch
from wcosym.maps.lfmap import eval_map
from wcosym.maps.linalg import frobenius, relative_frobenius, sample_pairs
from wcosym.operators.conjugation import apply_conjugation
from wcosym.spaces.kernels import adjoint_on_kernel, kernel_eval

logger = logging.getLogger(__name__)


def symmetry_residual_matrix(t, c, leading_degree=None):
    """
    ‖T·M − M·Tᵀ‖_F/‖T‖_F，即 TC = CT* 在 C = M∘conj 下的有限形式

    Args:
        t (OperatorCompression): 算子压缩
        c (AntiLinearCompression): 共轭压缩
        leading_degree (int, optional): 只比较前导块

    Returns:
        float: 相对残差
    """
    if t.size != c.size:
        raise DimensionMismatch(f"矩阵维数不一致: {t.size} 与 {c.size}")
    n = t.leading_size(leading_degree)
    lhs = t.matrix[:n, :] @ c.m[:, :n]
    rhs = c.m[:n, :] @ t.matrix.T[:, :n]
    return relative_frobenius(lhs - rhs, t.matrix[:n, :n])


def hermitian_residual(t, leading_degree=None):
    """‖T − T*‖_F/‖T‖_F"""
    n = t.leading_size(leading_degree)
    block = t.matrix[:n, :n]
    return relative_frobenius(block - block.conj().T, block)


def unitary_residual(t, leading_degree=None):
    """
    ‖T*T − I‖_F

    前导块上取 T 的前 L 列的 Gram 矩阵；非保次数的 φ 下该量随 D 单调不增
    """
    n = t.leading_size(leading_degree)
    cols = t.matrix[:, :n]
    return frobenius(cols.conj().T @ cols - np.eye(n))


def normal_residual(t, leading_degree=None):
    """‖T*T − TT*‖_F/‖T‖_F²"""
    n = t.leading_size(leading_degree)
    cols = t.matrix[:, :n]
    rows = t.matrix[:n, :]
    diff = cols.conj().T @ cols - rows @ rows.conj().T
    scale = frobenius(t.matrix[:n, :n]) ** 2
    return frobenius(diff) / scale if scale > 0 else frobenius(diff)


def default_samples(dim, count=None, seed=None, radius=None):
    """核残差的默认采样点对：半径 0.6 的球内，固定种子"""
    return sample_pairs(
        dim,
        settings.SAMPLE_COUNT if count is None else count,
        settings.SAMPLE_RADIUS if radius is None else radius,
        settings.SAMPLE_SEED if seed is None else seed,
    )


def kernel_symmetry_residual(w, c, samples=None):
    """
    逐点检验 W·C K_w = C·W* K_w

    max |(W C K_w)(z) − (C W* K_w)(z)|/(1 + |K_w(z)|)，
    W* K_w = conj(ψ(w))·K_{φ(w)} 由 adjoint_on_kernel 给出

    Args:
        w (WeightedCompositionSpec): 算子符号
        c (PlainJ | JCU | WPhiJ): 共轭算子
        samples (list, optional): (z, w) 点对

    Returns:
        float: 最大归一化残差

    Raises:
        OutOfDomain: 采样点或其像不在球内
    """
    space = w.space
    samples = default_samples(space.dim) if samples is None else samples
    worst = 0.0
    for z, point in samples:
        kernel = _kernel(space, point)
        conj_kernel = apply_conjugation(c, kernel)
        lhs = w.psi.evaluate(z) * conj_kernel(eval_map(w.phi, z))

        coef, image = adjoint_on_kernel(w.psi, w.phi, point)
        adjoint_kernel = _scaled_kernel(space, image, coef)
        rhs = apply_conjugation(c, adjoint_kernel)(z)

        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(kernel(z))))
    logger.debug(f"核对称残差: {worst:.3e}（{len(samples)} 个点对）")
    return worst


def kernel_hermitian_residual(w, samples=None):
    """
    逐点检验 W K_w = W* K_w

    max |ψ(z)·K_w(φ(z)) − conj(ψ(w))·K_{φ(w)}(z)|/(1 + |K_w(z)|)
    """
    space = w.space
    samples = default_samples(space.dim) if samples is None else samples
    worst = 0.0
    for z, point in samples:
        kernel = _kernel(space, point)
        lhs = w.psi.evaluate(z) * kernel(eval_map(w.phi, z))
        coef, image = adjoint_on_kernel(w.psi, w.phi, point)
        rhs = coef * kernel_eval(space, image, z)
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(kernel(z))))
    return worst


def _kernel(space, point):
    return lambda z: kernel_eval(space, point, z)


def _scaled_kernel(space, point, coef):
    return lambda z: coef * kernel_eval(space, point, z)
