"""
共轭算子（反线性、等距的对合）

三种形式：
- PlainJ：Jf(z) = conj(f(conj z))
- JCU(u)：C_{uz}∘J，即 f ↦ conj(f(conj(uz)))，u 为酉对称矩阵
- WPhiJ(Ψ, Φ)：W_{Ψ,Φ}∘J，即 f ↦ Ψ·conj(f(conj Φ))
"""

import logging
from dataclasses import dataclass

import numpy as np

from config import settings
from wcosym.errors import InvalidConjugation
from wcosym.maps.lfmap import LinearFractionalMap, eval_map, linear_map
from wcosym.maps.linalg import as_cmat, frobenius, frozen, symmetry_defect, unitary_defect
from wcosym.operators.compression import WeightedCompositionSpec, build_compression
from wcosym.series.multi_index import count_monomials_leq
from wcosym.spaces.weights import Constant, WeightSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlainJ:
    kind = "plain_j"

    def to_dict(self):
        return {"type": self.kind}


@dataclass(frozen=True, eq=False)
class JCU:
    """C_{uz}∘J，构造时检查 u 酉且对称"""

    u: np.ndarray
    kind = "jcu"

    def __post_init__(self):
        u = as_cmat(self.u)
        tol = settings.tolerance("unitary_symmetric")
        if symmetry_defect(u) > tol:
            raise InvalidConjugation(f"u 不对称: ‖u − uᵀ‖ = {symmetry_defect(u):.3e}")
        defect = frobenius(u @ u.conj() - np.eye(u.shape[0]))
        if defect > tol:
            raise InvalidConjugation(f"u·conj(u) ≠ I: 残差 {defect:.3e}")
        object.__setattr__(self, 'u', frozen(u))

    @property
    def dim(self):
        return self.u.shape[0]

    def to_dict(self):
        return {"type": self.kind, "u": [[[float(x.real), float(x.imag)] for x in row] for row in self.u]}


@dataclass(frozen=True, eq=False)
class WPhiJ:
    """W_{Ψ,Φ}∘J；(Ψ, Φ) 通常来自 build_unitary_Jsym"""

    psi: WeightSpec
    phi: LinearFractionalMap
    kind = "wphij"

    @property
    def dim(self):
        return self.phi.dim

    def to_dict(self):
        from wcosym.jobs.spec import serialize_map
        return {"type": self.kind, "Psi": self.psi.to_dict(), "Phi": serialize_map(self.phi)}


@dataclass(frozen=True, eq=False)
class AntiLinearCompression:
    """
    反线性算子在正交基下的表示 v ↦ m·conj(v)

    exact 为 False 表示压缩不与 P_D 交换（如 WPhiJ），残差只作报告
    """

    m: np.ndarray
    exact: bool = True

    def __post_init__(self):
        object.__setattr__(self, 'm', frozen(as_cmat(self.m)))

    @property
    def size(self):
        return self.m.shape[0]

    def apply(self, coeffs):
        return self.m @ np.conj(np.asarray(coeffs, dtype=complex))

    def involution_residual(self, leading=None):
        """‖(m·conj(m))[L, L] − I‖_F，L 为前导块行数"""
        n = self.size if leading is None else leading
        square = self.m[:n, :] @ self.m.conj()[:, :n]
        return frobenius(square - np.eye(n))

    def isometry_residual(self, leading=None):
        """‖(m*·m)[L, L] − I‖_F"""
        n = self.size if leading is None else leading
        return unitary_defect(self.m[:, :n])


def build_conjugation(conjugation, space, degree=None):
    """
    构建共轭算子的有限表示

    Args:
        conjugation (PlainJ | JCU | WPhiJ): 共轭算子
        space (SpaceKind): 函数空间
        degree (int, optional): 截断次数 D

    Returns:
        AntiLinearCompression: m 及精确性标记

    Raises:
        InvalidConjugation: PlainJ/JCU 的对合或等距残差超过容差
    """
    degree = settings.default_degree_cap(space.dim) if degree is None else int(degree)
    if isinstance(conjugation, PlainJ):
        size = count_monomials_leq(space.dim, degree)
        return AntiLinearCompression(np.eye(size, dtype=complex), exact=True)

    if isinstance(conjugation, JCU):
        w = WeightedCompositionSpec(space, Constant(1.0), linear_map(conjugation.u))
        result = AntiLinearCompression(build_compression(w, degree).matrix, exact=True)
        tol = settings.tolerance("conjugation")
        involution, isometry = result.involution_residual(), result.isometry_residual()
        if involution > tol or isometry > tol:
            logger.error(f"JCU 共轭校验失败: 对合残差 {involution:.3e}, 等距残差 {isometry:.3e}")
            raise InvalidConjugation(f"对合残差 {involution:.3e}，等距残差 {isometry:.3e}")
        return result

    if isinstance(conjugation, WPhiJ):
        w = WeightedCompositionSpec(space, conjugation.psi, conjugation.phi)
        result = AntiLinearCompression(build_compression(w, degree).matrix, exact=False)
        logger.info(f"WPhiJ 压缩（D={degree}）: 对合残差 {result.involution_residual():.3e}, "
                    f"等距残差 {result.isometry_residual():.3e}")
        return result

    raise InvalidConjugation(f"未知的共轭类型: {type(conjugation).__name__}")


def apply_conjugation(conjugation, f):
    """
    共轭算子作用在函数（可调用对象）上

    Returns:
        callable: z ↦ (Cf)(z)
    """
    if isinstance(conjugation, PlainJ):
        return lambda z: np.conj(f(np.conj(z)))
    if isinstance(conjugation, JCU):
        u = conjugation.u
        return lambda z: np.conj(f(np.conj(u @ np.asarray(z, dtype=complex))))
    if isinstance(conjugation, WPhiJ):
        psi, phi = conjugation.psi, conjugation.phi
        return lambda z: psi.evaluate(z) * np.conj(f(np.conj(eval_map(phi, z))))
    raise InvalidConjugation(f"未知的共轭类型: {type(conjugation).__name__}")
