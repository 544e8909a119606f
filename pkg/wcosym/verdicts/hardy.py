"""
Hardy 空间 H²(B_N) 上的判定与构造

核心符号族：ψ(z) = a1/(1 − ⟨z, ā0⟩)^N，φ(z) = (a0 − Az)/(1 − ⟨z, ā0⟩)，A 对称。
在此族上判定酉性、自伴性与正规性，构造酉且 J-对称的 (Ψ, Φ)，
给出共轭变换后的符号，并检验仿射映射 σ(z) = Az + c 的 JW_{ψ_b,φ_b}-对称性。
"""

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from config import settings
from wcosym.errors import (
    NotSymmetric,
    PreconditionViolated,
    SingularIminusA,
    UnsupportedFamily,
)
from wcosym.maps.lfmap import (
    LinearFractionalMap,
    adjoint_map,
    affine_map,
    assoc_matrix,
    canonical,
    compose,
    eval_map,
    involution_heart,
    krein_multiplier,
    linear_map,
    make_heart_matrix,
    proportionality,
)
from wcosym.maps.linalg import as_cmat, as_cvec, frobenius, norm_sq, symmetry_defect
from wcosym.operators.compression import WeightedCompositionSpec
from wcosym.operators.conjugation import JCU, WPhiJ
from wcosym.operators.residuals import default_samples, kernel_symmetry_residual
from wcosym.spaces.kernels import SpaceKind, adjoint_on_kernel, affine_adjoint_symbols, kernel_eval
from wcosym.spaces.weights import Constant, KernelPower, NormalizedKernel, from_linear_form
from wcosym.verdicts.report import Verdict

logger = logging.getLogger(__name__)


def _tol(name, tolerances):
    return settings.tolerance(name, tolerances)


def _require_symmetric(a, tolerances=None):
    defect = symmetry_defect(a)
    if defect > _tol("symmetric", tolerances):
        raise NotSymmetric(f"‖A − Aᵀ‖_F = {defect:.3e}")


@dataclass(frozen=True, eq=False)
class SymbolFamily:
    """
    符号族参数 (a1, a0, A)

    Args:
        a1 (complex): 乘子系数
        a0: 开单位球内的向量
        A: N×N 矩阵
    """

    a1: complex
    a0: np.ndarray
    A: np.ndarray

    def __post_init__(self):
        a = as_cmat(self.A)
        object.__setattr__(self, 'a1', complex(self.a1))
        object.__setattr__(self, 'a0', as_cvec(self.a0, a.shape[0]))
        object.__setattr__(self, 'A', a)

    @property
    def dim(self):
        return self.A.shape[0]

    def psi(self):
        if not np.any(self.a0):
            return Constant(self.a1)
        return KernelPower(self.a1, self.a0, self.dim)

    def phi(self):
        return LinearFractionalMap(-self.A, self.a0, -self.a0.conj(), 1.0)

    def spec(self):
        return WeightedCompositionSpec(SpaceKind.hardy(self.dim), self.psi(), self.phi())

    @classmethod
    def from_spec(cls, w, tolerances=None):
        """
        从算子符号中识别族参数

        Raises:
            UnsupportedFamily: 符号不属于该族
        """
        tol = _tol("linear", tolerances)
        dim = w.dim
        mat = canonical(assoc_matrix(w.phi)).m
        if abs(mat[dim, dim] - 1.0) > tol:
            raise UnsupportedFamily("φ 的分母在原点消失")
        a = -mat[:dim, :dim]
        a0 = mat[:dim, dim]
        if np.linalg.norm(mat[dim, :dim] + a0) > tol:
            raise UnsupportedFamily("φ 的分母不是 1 − ⟨z, ā0⟩")
        psi = w.psi
        ell = psi.linear_form(dim)
        if np.linalg.norm(ell - a0) > tol:
            raise UnsupportedFamily("ψ 与 φ 的极点不一致")
        if np.any(a0) and psi.power != dim:
            raise UnsupportedFamily(f"ψ 的幂次应为 N={dim}，得到 {psi.power}")
        return cls(psi.coefficient, a0, a)


# ---------------------------------------------------------------------------
# 酉性、自伴性
# ---------------------------------------------------------------------------

def hardy_unitary_check(a1, a0, A, tolerances=None):
    """
    W_{ψ,φ} 为酉算子 ⇔ |a1| = (1−|a0|²)^(N/2)，Ā·A − ā0·a0ᵀ = (1−|a0|²)·I，A·ā0 = a0

    a0 = 0 时三个条件退化为 |a1| = 1 且 A 为酉矩阵

    Args:
        a1 (complex): 乘子系数
        a0: 开单位球内的向量
        A: 对称矩阵

    Returns:
        Verdict: 条件依次为 modulus、krein_block、fixed_vector

    Raises:
        NotSymmetric: A 不对称
    """
    family = SymbolFamily(a1, a0, A)
    _require_symmetric(family.A, tolerances)
    dim = family.dim
    a0, a = family.a0, family.A
    gap = 1.0 - norm_sq(a0)
    tol = _tol("condition", tolerances)

    verdict = Verdict("hardy_unitary")
    verdict.check("modulus", abs(abs(family.a1) - gap ** (dim / 2)), tol)
    block = a.conj() @ a - np.outer(a0.conj(), a0) - gap * np.eye(dim)
    verdict.check("krein_block", frobenius(block), tol)
    verdict.check("fixed_vector", float(np.linalg.norm(a @ a0.conj() - a0)), tol)
    verdict.diagnostics["krein_multiplier"] = krein_multiplier(assoc_matrix(family.phi()))
    verdict.diagnostics["expected_multiplier"] = 1.0 / gap
    return verdict


def hardy_hermitian_check(a1, a0, A, tolerances=None):
    """
    W_{ψ,φ} 自伴 ⇔ a1 为实数，a0 为实向量，A 为实矩阵

    Returns:
        Verdict: 条件依次为 a1_real、a0_real、A_real
    """
    family = SymbolFamily(a1, a0, A)
    _require_symmetric(family.A, tolerances)
    tol = _tol("real", tolerances)
    verdict = Verdict("hardy_hermitian")
    verdict.check("a1_real", abs(family.a1.imag), tol)
    verdict.check("a0_real", float(np.max(np.abs(family.a0.imag), initial=0.0)), tol)
    verdict.check("A_real", float(np.max(np.abs(family.A.imag), initial=0.0)), tol)
    return verdict


# ---------------------------------------------------------------------------
# 酉且 J-对称的 (Ψ, Φ)
# ---------------------------------------------------------------------------

class JsymChoice(str, Enum):
    ROTATION = "rotation"      # Ψ ≡ λ，Φ(z) = Uz
    INVOLUTION = "involution"  # Ψ = μ k_a^N 型，Φ = U∘φ_a


def build_unitary_Jsym(choice, params, tolerances=None):
    """
    构造使 W_{Ψ,Φ} 为酉且 J-对称的符号对

    Args:
        choice (JsymChoice | str): rotation 需要 lambda、U；involution 需要 mu、a、U
        params (dict): 参数，U 缺省为单位阵

    Returns:
        tuple: (Ψ, Φ)

    Raises:
        PreconditionViolated: 列出所有不满足的前置条件
    """
    choice = JsymChoice(choice)
    tol = _tol("unitary_symmetric", tolerances)
    violations = []

    if choice is JsymChoice.ROTATION:
        scalar = complex(params.get("lambda", 1.0))
        u = as_cmat(params["U"])
        dim = u.shape[0]
    else:
        scalar = complex(params.get("mu", 1.0))
        a = as_cvec(params["a"])
        dim = a.shape[0]
        u = as_cmat(params.get("U", np.eye(dim)), dim)

    if abs(abs(scalar) - 1.0) > tol:
        violations.append("scalar_modulus")
    if frobenius(u.conj().T @ u - np.eye(dim)) > tol:
        violations.append("U_unitary")
    if symmetry_defect(u) > tol:
        violations.append("U_symmetric")

    if choice is JsymChoice.ROTATION:
        if violations:
            raise PreconditionViolated(violations)
        return Constant(scalar), linear_map(u)

    if norm_sq(a) >= 1.0:
        violations.append("a_in_ball")
        raise PreconditionViolated(violations)
    if np.linalg.norm(u @ a - a.conj()) > _tol("condition", tolerances):
        violations.append("Ua_conj_a")
    # a 为实向量时与 make_heart_matrix(a) 相同
    heart = make_heart_matrix(a.real) if not np.any(a.imag) else involution_heart(a)
    if symmetry_defect(u @ heart) > _tol("symmetric", tolerances):
        violations.append("UT_symmetric")
    if violations:
        raise PreconditionViolated(violations)

    psi = NormalizedKernel(scalar, a, dim)
    phi = LinearFractionalMap(-(u @ heart), u @ a, -a, 1.0)
    logger.debug(f"构造酉 J-对称符号: a={a}, μ={scalar}")
    return psi, phi


# ---------------------------------------------------------------------------
# 共轭变换
# ---------------------------------------------------------------------------

def conjugate_symbols(w, c, tolerances=None):
    """
    把 J-对称的族符号 (ψ, φ) 变换为关于 C 对称的 (ψ̃, φ̃)

    C = WPhiJ(Ψ, Φ)：ψ̃ = Ψ·ψ∘Φ，φ̃ = φ∘Φ；C = JCU(u)：ψ̃ = ψ∘u，φ̃ = φ∘u

    Args:
        w (WeightedCompositionSpec): 族内符号
        c (JCU | WPhiJ): 共轭算子

    Returns:
        tuple: (ψ̃, φ̃)

    Raises:
        UnsupportedFamily: 符号不在族内，或 Ψ 与 Φ 的分母不匹配
    """
    SymbolFamily.from_spec(w, tolerances)
    psi, phi = w.psi, w.phi
    dim = w.dim
    ell = psi.linear_form(dim)

    if isinstance(c, JCU):
        return from_linear_form(psi.coefficient, c.u.T @ ell, psi.power), compose(phi, linear_map(c.u))

    if not isinstance(c, WPhiJ):
        raise UnsupportedFamily(f"不支持的共轭类型: {type(c).__name__}")

    big_psi, big_phi = c.psi, c.phi
    big_ell = big_psi.linear_form(dim)
    new_phi = compose(phi, big_phi)
    if psi.power == 0:
        return from_linear_form(big_psi.coefficient * psi.coefficient, big_ell, big_psi.power), new_phi

    # ψ∘Φ = coef·(gᵀz + D)^p/(δ^p·(1 − ℓ̃ᵀz)^p)，要求 Ψ 的分母与 Φ 的分母成比例
    tol = _tol("linear", tolerances)
    g = big_phi.c.conj()
    d = big_phi.d
    matched = np.linalg.norm(g + d * big_ell) <= tol * (1.0 + abs(d))
    if big_psi.power != psi.power:
        matched = matched and np.linalg.norm(g) <= tol and np.linalg.norm(big_ell) <= tol
    if not matched:
        raise UnsupportedFamily("Ψ 的分母与 Φ 的分母不成比例")
    delta = d - complex(ell @ big_phi.b)
    if abs(delta) < settings.tolerance("denominator"):
        raise UnsupportedFamily("ψ∘Φ 在原点有极点")
    new_ell = -(g - big_phi.a.T @ ell) / delta
    coefficient = big_psi.coefficient * psi.coefficient * (d / delta) ** psi.power
    return from_linear_form(coefficient, new_ell, psi.power), new_phi


# ---------------------------------------------------------------------------
# 仿射映射的 JW 对称性
# ---------------------------------------------------------------------------

def affine_adjoint_defect(A, c, samples=None):
    """
    C_σ* K_w 的两种算法之差，σ(z) = Az + c

    一边是 adjoint_on_kernel 给出的 K_{σ(w)}，另一边是 affine_adjoint_symbols 给出的
    M_ψ C_φ K_w，在 (z, w) 点对上取 max |差|/(1 + |K_w(z)|)
    """
    a = as_cmat(A)
    space = SpaceKind.hardy(a.shape[0])
    sigma = affine_map(a, c)
    psi, phi = affine_adjoint_symbols(a, c)
    samples = default_samples(space.dim) if samples is None else samples
    worst = 0.0
    for z, point in samples:
        coef, image = adjoint_on_kernel(Constant(1.0), sigma, point)
        direct = coef * kernel_eval(space, image, z)
        composed = psi.evaluate(z) * kernel_eval(space, point, eval_map(phi, z))
        worst = max(worst, abs(direct - composed) / (1.0 + abs(kernel_eval(space, point, z))))
    return float(worst)


def jw_affine_symmetry_check(A, c, samples=None, tolerances=None):
    """
    σ(z) = Az + c，b = (I − A)⁻¹c；b 为球内实向量且 Ab = λb 时 C_σ 为 JW_{ψ_b,φ_b}-对称

    成立时还计算 Tc = c、AT = TA 两个辅助恒等式以及核层面的对称残差
    另以 affine_adjoint_defect 独立核对 C_σ* 在核上的作用

    Args:
        A: 对称矩阵
        c: 平移向量
        samples (list, optional): 核残差的 (z, w) 点对

    Returns:
        Verdict: 条件依次为 b_real、b_in_ball、eigenvector

    Raises:
        NotSymmetric: A 不对称
        SingularIminusA: 1 是 A 的特征值
    """
    a = as_cmat(A)
    dim = a.shape[0]
    c = as_cvec(c, dim)
    _require_symmetric(a, tolerances)
    shifted = np.eye(dim) - a
    if abs(np.linalg.det(shifted)) < settings.tolerance("real"):
        raise SingularIminusA("det(I − A) ≈ 0")
    b = np.linalg.solve(shifted, c)

    verdict = Verdict("jw_affine_symmetric")
    verdict.diagnostics["b"] = b
    verdict.check("b_real", float(np.max(np.abs(b.imag), initial=0.0)), _tol("real", tolerances))
    # 严格小于 1：‖b‖ = 1 时 φ_b 无定义
    verdict.check("b_in_ball", float(np.sqrt(norm_sq(b))), np.nextafter(1.0, 0.0))
    size = norm_sq(b)
    if size > 0:
        rayleigh = complex(np.vdot(b, a @ b)) / size
        defect = float(np.linalg.norm(a @ b - rayleigh * b))
        bound = _tol("eigenvector", tolerances) * np.linalg.norm(a, 2) * np.sqrt(size)
        verdict.diagnostics["lambda"] = rayleigh
    else:
        defect, bound = 0.0, 0.0
    verdict.check("eigenvector", defect, bound)

    if verdict.holds:
        real_b = b.real
        heart = make_heart_matrix(real_b)
        verdict.diagnostics["Tc_defect"] = float(np.linalg.norm(heart @ c - c))
        verdict.diagnostics["AT_commute_defect"] = frobenius(a @ heart - heart @ a)
        psi_b, phi_b = build_unitary_Jsym(JsymChoice.INVOLUTION, {"mu": 1.0, "a": real_b}, tolerances)
        w = WeightedCompositionSpec(SpaceKind.hardy(dim), Constant(1.0), affine_map(a, c))
        verdict.diagnostics["kernel_residual"] = kernel_symmetry_residual(w, WPhiJ(psi_b, phi_b), samples)
        verdict.diagnostics["adjoint_route_defect"] = affine_adjoint_defect(a, c, samples)
    return verdict


# ---------------------------------------------------------------------------
# 正规性
# ---------------------------------------------------------------------------

def normality_symbols(a1, a0, A, U):
    """ψ(z) = a1/(1 − ⟨Uz, ā0⟩)^N，φ(z) = (a0 − AUz)/(1 − ⟨Uz, ā0⟩)"""
    a = as_cmat(A)
    u = as_cmat(U, a.shape[0])
    a0 = as_cvec(a0, a.shape[0])
    ell = u.T @ a0
    psi = from_linear_form(a1, ell, a.shape[0])
    phi = LinearFractionalMap(-(a @ u), a0, -ell.conj(), 1.0)
    return psi, phi


def hardy_normality_check(a1, a0, A, U, tolerances=None):
    """
    W_{ψ,φ} 正规 ⇔ 以下两条成立：
    (i)  conj(UA)·A·U − conj(U·a0)·a0ᵀ·U = A·Ā − a0·a0*
    (ii) conj(UA)·a0 − conj(U·a0) = A·ā0 − a0

    另给出独立诊断：伴随映射 σ 与 φ 是否交换，即 m_{φ∘σ} 是否与 m_{σ∘φ} 成比例

    Args:
        a1 (complex): 乘子系数
        a0: 开单位球内的向量
        A: 对称矩阵
        U: 酉对称矩阵

    Returns:
        Verdict: 条件依次为 condition_i、condition_ii

    Raises:
        PreconditionViolated: A 不对称、U 非酉对称或 a0 不在球内
    """
    a = as_cmat(A)
    dim = a.shape[0]
    u = as_cmat(U, dim)
    a0 = as_cvec(a0, dim)
    violations = []
    if symmetry_defect(a) > _tol("symmetric", tolerances):
        violations.append("A_symmetric")
    if frobenius(u.conj().T @ u - np.eye(dim)) > _tol("unitary_symmetric", tolerances):
        violations.append("U_unitary")
    if symmetry_defect(u) > _tol("unitary_symmetric", tolerances):
        violations.append("U_symmetric")
    if norm_sq(a0) >= 1.0:
        violations.append("a0_in_ball")
    if violations:
        raise PreconditionViolated(violations)

    tol = _tol("condition", tolerances)
    ua_bar = (u @ a).conj()
    ua0_bar = (u @ a0).conj()
    verdict = Verdict("hardy_normal")
    lhs_i = ua_bar @ a @ u - np.outer(ua0_bar, a0) @ u
    rhs_i = a @ a.conj() - np.outer(a0, a0.conj())
    verdict.check("condition_i", frobenius(lhs_i - rhs_i), tol)
    lhs_ii = ua_bar @ a0 - ua0_bar
    rhs_ii = a @ a0.conj() - a0
    verdict.check("condition_ii", float(np.linalg.norm(lhs_ii - rhs_ii)), tol)

    _, phi = normality_symbols(a1, a0, a, u)
    sigma = adjoint_map(phi)
    k, residual = _commutation(phi, sigma)
    verdict.diagnostics.update({
        "commutation_k": k,
        "commutation_residual": residual,
        "commutes": residual <= tol,
    })
    verdict.diagnostics["routes_agree"] = verdict.holds == verdict.diagnostics["commutes"]
    if not verdict.diagnostics["routes_agree"]:
        logger.warning(f"正规性两种判定不一致: 条件 {verdict.holds}, 交换性诊断 {residual:.3e}")
    return verdict


def _commutation(phi, sigma):
    m_phi, m_sigma = assoc_matrix(phi), assoc_matrix(sigma)
    return proportionality(m_phi @ m_sigma, m_sigma @ m_phi)

