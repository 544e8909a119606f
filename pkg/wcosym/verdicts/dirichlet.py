"""
Dirichlet 空间 D(B_N) 上的分类判定
J-对称、JC_{Uz}-对称、自伴与酉的加权复合算子都只能是 ψ ≡ c、φ(z) = Sz 的形式
"""

import logging

import numpy as np

from config import settings
from wcosym.maps.lfmap import assoc_matrix, canonical
from wcosym.maps.linalg import hermitian_defect, symmetry_defect, unitary_defect
from wcosym.operators.conjugation import JCU
from wcosym.spaces.kernels import require_dirichlet
from wcosym.verdicts.report import Verdict

logger = logging.getLogger(__name__)


def _tol(name, tolerances):
    return settings.tolerance(name, tolerances)


def linear_part(phi):
    """
    在规范化相伴矩阵上拆出 (S, ‖B‖, ‖C‖)

    Returns:
        tuple: (S, 平移部分范数, 分母线性部分范数)
    """
    mat = canonical(assoc_matrix(phi)).m
    dim = phi.dim
    return mat[:dim, :dim], float(np.linalg.norm(mat[:dim, dim])), float(np.linalg.norm(mat[dim, :dim]))


def _constant_and_linear(verdict, w, tolerances):
    """公共条件：ψ 为常数、φ 为线性；返回 (c, S)"""
    dim = w.dim
    psi = w.psi
    drift = 0.0 if psi.power == 0 else float(np.linalg.norm(psi.linear_form(dim)))
    verdict.check("psi_constant", drift, _tol("linear", tolerances))
    s, shift, pole = linear_part(w.phi)
    verdict.check("phi_linear", max(shift, pole), _tol("linear", tolerances))
    c = psi.evaluate(np.zeros(dim))
    verdict.diagnostics.update({"c": c, "S": s})
    return c, s


def _contraction(verdict, s, tolerances):
    verdict.check("S_contraction", float(np.linalg.norm(s, 2)), 1.0 + _tol("contraction", tolerances))


def classify_dirichlet_J(w, tolerances=None):
    """
    W_{ψ,φ} 在 D(B_N) 上 J-对称 ⇔ ψ ≡ c 且 φ(z) = Sz，S 对称且 ‖S‖ ≤ 1

    Args:
        w (WeightedCompositionSpec): 算子符号
        tolerances (dict, optional): 容差覆盖

    Returns:
        Verdict: 判定结果，条件依次为 psi_constant、phi_linear、S_symmetric、S_contraction

    Raises:
        WrongSpace: 空间不是 Dirichlet 空间
    """
    require_dirichlet(w.space)
    verdict = Verdict("dirichlet_J_symmetric")
    _, s = _constant_and_linear(verdict, w, tolerances)
    verdict.check("S_symmetric", symmetry_defect(s), _tol("symmetric", tolerances))
    _contraction(verdict, s, tolerances)
    logger.debug(verdict.summary())
    return verdict


def classify_dirichlet_JCU(w, u, tolerances=None):
    """
    W_{ψ,φ} 在 D(B_N) 上 JC_{Uz}-对称 ⇔ ψ ≡ c 且 φ(z) = S·Ū·z，
    S 对称、‖S‖ ≤ 1 且 S·Ū = Ū·S

    Args:
        w (WeightedCompositionSpec): 算子符号
        u: 酉对称矩阵

    Returns:
        Verdict: 条件依次为 psi_constant、phi_linear、S_symmetric、S_contraction、SU_commute；
            diagnostics 中 conjugation_symmetric 为直接推出的判定，routes_agree 记录两者是否一致

    Raises:
        WrongSpace: 空间不是 Dirichlet 空间
        InvalidConjugation: u 不是酉对称矩阵
    """
    require_dirichlet(w.space)
    u = JCU(u).u
    u_bar = u.conj()
    verdict = Verdict("dirichlet_JCU_symmetric")
    _, m = _constant_and_linear(verdict, w, tolerances)
    # φ'(0) = S·Ū，且 Ū·U = I
    s = m @ u
    verdict.diagnostics["S"] = s
    verdict.check("S_symmetric", symmetry_defect(s), _tol("symmetric", tolerances))
    _contraction(verdict, s, tolerances)
    commutator = np.linalg.norm(s @ u_bar - u_bar @ s)
    verdict.check("SU_commute", commutator, _tol("symmetric", tolerances))

    # 直接由 Cf(z) = conj(f(conj(Uz))) 得 TC = CT* ⇔ U·φ'(0) 对称，即 S 与 U² 交换；
    # U 没有互为相反数的特征值时与 SU_commute 一致，否则后者更严（如 U² = I）
    defect = symmetry_defect(u @ m)
    shared = all(c.holds for c in verdict.conditions if c.name not in ("S_symmetric", "SU_commute"))
    verdict.diagnostics["conjugation_symmetric_defect"] = defect
    verdict.diagnostics["conjugation_symmetric"] = shared and defect <= _tol("symmetric", tolerances)
    verdict.diagnostics["routes_agree"] = verdict.holds == verdict.diagnostics["conjugation_symmetric"]
    if not verdict.diagnostics["routes_agree"]:
        logger.warning(f"JC_Uz 对称两种判定不一致: 条件 {verdict.holds}, U·φ'(0) 对称缺陷 {defect:.3e}")
    return verdict


def classify_dirichlet_hermitian(w, tolerances=None):
    """
    W_{ψ,φ} 在 D(B_N) 上自伴 ⇔ ψ ≡ c 为实常数，φ(z) = Hz，H 自伴且 ‖H‖ ≤ 1

    ψ ≡ 1 时即复合算子 C_φ 自伴的判定
    """
    require_dirichlet(w.space)
    verdict = Verdict("dirichlet_hermitian")
    c, s = _constant_and_linear(verdict, w, tolerances)
    verdict.check("c_real", abs(np.imag(c)), _tol("real", tolerances))
    verdict.check("S_hermitian", hermitian_defect(s), _tol("symmetric", tolerances))
    _contraction(verdict, s, tolerances)
    return verdict


def classify_dirichlet_unitary(w, tolerances=None):
    """W_{ψ,φ} 在 D(B_N) 上为酉算子 ⇔ ψ ≡ c，|c| = 1，φ(z) = Uz 且 U 为酉矩阵"""
    require_dirichlet(w.space)
    verdict = Verdict("dirichlet_unitary")
    c, s = _constant_and_linear(verdict, w, tolerances)
    verdict.check("modulus", abs(abs(c) - 1.0), _tol("condition", tolerances))
    verdict.check("S_unitary", unitary_defect(s), _tol("condition", tolerances))
    return verdict
