"""
验收检验组
每一组把判定函数的结论与独立的数值残差（矩阵压缩、核恒等式、有限差分）对照，
实例来自 wcosym.verdicts.families 的固定种子族
"""

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.special import comb
from tqdm import tqdm

from wcosym.maps.lfmap import LinearFractionalMap
from wcosym.maps.linalg import sample_ball
from wcosym.operators.compression import WeightedCompositionSpec, build_compression
from wcosym.operators.conjugation import JCU, PlainJ, WPhiJ, build_conjugation
from wcosym.operators.residuals import (
    default_samples,
    hermitian_residual,
    kernel_hermitian_residual,
    kernel_symmetry_residual,
    symmetry_residual_matrix,
    unitary_residual,
)
from wcosym.series.multi_index import count_monomials_leq, grlex_basis
from wcosym.series.power_series import PowerSeries, expand_log_reciprocal, expand_reciprocal_linear
from wcosym.spaces.kernels import (
    SpaceKind,
    adjoint_on_deriv_kernel,
    adjoint_on_second_deriv_kernel,
    monomial_norm_sq,
)
from wcosym.spaces.weights import KernelPower
from wcosym.verdicts import families
from wcosym.verdicts.dirichlet import (
    classify_dirichlet_hermitian,
    classify_dirichlet_J,
    classify_dirichlet_JCU,
)
from wcosym.verdicts.hardy import (
    build_unitary_Jsym,
    hardy_hermitian_check,
    hardy_normality_check,
    hardy_unitary_check,
    jw_affine_symmetry_check,
)

logger = logging.getLogger(__name__)

POSITIVE_RESIDUAL = 1e-10
NEGATIVE_RESIDUAL = 1e-4
SCALE = {"full": 1.0, "quick": 0.2}


@dataclass
class CriterionResult:
    """一组验收检验的结果，failures 记录不一致的实例"""

    name: str
    total: int = 0
    failures: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self):
        return self.total - len(self.failures)

    @property
    def holds(self):
        return not self.failures

    def record(self, label, ok, detail=None):
        self.total += 1
        if not ok:
            self.failures.append({"index": self.total - 1, "label": label, "detail": detail})

    def to_dict(self):
        return {"name": self.name, "holds": self.holds, "passed": self.passed, "total": self.total,
                "failures": self.failures, "elapsed_s": round(self.elapsed, 3)}


def _agrees(expected, residual, verdict_holds, positive=POSITIVE_RESIDUAL):
    """判定结论与残差两条路径一致"""
    if expected:
        return verdict_holds and residual < positive
    return (not verdict_holds) and residual > NEGATIVE_RESIDUAL


# ---------------------------------------------------------------------------
# Dirichlet 空间分类
# ---------------------------------------------------------------------------

def dirichlet_J_agreement(count=200, seed=0, degree=8):
    result = CriterionResult("dirichlet_J")
    space = SpaceKind.dirichlet(2)
    c = build_conjugation(PlainJ(), space, degree)
    for inst in families.dirichlet_J_family(count, seed):
        w = inst.payload["w"]
        verdict = classify_dirichlet_J(w)
        residual = symmetry_residual_matrix(build_compression(w, degree), c)
        result.record(inst.label, _agrees(inst.expected, residual, verdict.holds),
                      {"residual": residual, "witness": verdict.witness})
    return result


def dirichlet_JCU_agreement(count=100, seed=1, degree=8):
    result = CriterionResult("dirichlet_JCU")
    space = SpaceKind.dirichlet(2)
    for inst in families.dirichlet_JCU_family(count, seed):
        w, u = inst.payload["w"], inst.payload["u"]
        verdict = classify_dirichlet_JCU(w, u)
        c = build_conjugation(JCU(u), space, degree)
        residual = symmetry_residual_matrix(build_compression(w, degree), c)
        result.record(inst.label, _agrees(inst.expected, residual, verdict.holds),
                      {"residual": residual, "witness": verdict.witness})
    return result


def hermitian_agreement(count=100, seed=2, degree=8, sample_count=100):
    """Dirichlet 用矩阵残差，Hardy 用核恒等式 W K_w = W* K_w"""
    result = CriterionResult("hermitian")
    for inst in families.dirichlet_hermitian_family(count, seed):
        w = inst.payload["w"]
        verdict = classify_dirichlet_hermitian(w)
        residual = hermitian_residual(build_compression(w, degree))
        result.record(f"dirichlet/{inst.label}", _agrees(inst.expected, residual, verdict.holds, 1e-9),
                      {"residual": residual})
    samples = default_samples(2, sample_count, seed)
    for inst in families.hardy_hermitian_family(count, seed):
        family = inst.payload["family"]
        verdict = hardy_hermitian_check(family.a1, family.a0, family.A)
        residual = kernel_hermitian_residual(family.spec(), samples)
        result.record(f"hardy/{inst.label}", _agrees(inst.expected, residual, verdict.holds, 1e-9),
                      {"residual": residual})
    return result


# ---------------------------------------------------------------------------
# Hardy 空间
# ---------------------------------------------------------------------------

def unitary_agreement(count=25, seed=3, degrees=(4, 6, 8)):
    """a0 = 0 的旋转族在各截断次数下酉；圆盘自同构满足三个条件且 |k|² = 1/(1−|a0|²)"""
    result = CriterionResult("hardy_unitary")
    for inst in families.unitary_rotation_family(count, seed):
        family = inst.payload["family"]
        verdict = hardy_unitary_check(family.a1, family.a0, family.A)
        residuals = [unitary_residual(build_compression(family.spec(), d)) for d in degrees]
        ok = verdict.holds and max(residuals) < POSITIVE_RESIDUAL
        result.record("rotation", ok, {"residuals": residuals})
    for inst in families.disk_automorphism_family(count, seed):
        family = inst.payload["family"]
        verdict = hardy_unitary_check(family.a1, family.a0, family.A)
        k = verdict.diagnostics["krein_multiplier"]
        expected = verdict.diagnostics["expected_multiplier"]
        ok = verdict.holds and k is not None and abs(k - expected) <= 1e-12 * expected
        result.record("disk_automorphism", ok, {"krein_multiplier": k, "expected": expected})
    return result


def unitary_jsym_agreement(count=50, seed=4, degrees=(4, 6, 8), leading_degree=2, sample_count=100):
    """
    酉 J-对称构造：W_{Ψ,Φ} 在核层面 J-对称，
    WPhiJ 共轭在前导块上的对合残差随 D 单调不增且严格下降
    """
    result = CriterionResult("unitary_Jsym")
    samples = default_samples(2, sample_count, seed)
    for inst in families.unitary_jsym_family(count, seed):
        psi, phi = build_unitary_Jsym(inst.payload["choice"], inst.payload["params"])
        space = SpaceKind.hardy(phi.dim)
        residual = kernel_symmetry_residual(WeightedCompositionSpec(space, psi, phi), PlainJ(), samples)
        conjugation = WPhiJ(psi, phi)
        leading = count_monomials_leq(space.dim, leading_degree)
        trail = [build_conjugation(conjugation, space, d).involution_residual(leading) for d in degrees]
        monotone = all(b <= a + 1e-12 for a, b in zip(trail, trail[1:])) and trail[-1] < trail[0]
        result.record(inst.label, residual < 1e-9 and monotone, {"kernel_residual": residual, "involution": trail})
    return result


def jw_affine_agreement(count=50, seed=5, sample_count=100):
    result = CriterionResult("jw_affine")
    samples = default_samples(2, sample_count, seed)
    for inst in families.jw_affine_family(count, seed):
        verdict = jw_affine_symmetry_check(inst.payload["A"], inst.payload["c"], samples)
        if inst.expected:
            diag = verdict.diagnostics
            ok = (verdict.holds and diag["kernel_residual"] < POSITIVE_RESIDUAL
                  and diag["Tc_defect"] <= 1e-12 and diag["AT_commute_defect"] <= 1e-12)
            detail = {k: diag.get(k) for k in ("kernel_residual", "Tc_defect", "AT_commute_defect")}
        else:
            ok = (not verdict.holds) and verdict.witness == inst.label
            detail = {"witness": verdict.witness}
        result.record(inst.label, ok, detail)
    return result


def normality_agreement(count=50, seed=6):
    """两条判定路径必须一致；不一致的实例记为失败"""
    result = CriterionResult("hardy_normality")
    for inst in families.normality_family(count, seed):
        p = inst.payload
        verdict = hardy_normality_check(p["a1"], p["a0"], p["A"], p["U"])
        diag = verdict.diagnostics
        ok = verdict.holds == inst.expected and diag["routes_agree"]
        if inst.expected:
            ok = ok and abs(diag["commutation_k"] - 1.0) <= 1e-10
        result.record(inst.label, ok, {"k": diag["commutation_k"], "residual": diag["commutation_residual"]})
    return result


# ---------------------------------------------------------------------------
# 核与级数
# ---------------------------------------------------------------------------

def binomial_norm_sq(space, alpha):
    """由核的二项式展开独立算出 ‖z^α‖²"""
    n, k = len(alpha), sum(alpha)
    multinomial = math.factorial(k)
    for a in alpha:
        multinomial //= math.factorial(a)
    if space.is_dirichlet:
        return 1.0 if k == 0 else float(k) / multinomial
    return 1.0 / (comb(n - 1 + k, k, exact=True) * multinomial)


def _kernel_series(space, w, degree):
    if space.is_dirichlet:
        return PowerSeries.constant(1.0, space.dim, degree) + expand_log_reciprocal(w, degree)
    return expand_reciprocal_linear(w, space.dim, degree)


def kernel_oracle_agreement(count=50, seed=7, degree=8, poly_degree=4):
    """单项式范数与二项式展开一致；⟨f, K_w⟩ = f(w)"""
    result = CriterionResult("kernel_series")
    for dim in (1, 2, 3):
        for kind in ("dirichlet", "hardy"):
            space = SpaceKind(kind, dim)
            worst = max(abs(monomial_norm_sq(space, a) / binomial_norm_sq(space, a) - 1.0)
                        for a in grlex_basis(dim, degree))
            result.record(f"norms/{kind}/N{dim}", worst <= 1e-12, {"relative": worst})

    rng = np.random.default_rng(seed)
    for i in range(count):
        space = SpaceKind("dirichlet" if i % 2 == 0 else "hardy", 1 + i % 3)
        size = count_monomials_leq(space.dim, poly_degree)
        f = PowerSeries(space.dim, poly_degree, families.random_complex(rng, size))
        w = sample_ball(space.dim, 1, 0.8, int(rng.integers(1 << 31)))[0]
        kernel = _kernel_series(space, w, poly_degree)
        weights = np.array([monomial_norm_sq(space, a) for a in grlex_basis(space.dim, poly_degree)])
        pairing = complex(np.sum(f.coeffs * kernel.coeffs.conj() * weights))
        error = abs(pairing - f.evaluate(w))
        result.record(f"reproducing/{space.kind.value}", error <= 1e-10 * (1.0 + abs(f.evaluate(w))),
                      {"error": error})
    return result


def _random_instance(rng, dim):
    a = 0.3 * families.scaled(families.random_complex(rng, (dim, dim)), 1.0)
    b = 0.2 * families.unit_vector(rng, dim)
    c = 0.1 * families.unit_vector(rng, dim)
    phi = LinearFractionalMap(a, b, c, 1.0)
    psi = KernelPower(families.random_constant(rng), 0.3 * families.unit_vector(rng, dim), 2)
    return psi, phi


def _fd_first(g, a, k, h=1e-5):
    e = np.zeros_like(a)
    e[k] = h
    return (g(a + e) - g(a - e)) / (2 * h)


def _fd_second(g, a, k, l, h=1e-4):
    ek, el = np.zeros_like(a), np.zeros_like(a)
    ek[k] = h
    el[l] = h
    return (g(a + ek + el) - g(a + ek - el) - g(a - ek + el) + g(a - ek - el)) / (4 * h * h)


def derivative_adjoint_agreement(count=50, seed=8, dim=2, poly_degree=3):
    """
    导数核的伴随展开：⟨f, W* K_a^{D_k}⟩ = ∂_k(ψ·f∘φ)(a)，二阶同理，右端用中心差分计算
    """
    result = CriterionResult("derivative_kernels")
    rng = np.random.default_rng(seed)
    size = count_monomials_leq(dim, poly_degree)
    for _ in range(count):
        psi, phi = _random_instance(rng, dim)
        w = WeightedCompositionSpec(SpaceKind.dirichlet(dim), psi, phi)
        f = PowerSeries(dim, poly_degree, families.random_complex(rng, size))
        g = w.apply(f.evaluate)
        a = 0.5 * families.unit_vector(rng, dim) * rng.uniform()
        k, l = int(rng.integers(dim)), int(rng.integers(dim))

        first = adjoint_on_deriv_kernel(psi, phi, a, k).pair(f)
        oracle = _fd_first(g, a, k)
        error = abs(first - oracle) / (1.0 + abs(oracle))
        result.record("first_order", error <= 1e-7, {"error": error})

        second = adjoint_on_second_deriv_kernel(psi, phi, a, k, l).pair(f)
        oracle = _fd_second(g, a, k, l)
        error = abs(second - oracle) / (1.0 + abs(oracle))
        result.record("second_order", error <= 1e-5, {"error": error})
    return result


# (名称, 函数, 完整规模下的实例数)
CRITERIA = (
    ("dirichlet_J", dirichlet_J_agreement, 200),
    ("dirichlet_JCU", dirichlet_JCU_agreement, 100),
    ("hermitian", hermitian_agreement, 100),
    ("hardy_unitary", unitary_agreement, 25),
    ("unitary_Jsym", unitary_jsym_agreement, 50),
    ("jw_affine", jw_affine_agreement, 50),
    ("hardy_normality", normality_agreement, 50),
    ("kernel_series", kernel_oracle_agreement, 50),
    ("derivative_kernels", derivative_adjoint_agreement, 50),
)


def run_suite(mode="full", only=None, show_progress=True):
    """
    运行验收检验组

    Args:
        mode (str): full 为完整规模，quick 把实例数缩小到五分之一
        only (list, optional): 只运行指定名称的检验组
        show_progress (bool): 是否显示进度条

    Returns:
        list: CriterionResult 列表
    """
    scale = SCALE[mode]
    selected = [entry for entry in CRITERIA if not only or entry[0] in only]
    results = []
    progress = tqdm(selected, desc="验收检验", unit="组", disable=not show_progress)
    for name, fn, count in progress:
        progress.set_description(f"验收检验: {name}")
        start = time.perf_counter()
        try:
            result = fn(max(2, int(round(count * scale))))
        except Exception as e:
            logger.error(f"验收检验 {name} 运行失败: {str(e)}")
            raise
        result.elapsed = time.perf_counter() - start
        logger.info(f"验收检验 {name}: {result.passed}/{result.total}")
        results.append(result)
    return results
