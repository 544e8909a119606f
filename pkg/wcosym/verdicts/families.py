"""
带固定种子的实例族生成器

每个族交替生成满足判定条件的正例和只破坏一个条件的反例，
反例的扰动幅度为 PERTURBATION，供测试与 suite 子命令共用
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import unitary_group

from wcosym.maps.lfmap import LinearFractionalMap, linear_map
from wcosym.operators.compression import WeightedCompositionSpec
from wcosym.spaces.kernels import SpaceKind
from wcosym.spaces.weights import Constant, KernelPower
from wcosym.verdicts.hardy import SymbolFamily

logger = logging.getLogger(__name__)

PERTURBATION = 1e-2


@dataclass
class Instance:
    """
    族中的一个实例

    Args:
        label (str): 实例类别，正例为 "positive"，反例为被破坏的条件名
        expected (bool): 判定应得的结论
        payload (dict): 判定函数需要的参数
    """

    label: str
    expected: bool
    payload: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# 随机矩阵
# ---------------------------------------------------------------------------

def _rng(seed):
    return np.random.default_rng(seed)


def random_complex(rng, shape=None):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def unit_vector(rng, dim, real=False):
    v = rng.standard_normal(dim) if real else random_complex(rng, dim)
    return v / np.linalg.norm(v)


def scaled(mat, norm):
    """缩放到给定的谱范数"""
    return mat * (norm / np.linalg.norm(mat, 2))


def random_symmetric(rng, dim, norm, real=False):
    m = rng.standard_normal((dim, dim)) if real else random_complex(rng, (dim, dim))
    return scaled(m + m.T, norm)


def random_hermitian(rng, dim, norm):
    m = random_complex(rng, (dim, dim))
    return scaled(m + m.conj().T, norm)


def random_unitary_symmetric(rng, dim):
    """V·Vᵀ，V 取自 Haar 分布的酉矩阵"""
    v = unitary_group.rvs(dim, random_state=rng)
    return v @ v.T


def random_constant(rng):
    return rng.uniform(0.5, 2.0) * np.exp(2j * np.pi * rng.uniform())


def _phase(rng):
    return np.exp(2j * np.pi * rng.uniform())


def _dirichlet(dim, psi, phi):
    return WeightedCompositionSpec(SpaceKind.dirichlet(dim), psi, phi)


def _single_entry(dim):
    e = np.zeros((dim, dim))
    e[0, 1] = 1.0
    return e


def _nonconstant_weight(rng, c, dim):
    return KernelPower(c, PERTURBATION * unit_vector(rng, dim), 1)


def _affine(rng, s, dim):
    return LinearFractionalMap(s, PERTURBATION * unit_vector(rng, dim), np.zeros(dim), 1.0)


# ---------------------------------------------------------------------------
# Dirichlet 空间
# ---------------------------------------------------------------------------

def dirichlet_J_family(count, seed=0, dim=2):
    """ψ ≡ c、φ = Sz（S 对称，‖S‖ ≤ 0.8）的正例；反例依次破坏 ψ 常数、S 对称、φ 线性"""
    rng = _rng(seed)
    kinds = ("psi_constant", "S_symmetric", "phi_linear")
    out = []
    for i in range(count):
        c = random_constant(rng)
        s = random_symmetric(rng, dim, rng.uniform(0.2, 0.8))
        if i % 2 == 0:
            out.append(Instance("positive", True, {"w": _dirichlet(dim, Constant(c), linear_map(s))}))
            continue
        kind = kinds[(i // 2) % len(kinds)]
        if kind == "psi_constant":
            w = _dirichlet(dim, _nonconstant_weight(rng, c, dim), linear_map(s))
        elif kind == "S_symmetric":
            w = _dirichlet(dim, Constant(c), linear_map(s + PERTURBATION * _single_entry(dim)))
        else:
            w = _dirichlet(dim, Constant(c), _affine(rng, s, dim))
        out.append(Instance(kind, False, {"w": w}))
    return out


def dirichlet_JCU_family(count, seed=0, dim=2):
    """
    JC_{Uz} 族：正例 S = αI + βŪ（与 Ū 交换），φ(z) = S·Ū·z；
    反例依次为与 Ū 不交换的对称 S、非常数 ψ、仿射 φ
    """
    rng = _rng(seed)
    kinds = ("SU_commute", "psi_constant", "phi_linear")
    out = []
    for i in range(count):
        u = random_unitary_symmetric(rng, dim)
        u_bar = u.conj()
        c = random_constant(rng)
        alpha = 0.4 * rng.uniform() * _phase(rng)
        beta = 0.4 * rng.uniform() * _phase(rng)
        s = alpha * np.eye(dim) + beta * u_bar
        if i % 2 == 0:
            w = _dirichlet(dim, Constant(c), linear_map(s @ u_bar))
            out.append(Instance("positive", True, {"w": w, "u": u}))
            continue
        kind = kinds[(i // 2) % len(kinds)]
        if kind == "SU_commute":
            w = _dirichlet(dim, Constant(c), linear_map(random_symmetric(rng, dim, 0.8) @ u_bar))
        elif kind == "psi_constant":
            w = _dirichlet(dim, _nonconstant_weight(rng, c, dim), linear_map(s @ u_bar))
        else:
            w = _dirichlet(dim, Constant(c), _affine(rng, s @ u_bar, dim))
        out.append(Instance(kind, False, {"w": w, "u": u}))
    return out


def dirichlet_hermitian_family(count, seed=0, dim=2):
    """ψ ≡ c 实、φ = Hz（H 自伴）的正例；反例依次破坏 c 为实、H 自伴、ψ 常数、φ 线性"""
    rng = _rng(seed)
    kinds = ("c_real", "S_hermitian", "psi_constant", "phi_linear")
    out = []
    for i in range(count):
        c = rng.uniform(0.5, 2.0) * rng.choice((-1.0, 1.0))
        h = random_hermitian(rng, dim, rng.uniform(0.2, 0.8))
        if i % 2 == 0:
            out.append(Instance("positive", True, {"w": _dirichlet(dim, Constant(c), linear_map(h))}))
            continue
        kind = kinds[(i // 2) % len(kinds)]
        if kind == "c_real":
            w = _dirichlet(dim, Constant(c + 1j * PERTURBATION), linear_map(h))
        elif kind == "S_hermitian":
            w = _dirichlet(dim, Constant(c), linear_map(h + PERTURBATION * _single_entry(dim)))
        elif kind == "psi_constant":
            w = _dirichlet(dim, _nonconstant_weight(rng, c, dim), linear_map(h))
        else:
            w = _dirichlet(dim, Constant(c), _affine(rng, h, dim))
        out.append(Instance(kind, False, {"w": w}))
    return out


# ---------------------------------------------------------------------------
# Hardy 空间
# ---------------------------------------------------------------------------

def hardy_hermitian_family(count, seed=0, dim=2):
    """a1、a0、A 全为实的族参数（‖a0‖ ≤ 0.3，‖A‖ ≤ 0.4）；反例在其中一个参数上加虚部"""
    rng = _rng(seed)
    kinds = ("a1_real", "a0_real", "A_real")
    out = []
    for i in range(count):
        a1 = rng.uniform(0.5, 1.5) * rng.choice((-1.0, 1.0))
        a0 = 0.3 * rng.uniform() * unit_vector(rng, dim, real=True)
        a = random_symmetric(rng, dim, rng.uniform(0.1, 0.4), real=True).astype(complex)
        a0 = a0.astype(complex)
        if i % 2 == 0:
            out.append(Instance("positive", True, {"family": SymbolFamily(a1, a0, a)}))
            continue
        kind = kinds[(i // 2) % len(kinds)]
        if kind == "a1_real":
            a1 = a1 + 1j * PERTURBATION
        elif kind == "a0_real":
            a0 = a0 + 1j * PERTURBATION * np.eye(dim)[0]
        else:
            a = a + 1j * PERTURBATION * (_single_entry(dim) + _single_entry(dim).T)
        out.append(Instance(kind, False, {"family": SymbolFamily(a1, a0, a)}))
    return out


def unitary_rotation_family(count, seed=0, dim=2):
    """a0 = 0，|a1| = 1，A 为随机酉对称矩阵"""
    rng = _rng(seed)
    return [
        Instance("positive", True,
                 {"family": SymbolFamily(_phase(rng), np.zeros(dim), random_unitary_symmetric(rng, dim))})
        for _ in range(count)
    ]


def disk_automorphism_family(count, seed=0):
    """N = 1 的圆盘自同构：a0 = r·e^{iθ}，A = e^{2iθ}，a1 = e^{iτ}·√(1 − r²)"""
    rng = _rng(seed)
    out = []
    for _ in range(count):
        r = rng.uniform(0.1, 0.9)
        theta = 2 * np.pi * rng.uniform()
        a0 = np.array([r * np.exp(1j * theta)])
        a = np.array([[np.exp(2j * theta)]])
        a1 = _phase(rng) * np.sqrt(1.0 - r * r)
        out.append(Instance("positive", True, {"family": SymbolFamily(a1, a0, a)}))
    return out


def unitary_jsym_family(count, seed=0, dim=2):
    """
    酉 J-对称构造的参数：偶数项为复 a 与 U = diag(e^{−2i·arg a_j})，奇数项为实 a 与 U = I

    Returns:
        list: payload 为 build_unitary_Jsym 的 (choice, params)
    """
    rng = _rng(seed)
    out = []
    for i in range(count):
        radii = rng.uniform(0.1, 1.0, dim)
        radii *= rng.uniform(0.2, 0.7) / np.linalg.norm(radii)
        mu = _phase(rng)
        if i % 2 == 0:
            angles = 2 * np.pi * rng.uniform(size=dim)
            a = radii * np.exp(1j * angles)
            u = np.diag(np.exp(-2j * angles))
            label = "complex_a"
        else:
            a = radii * rng.choice((-1.0, 1.0), dim)
            u = np.eye(dim)
            label = "real_a"
        out.append(Instance(label, True, {"choice": "involution", "params": {"mu": mu, "a": a, "U": u}}))
    return out


def jw_affine_family(count, seed=0, dim=2):
    """
    σ(z) = Az + c 的实例：正例 A = λ·b̂b̂ᵀ + P·B·P（b̂ 实单位向量，P = I − b̂b̂ᵀ），c = (1 − λ)·b；
    反例依次为 c 加虚扰动（b 非实）与实对称 A 下不共线的实 b
    """
    rng = _rng(seed)
    kinds = ("b_real", "eigenvector")
    out = []
    for i in range(count):
        if i % 2 == 1 and kinds[(i // 2) % 2] == "eigenvector":
            a = random_symmetric(rng, dim, 0.6, real=True).astype(complex)
            b = 0.5 * rng.uniform(0.3, 1.0) * unit_vector(rng, dim, real=True)
            out.append(Instance("eigenvector", False, {"A": a, "c": (np.eye(dim) - a) @ b}))
            continue
        direction = unit_vector(rng, dim, real=True)
        proj = np.outer(direction, direction)
        rest = np.eye(dim) - proj
        lam = 0.6 * rng.uniform() * _phase(rng)
        a = lam * proj + rest @ random_symmetric(rng, dim, rng.uniform(0.1, 0.6)) @ rest
        size = rng.uniform(0.3, 1.0) * min(0.9, 0.35 / abs(1.0 - lam))
        c = (1.0 - lam) * size * direction
        if i % 2 == 0:
            out.append(Instance("positive", True, {"A": a, "c": c}))
        else:
            c = c + 1j * PERTURBATION * unit_vector(rng, dim, real=True)
            out.append(Instance("b_real", False, {"A": a, "c": c}))
    return out


def normality_family(count, seed=0, dim=2):
    """
    正规性实例：正例交替为 (U = I，A 实对称，a0 实) 与 (a0 = 0，A 复对角，U 对角酉)；
    反例交替为 a0 加虚部与 A = 实对角 + 虚对称扰动（非正规）
    """
    rng = _rng(seed)
    out = []
    for i in range(count):
        a1 = random_constant(rng)
        branch = (i // 2) % 2
        if i % 2 == 0:
            if branch == 0:
                a = random_symmetric(rng, dim, 0.6, real=True).astype(complex)
                a0 = (0.5 * rng.uniform() * unit_vector(rng, dim, real=True)).astype(complex)
                u = np.eye(dim, dtype=complex)
            else:
                a = np.diag(0.6 * rng.uniform(size=dim) * np.exp(2j * np.pi * rng.uniform(size=dim)))
                a0 = np.zeros(dim, dtype=complex)
                u = np.diag(np.exp(2j * np.pi * rng.uniform(size=dim)))
            out.append(Instance("positive", True, {"a1": a1, "a0": a0, "A": a, "U": u}))
            continue
        u = np.eye(dim, dtype=complex)
        if branch == 0:
            a = random_symmetric(rng, dim, 0.6, real=True).astype(complex)
            a0 = (0.5 * rng.uniform() * unit_vector(rng, dim, real=True)).astype(complex)
            a0 = a0 + 1j * PERTURBATION * np.eye(dim)[0]
            out.append(Instance("a0_complex", False, {"a1": a1, "a0": a0, "A": a, "U": u}))
        else:
            diag = np.linspace(0.5, 0.1, dim)
            a = np.diag(diag) + 1j * PERTURBATION * (_single_entry(dim) + _single_entry(dim).T)
            out.append(Instance("non_normal_A", False,
                                {"a1": a1, "a0": np.zeros(dim, dtype=complex), "A": a, "U": u}))
    return out
