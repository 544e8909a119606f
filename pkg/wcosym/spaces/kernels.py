"""
再生核模块
D(B_N) 与 H²(B_N) 的闭式再生核、导数核、单项式范数以及加权复合算子伴随在核上的作用
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np

from wcosym.errors import OutOfDomain, WrongSpace
from wcosym.maps.lfmap import affine_map, adjoint_map, eval_map, map_hessian, map_jacobian
from wcosym.maps.linalg import as_cvec, norm_sq
from wcosym.series.multi_index import grlex_basis, multi_factorial
from wcosym.spaces.weights import KernelPower

logger = logging.getLogger(__name__)


class Space(str, Enum):
    DIRICHLET = "dirichlet"
    HARDY = "hardy"


@dataclass(frozen=True)
class SpaceKind:
    """函数空间：种类与维数 N"""

    kind: Space
    dim: int

    def __post_init__(self):
        object.__setattr__(self, 'kind', Space(self.kind))
        if int(self.dim) < 1:
            raise ValueError("维数 N 必须 ≥ 1")
        object.__setattr__(self, 'dim', int(self.dim))

    @classmethod
    def dirichlet(cls, dim):
        return cls(Space.DIRICHLET, dim)

    @classmethod
    def hardy(cls, dim):
        return cls(Space.HARDY, dim)

    @property
    def is_dirichlet(self):
        return self.kind is Space.DIRICHLET

    def to_dict(self):
        return {"kind": self.kind.value, "dim": self.dim}


def _pairing(w, z):
    """⟨z, w⟩，要求 |⟨z, w⟩| < 1"""
    value = complex(np.vdot(w, z))
    if abs(value) >= 1.0:
        raise OutOfDomain(f"|⟨z,w⟩| = {abs(value):.6f} ≥ 1")
    return value


def _require_interior(point, label):
    if norm_sq(point) >= 1.0:
        raise OutOfDomain(f"{label} 不在开单位球内")


def kernel_eval(space, w, z):
    """
    再生核 K_w(z)

    Dirichlet: 1 + ln(1/(1 − ⟨z,w⟩))（主值对数）；Hardy: (1 − ⟨z,w⟩)^(−N)

    Args:
        space (SpaceKind): 函数空间
        w: 核的基点
        z: 求值点

    Returns:
        complex: K_w(z)
    """
    w = as_cvec(w, space.dim)
    z = as_cvec(z, space.dim)
    base = 1.0 - _pairing(w, z)
    if space.is_dirichlet:
        return complex(1.0 - np.log(base))
    return complex(base ** (-space.dim))


def kernel_norm_sq(space, w):
    """‖K_w‖² = K_w(w)"""
    w = as_cvec(w, space.dim)
    _require_interior(w, "w")
    return float(kernel_eval(space, w, w).real)


def normalized_kernel_eval(space, w, z):
    """归一化核 k_w(z) = K_w(z)/‖K_w‖"""
    return kernel_eval(space, w, z) / math.sqrt(kernel_norm_sq(space, w))


def deriv_kernel_eval(space, w, j, z):
    """D(B_N) 上一阶偏导核 K_w^{D_j}(z) = z_j/(1 − ⟨z,w⟩)"""
    require_dirichlet(space)
    w = as_cvec(w, space.dim)
    z = as_cvec(z, w.shape[0])
    return complex(z[j] / (1.0 - _pairing(w, z)))


def second_deriv_kernel_eval(space, w, i, j, z):
    """D(B_N) 上二阶偏导核 K_w^{D_{i,j}}(z) = z_i z_j/(1 − ⟨z,w⟩)²"""
    require_dirichlet(space)
    w = as_cvec(w, space.dim)
    z = as_cvec(z, w.shape[0])
    return complex(z[i] * z[j] / (1.0 - _pairing(w, z)) ** 2)


# ---------------------------------------------------------------------------
# 单项式范数
# ---------------------------------------------------------------------------

def monomial_norm_sq_exact(space, alpha):
    """核诱导内积下的 ‖z^α‖²（精确有理数）"""
    alpha = tuple(int(k) for k in alpha)
    order = sum(alpha)
    if space.is_dirichlet:
        if order == 0:
            return Fraction(1)
        return Fraction(multi_factorial(alpha), math.factorial(order - 1))
    n = len(alpha)
    return Fraction(math.factorial(n - 1) * multi_factorial(alpha), math.factorial(n - 1 + order))


def monomial_norm_sq(space, alpha):
    """
    ‖z^α‖²：核展开式 K_w(z) = Σ c_α z^α conj(w)^α 中 c_α 的倒数

    Hardy: (N−1)!·α!/(N−1+|α|)!；Dirichlet: ‖1‖² = 1，|α| ≥ 1 时为 α!/(|α|−1)!
    """
    return float(monomial_norm_sq_exact(space, alpha))


@lru_cache(maxsize=None)
def monomial_norms(space, degree):
    """grlex 基上的 ‖z^α‖（非平方），只读数组"""
    out = np.sqrt([monomial_norm_sq(space, alpha) for alpha in grlex_basis(space.dim, degree)])
    out.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# 核的线性组合
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelDirective:
    """核指令：基点与求导阶（() / (j,) / (i, j)，下标从 0 开始）"""

    point: tuple
    order: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'point', tuple(complex(x) for x in self.point))
        object.__setattr__(self, 'order', tuple(int(k) for k in self.order))
        if len(self.order) > 2:
            raise ValueError("仅支持至多二阶导数核")
        if any(k < 0 or k >= len(self.point) for k in self.order):
            raise ValueError(f"导数下标 {self.order} 越界")

    def evaluate(self, z):
        w = np.array(self.point)
        space = SpaceKind.dirichlet(len(self.point))
        if not self.order:
            return kernel_eval(space, w, z)
        if len(self.order) == 1:
            return deriv_kernel_eval(space, w, self.order[0], z)
        return second_deriv_kernel_eval(space, w, self.order[0], self.order[1], z)

    def reproduce(self, f):
        """⟨f, K⟩：f 在基点处的值或偏导数，f 需提供 evaluate 与 partial"""
        w = np.array(self.point)
        for k in self.order:
            f = f.partial(k)
        return complex(f.evaluate(w))


@dataclass(frozen=True)
class KernelCombination:
    """D(B_N) 中核指令的复线性组合 Σ c_i·K_i"""

    terms: tuple = field(default_factory=tuple)

    def evaluate(self, z):
        """组合函数在 z 处的值"""
        return sum((coef * directive.evaluate(z) for coef, directive in self.terms), 0j)

    def pair(self, f):
        """⟨f, Σ c_i K_i⟩ = Σ conj(c_i)·⟨f, K_i⟩"""
        return sum((np.conj(coef) * directive.reproduce(f) for coef, directive in self.terms), 0j)

    def directives(self):
        return [directive for _, directive in self.terms]

    def coefficient(self, directive):
        return sum((coef for coef, d in self.terms if d == directive), 0j)


def _combination(pairs):
    return KernelCombination(tuple((complex(coef), d) for coef, d in pairs if coef != 0))


# ---------------------------------------------------------------------------
# 伴随算子在核上的作用
# ---------------------------------------------------------------------------

def adjoint_on_kernel(psi, phi, w):
    """
    W*_{ψ,φ} K_w = conj(ψ(w))·K_{φ(w)}

    Returns:
        tuple: (conj(ψ(w)), φ(w))
    """
    w = as_cvec(w, phi.dim)
    _require_interior(w, "w")
    image = eval_map(phi, w)
    _require_interior(image, "φ(w)")
    return complex(np.conj(psi.evaluate(w))), image


def affine_adjoint_symbols(a, c):
    """
    仿射映射 σ(z) = Az + c 在 H²(B_N) 上 C_σ* = M_ψ C_φ 的符号

    ψ(z) = 1/(1 + ⟨z, −c⟩)^N，φ(z) = A*z/(1 + ⟨z, −c⟩)

    Returns:
        tuple: (ψ, φ)
    """
    sigma = affine_map(a, c)
    return KernelPower(1.0, sigma.b.conj(), sigma.dim), adjoint_map(sigma)


def _derivative_setup(phi, a):
    a = as_cvec(a, phi.dim)
    _require_interior(a, "a")
    image = eval_map(phi, a)
    _require_interior(image, "φ(a)")
    return a, tuple(image)


def adjoint_on_deriv_kernel(psi, phi, a, k):
    """
    W*_{ψ,φ} K_a^{D_k} = conj(∂_kψ(a))·K_{φ(a)} + conj(ψ(a))·Σ_j conj(∂_kφ_j(a))·K_{φ(a)}^{D_j}

    Args:
        psi (WeightSpec): 乘子
        phi (LinearFractionalMap): 复合符号
        a: 基点
        k (int): 求导方向（0 起始）

    Returns:
        KernelCombination: 核指令的线性组合
    """
    a, image = _derivative_setup(phi, a)
    jac = map_jacobian(phi, a)
    value = psi.evaluate(a)
    grad = psi.gradient(a)
    pairs = [(np.conj(grad[k]), KernelDirective(image))]
    pairs += [(np.conj(value * jac[j, k]), KernelDirective(image, (j,))) for j in range(phi.dim)]
    return _combination(pairs)


def adjoint_on_second_deriv_kernel(psi, phi, a, k=0, l=None):
    """
    W*_{ψ,φ} K_a^{D_{k,l}}，k = l = 0 即 (1,1) 下标对的展开式

    零阶项 conj(∂²ψ)·K，一阶项来自 ψ 的一阶导数与 φ 的二阶导数，
    二阶项为 conj(ψ)·Σ_{i,j} conj(∂_kφ_i·∂_lφ_j)·K^{D_{i,j}}。
    """
    l = k if l is None else l
    a, image = _derivative_setup(phi, a)
    jac = map_jacobian(phi, a)
    hess = map_hessian(phi, a)
    value = psi.evaluate(a)
    grad = psi.gradient(a)
    second = psi.hessian(a)
    dim = phi.dim

    pairs = [(np.conj(second[k, l]), KernelDirective(image))]
    for j in range(dim):
        coef = grad[k] * jac[j, l] + grad[l] * jac[j, k] + value * hess[j, k, l]
        pairs.append((np.conj(coef), KernelDirective(image, (j,))))
    for i in range(dim):
        for j in range(dim):
            pairs.append((np.conj(value * jac[i, k] * jac[j, l]), KernelDirective(image, (i, j))))
    return _combination(pairs)


def require_dirichlet(space):
    if not space.is_dirichlet:
        raise WrongSpace(f"需要 Dirichlet 空间，得到 {space.kind.value}")
