"""
乘子 ψ 的闭式族

三类乘子都写成 coefficient·(1 − ℓᵀz)^(−power) 的形式：
Constant(c)、KernelPower(a1, a0, p) 即 a1/(1−⟨z, ā0⟩)^p、
NormalizedKernel(mu, a, p) 即 μ(1−|a|²)^(p/2)/(1−⟨z, a⟩)^p。
"""

import logging
from dataclasses import dataclass

import numpy as np

from config import settings
from wcosym.errors import NotInBall, OutOfDomain
from wcosym.maps.linalg import as_cvec, frozen, norm_sq

logger = logging.getLogger(__name__)


class WeightSpec:
    """乘子族的公共接口，子类提供 coefficient、power 与 linear_form"""

    kind = "weight"

    @property
    def dim(self):
        """参数向量的维数，常数乘子为 None"""
        return None

    def linear_form(self, dim):
        """返回 ℓ，使分母为 1 − ℓᵀz"""
        raise NotImplementedError

    def base(self, z):
        z = as_cvec(z)
        value = 1.0 - complex(self.linear_form(z.shape[0]) @ z)
        if abs(value) < settings.tolerance("denominator"):
            raise OutOfDomain(f"乘子在 {z} 处有极点")
        return value

    def evaluate(self, z):
        if self.power == 0:
            return complex(self.coefficient)
        return self.coefficient * self.base(z) ** (-self.power)

    __call__ = evaluate

    def gradient(self, z):
        """∂ψ/∂z_k"""
        z = as_cvec(z)
        ell = self.linear_form(z.shape[0])
        if self.power == 0:
            return np.zeros(z.shape[0], dtype=complex)
        return self.coefficient * self.power * ell * self.base(z) ** (-self.power - 1)

    def hessian(self, z):
        """∂²ψ/∂z_k∂z_l"""
        z = as_cvec(z)
        ell = self.linear_form(z.shape[0])
        if self.power == 0:
            return np.zeros((z.shape[0], z.shape[0]), dtype=complex)
        p = self.power
        return self.coefficient * p * (p + 1) * np.outer(ell, ell) * self.base(z) ** (-p - 2)

    def is_constant(self, dim, tol=None):
        """是否为常数乘子"""
        tol = settings.tolerance("linear") if tol is None else tol
        return self.power == 0 or np.linalg.norm(self.linear_form(dim)) < tol

    def to_dict(self):
        raise NotImplementedError


def _encode(value):
    return [float(np.real(value)), float(np.imag(value))]


@dataclass(frozen=True, eq=False)
class Constant(WeightSpec):
    """常数乘子 ψ ≡ c"""

    c: complex
    kind = "constant"

    def __post_init__(self):
        object.__setattr__(self, 'c', complex(self.c))

    @property
    def coefficient(self):
        return self.c

    @property
    def power(self):
        return 0

    def linear_form(self, dim):
        return np.zeros(dim, dtype=complex)

    def to_dict(self):
        return {"type": self.kind, "c": _encode(self.c)}


@dataclass(frozen=True, eq=False)
class KernelPower(WeightSpec):
    """ψ(z) = a1/(1 − ⟨z, ā0⟩)^power"""

    a1: complex
    a0: np.ndarray
    power: int
    kind = "kernel_power"

    @property
    def dim(self):
        return self.a0.shape[0]

    def __post_init__(self):
        a0 = as_cvec(self.a0)
        if complex(self.a1) == 0:
            raise ValueError("KernelPower 要求 a1 ≠ 0")
        if norm_sq(a0) >= 1.0:
            raise NotInBall(f"‖a0‖² = {norm_sq(a0):.6f} ≥ 1")
        if int(self.power) < 0:
            raise ValueError("幂次不能为负")
        object.__setattr__(self, 'a1', complex(self.a1))
        object.__setattr__(self, 'a0', frozen(a0))
        object.__setattr__(self, 'power', int(self.power))

    @property
    def coefficient(self):
        return self.a1

    def linear_form(self, dim):
        return np.array(self.a0)

    def to_dict(self):
        return {"type": self.kind, "a1": _encode(self.a1),
                "a0": [_encode(x) for x in self.a0], "power": self.power}


@dataclass(frozen=True, eq=False)
class NormalizedKernel(WeightSpec):
    """ψ(z) = μ(1 − |a|²)^(power/2)/(1 − ⟨z, a⟩)^power"""

    mu: complex
    a: np.ndarray
    power: int
    kind = "normalized_kernel"

    @property
    def dim(self):
        return self.a.shape[0]

    def __post_init__(self):
        a = as_cvec(self.a)
        if norm_sq(a) >= 1.0:
            raise NotInBall(f"‖a‖² = {norm_sq(a):.6f} ≥ 1")
        if int(self.power) < 0:
            raise ValueError("幂次不能为负")
        object.__setattr__(self, 'mu', complex(self.mu))
        object.__setattr__(self, 'a', frozen(a))
        object.__setattr__(self, 'power', int(self.power))

    @property
    def coefficient(self):
        return self.mu * (1.0 - norm_sq(self.a)) ** (self.power / 2)

    def linear_form(self, dim):
        return self.a.conj()

    def to_dict(self):
        return {"type": self.kind, "mu": _encode(self.mu),
                "a": [_encode(x) for x in self.a], "power": self.power}


def from_linear_form(coefficient, ell, power):
    """把 coefficient·(1 − ℓᵀz)^(−power) 收回到 KernelPower / Constant"""
    ell = as_cvec(ell)
    if power == 0 or not np.any(ell):
        return Constant(coefficient)
    return KernelPower(coefficient, ell, power)
