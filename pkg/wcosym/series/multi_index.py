"""
多重指标与分次字典序（grlex）基
"""

import itertools
import math
from functools import lru_cache

import numpy as np
from scipy.special import comb


def grlex_key(alpha):
    """分次字典序的排序键：先总次数，再字典序"""
    return (sum(alpha),) + tuple(alpha)


def count_monomials_leq(dim, degree):
    """dim 个变量中总次数不超过 degree 的单项式个数 binom(dim+degree, dim)"""
    return int(comb(dim + degree, dim, exact=True))


@lru_cache(maxsize=None)
def grlex_basis(dim, degree):
    """
    总次数 ≤ degree 的全部多重指标，按 grlex 升序排列

    Args:
        dim (int): 变量个数 N
        degree (int): 截断次数 D

    Returns:
        tuple: 多重指标元组
    """
    if dim < 1:
        raise ValueError("变量个数必须为正")
    if degree < 0:
        raise ValueError("截断次数不能为负")
    indices = (alpha for alpha in itertools.product(range(degree + 1), repeat=dim)
               if sum(alpha) <= degree)
    return tuple(sorted(indices, key=grlex_key))


@lru_cache(maxsize=None)
def grlex_positions(dim, degree):
    """多重指标到 grlex 位置的映射"""
    return {alpha: pos for pos, alpha in enumerate(grlex_basis(dim, degree))}


@lru_cache(maxsize=None)
def exponent_matrix(dim, degree):
    """形状 (基大小, dim) 的指数矩阵"""
    out = np.array(grlex_basis(dim, degree), dtype=int)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def total_degrees(dim, degree):
    out = exponent_matrix(dim, degree).sum(axis=1)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def product_table(dim, degree):
    """
    截断乘法的下标表：z^α·z^β = z^(α+β)，仅保留 |α+β| ≤ degree

    Returns:
        tuple: (left, right, target) 三个下标数组
    """
    basis = grlex_basis(dim, degree)
    positions = grlex_positions(dim, degree)
    left, right, target = [], [], []
    for i, alpha in enumerate(basis):
        room = degree - sum(alpha)
        for j, beta in enumerate(basis):
            if sum(beta) > room:
                break
            left.append(i)
            right.append(j)
            target.append(positions[tuple(x + y for x, y in zip(alpha, beta))])
    table = tuple(np.array(arr, dtype=int) for arr in (left, right, target))
    for arr in table:
        arr.setflags(write=False)
    return table


def multi_factorial(alpha):
    """α! = Π α_j!"""
    return math.prod(math.factorial(k) for k in alpha)


def unit_index(dim, j):
    """第 j 个坐标方向的多重指标 e_j（0 起始）"""
    return tuple(1 if i == j else 0 for i in range(dim))
