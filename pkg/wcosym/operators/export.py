"""
压缩矩阵的 JSON 导入导出
格式：{space, N, D, ordering: "grlex", entries: 行优先的 [re, im] 对}
"""

import json
import logging

import numpy as np

from wcosym.errors import DimensionMismatch, SchemaError
from wcosym.operators.compression import OperatorCompression
from wcosym.series.multi_index import count_monomials_leq
from wcosym.spaces.kernels import Space, SpaceKind

logger = logging.getLogger(__name__)

ORDERING = "grlex"


def matrix_payload(compression):
    """压缩矩阵的 JSON 兼容字典"""
    return {
        "space": compression.space.kind.value,
        "N": compression.space.dim,
        "D": compression.degree_cap,
        "ordering": ORDERING,
        "entries": [[float(x.real), float(x.imag)] for x in compression.matrix.ravel()],
    }


def export_matrix(compression, path=None):
    """
    导出压缩矩阵；浮点数按 repr 写出，读回后逐位一致

    Args:
        compression (OperatorCompression): 压缩矩阵
        path (str, optional): 输出文件路径，缺省时只返回文本

    Returns:
        str: JSON 文本
    """
    text = json.dumps(matrix_payload(compression))
    if path:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
        logger.info(f"矩阵已导出到 {path}")
    return text


def import_matrix(text):
    """
    从 JSON 文本恢复压缩矩阵

    Raises:
        SchemaError: 字段缺失或取值非法
        DimensionMismatch: 元素个数与 binom(N+D, N)² 不符
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("/", f"不是合法的 JSON: {e}") from e
    for key in ("space", "N", "D", "ordering", "entries"):
        if key not in payload:
            raise SchemaError(f"/{key}", "缺少字段")
    if payload["ordering"] != ORDERING:
        raise SchemaError("/ordering", f"仅支持 {ORDERING}")
    try:
        space = SpaceKind(Space(payload["space"]), payload["N"])
    except ValueError as e:
        raise SchemaError("/space", str(e)) from e
    size = count_monomials_leq(space.dim, int(payload["D"]))
    entries = np.asarray(payload["entries"], dtype=float)
    if entries.shape != (size * size, 2):
        raise DimensionMismatch(f"应有 {size * size} 个 [re, im] 元素，得到形状 {entries.shape}")
    matrix = np.empty(size * size, dtype=complex)
    matrix.real = entries[:, 0]
    matrix.imag = entries[:, 1]
    matrix = matrix.reshape(size, size)
    return OperatorCompression(space, int(payload["D"]), matrix)
