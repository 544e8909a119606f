"""
作业描述（JobSpec）的解析与序列化

作业为 UTF-8 JSON：结构先按 schema/jobspec.schema.json 校验，再构建领域对象。
复数写成 [re, im] 或裸实数，矩阵为行优先的嵌套数组。
所有错误都以 SchemaError 抛出，并带有 JSON-pointer 路径。
"""

import json
import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache

import jsonschema
import numpy as np

from config import settings
from wcosym.errors import SchemaError, WcosymError
from wcosym.maps.lfmap import (
    LinearFractionalMap,
    affine_map,
    identity_map,
    linear_map,
    make_involution,
)
from wcosym.spaces.kernels import Space, SpaceKind
from wcosym.spaces.weights import Constant, KernelPower, NormalizedKernel

logger = logging.getLogger(__name__)

CHECK_NAMES = (
    "classify_dirichlet_J",
    "classify_dirichlet_JCU",
    "classify_dirichlet_hermitian",
    "classify_dirichlet_unitary",
    "hardy_unitary",
    "hardy_hermitian",
    "hardy_normality",
    "jw_affine",
    "build_unitary_Jsym",
    "conjugate_symbols",
    "matrix_symmetry",
    "kernel_symmetry",
    "kernel_hermitian",
    "hermitian_residual",
    "unitary_residual",
    "normal_residual",
    "conjugation_validity",
    "matrix_export",
)

_SCALAR_PARAMS = ("a1", "mu", "lambda")
_VECTOR_PARAMS = ("a0", "c", "a")
_MATRIX_PARAMS = ("A", "U")


# ---------------------------------------------------------------------------
# 数值的编码与解码
# ---------------------------------------------------------------------------

def _pointer(*parts):
    return "/" + "/".join(str(p) for p in parts) if parts else "/"


def encode_complex(value):
    value = complex(value)
    return [float(value.real), float(value.imag)]


def encode_vector(values):
    return [encode_complex(x) for x in np.asarray(values).ravel()]


def encode_matrix(values):
    return [encode_vector(row) for row in np.asarray(values)]


def parse_complex(value, path):
    """[re, im] 或裸实数"""
    if isinstance(value, bool):
        raise SchemaError(path, "期望复数")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in value):
        return complex(value[0], value[1])
    raise SchemaError(path, "复数应写成 [re, im] 或实数")


def parse_vector(value, path, dim=None):
    if not isinstance(value, list) or not value:
        raise SchemaError(path, "期望非空数组")
    vec = np.array([parse_complex(x, f"{path}/{i}") for i, x in enumerate(value)], dtype=complex)
    if dim is not None and vec.shape[0] != dim:
        raise SchemaError(path, f"期望长度 {dim}，得到 {vec.shape[0]}")
    return vec


def parse_matrix(value, path, dim=None):
    if not isinstance(value, list) or not value:
        raise SchemaError(path, "期望非空二维数组")
    rows = [parse_vector(row, f"{path}/{i}") for i, row in enumerate(value)]
    size = len(rows)
    if any(row.shape[0] != size for row in rows):
        raise SchemaError(path, "期望方阵")
    if dim is not None and size != dim:
        raise SchemaError(path, f"期望 {dim}×{dim} 矩阵，得到 {size}×{size}")
    return np.vstack(rows)


# ---------------------------------------------------------------------------
# 领域对象的构建
# ---------------------------------------------------------------------------

def _required(doc, key, path):
    if key not in doc:
        raise SchemaError(f"{path}/{key}", "缺少字段")
    return doc[key]


def build_weight(doc, dim, path="/psi"):
    """由 JSON 对象构建乘子"""
    kind = _required(doc, "type", path)
    try:
        if kind == "constant":
            return Constant(parse_complex(_required(doc, "c", path), f"{path}/c"))
        power = int(doc.get("power", dim))
        if kind == "kernel_power":
            return KernelPower(parse_complex(_required(doc, "a1", path), f"{path}/a1"),
                               parse_vector(_required(doc, "a0", path), f"{path}/a0", dim), power)
        if kind == "normalized_kernel":
            return NormalizedKernel(parse_complex(doc.get("mu", 1.0), f"{path}/mu"),
                                    parse_vector(_required(doc, "a", path), f"{path}/a", dim), power)
    except SchemaError:
        raise
    except WcosymError as e:
        raise SchemaError(path, str(e)) from e
    except ValueError as e:
        raise SchemaError(path, str(e)) from e
    raise SchemaError(f"{path}/type", f"未知的乘子类型: {kind}")


def build_map(doc, dim, path="/phi"):
    """由 JSON 对象构建线性分式映射"""
    kind = _required(doc, "type", path)
    try:
        if kind == "identity":
            return identity_map(dim)
        if kind == "linear":
            return linear_map(parse_matrix(_required(doc, "S", path), f"{path}/S", dim))
        if kind == "affine":
            return affine_map(parse_matrix(_required(doc, "A", path), f"{path}/A", dim),
                              parse_vector(_required(doc, "c", path), f"{path}/c", dim))
        if kind == "involution":
            return make_involution(parse_vector(_required(doc, "a", path), f"{path}/a", dim))
        if kind == "lft":
            return LinearFractionalMap(
                parse_matrix(_required(doc, "a", path), f"{path}/a", dim),
                parse_vector(_required(doc, "b", path), f"{path}/b", dim),
                parse_vector(_required(doc, "c", path), f"{path}/c", dim),
                parse_complex(_required(doc, "d", path), f"{path}/d"),
            )
    except SchemaError:
        raise
    except (WcosymError, ValueError) as e:
        raise SchemaError(path, str(e)) from e
    raise SchemaError(f"{path}/type", f"未知的映射类型: {kind}")


def serialize_map(phi):
    """线性分式映射的通用 JSON 表示"""
    return {"type": "lft", "a": encode_matrix(phi.a), "b": encode_vector(phi.b),
            "c": encode_vector(phi.c), "d": encode_complex(phi.d)}


def build_conjugation(doc, dim, path="/conjugation"):
    """
    构建共轭算子；wphij 可以显式给出 Psi、Phi，也可以只给 a（以及 mu、U），
    此时按酉 J-对称构造生成 (Ψ, Φ)
    """
    from wcosym.operators.conjugation import JCU, PlainJ, WPhiJ
    from wcosym.verdicts.hardy import JsymChoice, build_unitary_Jsym

    kind = _required(doc, "type", path)
    try:
        if kind == "plain_j":
            return PlainJ()
        if kind == "jcu":
            return JCU(parse_matrix(_required(doc, "u", path), f"{path}/u", dim))
        if kind == "wphij":
            if "Psi" in doc or "Phi" in doc:
                return WPhiJ(build_weight(_required(doc, "Psi", path), dim, f"{path}/Psi"),
                             build_map(_required(doc, "Phi", path), dim, f"{path}/Phi"))
            params = {"a": parse_vector(_required(doc, "a", path), f"{path}/a", dim),
                      "mu": parse_complex(doc.get("mu", 1.0), f"{path}/mu")}
            if "U" in doc:
                params["U"] = parse_matrix(doc["U"], f"{path}/U", dim)
            return WPhiJ(*build_unitary_Jsym(JsymChoice.INVOLUTION, params))
    except SchemaError:
        raise
    except (WcosymError, ValueError) as e:
        raise SchemaError(path, str(e)) from e
    raise SchemaError(f"{path}/type", f"未知的共轭类型: {kind}")


def parse_params(doc, dim, path="/params"):
    """定理参数：a1、mu、lambda 为复数，a0、c、a 为向量，A、U 为矩阵"""
    out = {}
    for key, value in doc.items():
        where = f"{path}/{key}"
        if key in _SCALAR_PARAMS:
            out[key] = parse_complex(value, where)
        elif key in _VECTOR_PARAMS:
            out[key] = parse_vector(value, where, dim)
        elif key in _MATRIX_PARAMS:
            out[key] = parse_matrix(value, where, dim)
        elif key == "choice":
            out[key] = str(value)
        elif key == "leading_degree":
            out[key] = int(value)
        else:
            raise SchemaError(where, "未知字段")
    return out


def _encode_params(params):
    out = {}
    for key, value in params.items():
        if key in _SCALAR_PARAMS:
            out[key] = encode_complex(value)
        elif key in _VECTOR_PARAMS:
            out[key] = encode_vector(value)
        elif key in _MATRIX_PARAMS:
            out[key] = encode_matrix(value)
        else:
            out[key] = value
    return out


# ---------------------------------------------------------------------------
# JobSpec
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JobSpec:
    """
    一个作业：函数空间、符号、共轭算子、定理参数与要执行的检验

    psi、phi、conjugation 以规范化的 JSON 对象保存，domain 对象按需构建
    """

    space: SpaceKind
    checks: tuple = ()
    psi: dict = None
    phi: dict = None
    conjugation: dict = None
    params: dict = field(default_factory=dict)
    degree_cap: int = None
    sample_count: int = None
    seed: int = None
    tolerances: dict = field(default_factory=dict)
    name: str = None

    def __post_init__(self):
        if self.degree_cap is None:
            object.__setattr__(self, 'degree_cap', settings.default_degree_cap(self.space.dim))
        if self.sample_count is None:
            object.__setattr__(self, 'sample_count', settings.SAMPLE_COUNT)
        if self.seed is None:
            object.__setattr__(self, 'seed', settings.SAMPLE_SEED)

    @property
    def dim(self):
        return self.space.dim

    def weight(self):
        return None if self.psi is None else build_weight(self.psi, self.dim)

    def map(self):
        return None if self.phi is None else build_map(self.phi, self.dim)

    def conjugation_spec(self):
        return None if self.conjugation is None else build_conjugation(self.conjugation, self.dim)

    def parameters(self):
        return parse_params(self.params, self.dim)

    def with_overrides(self, degree_cap=None, sample_count=None, seed=None, tolerances=None):
        """命令行参数覆盖作业中的设置"""
        merged = dict(self.tolerances)
        merged.update(tolerances or {})
        return replace(
            self,
            degree_cap=self.degree_cap if degree_cap is None else int(degree_cap),
            sample_count=self.sample_count if sample_count is None else int(sample_count),
            seed=self.seed if seed is None else int(seed),
            tolerances=merged,
        )

    def to_dict(self):
        doc = {"space": {"kind": self.space.kind.value, "N": self.dim}}
        if self.name is not None:
            doc["name"] = self.name
        for key in ("psi", "phi", "conjugation"):
            value = getattr(self, key)
            if value is not None:
                doc[key] = value
        if self.params:
            doc["params"] = dict(self.params)
        doc.update({
            "checks": list(self.checks),
            "degree_cap": self.degree_cap,
            "sample_count": self.sample_count,
            "seed": self.seed,
        })
        if self.tolerances:
            doc["tolerances"] = dict(self.tolerances)
        return doc


@lru_cache(maxsize=1)
def load_schema(path=None):
    with open(path or settings.SCHEMA_PATH, 'r', encoding='utf-8') as f:
        return json.load(f)


def _schema_error(error):
    """把 jsonschema 的错误转换为带路径的 SchemaError"""
    parts = list(error.absolute_path)
    if error.validator == "required" and isinstance(error.instance, dict):
        missing = [k for k in error.validator_value if k not in error.instance]
        if missing:
            return SchemaError(_pointer(*parts, missing[0]), "缺少字段")
    if error.validator == "additionalProperties" and isinstance(error.instance, dict):
        known = error.schema.get("properties", {})
        extras = sorted(k for k in error.instance if k not in known)
        if extras:
            return SchemaError(_pointer(*parts, extras[0]), "未知字段")
    if "propertyNames" in error.schema_path:
        return SchemaError(_pointer(*parts, error.instance), "未知名称")
    return SchemaError(_pointer(*parts), error.message)


def validate_document(doc):
    """按 JSON schema 校验；多个错误时报告路径最短的一个"""
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        raise _schema_error(errors[0])


def _normalize_weight(doc, dim, path):
    return build_weight(doc, dim, path).to_dict()


def _normalize_map(doc, dim, path):
    build_map(doc, dim, path)
    out = {"type": doc["type"]}
    for key, value in doc.items():
        if key == "type":
            continue
        if key == "d":
            out[key] = encode_complex(parse_complex(value, f"{path}/d"))
        elif key in ("S", "A") or (key == "a" and doc["type"] == "lft"):
            out[key] = encode_matrix(parse_matrix(value, f"{path}/{key}", dim))
        else:
            out[key] = encode_vector(parse_vector(value, f"{path}/{key}", dim))
    return out


def _normalize_conjugation(doc, dim, path):
    build_conjugation(doc, dim, path)
    out = {"type": doc["type"]}
    for key, value in doc.items():
        if key == "type":
            continue
        if key == "Psi":
            out[key] = _normalize_weight(value, dim, f"{path}/Psi")
        elif key == "Phi":
            out[key] = _normalize_map(value, dim, f"{path}/Phi")
        elif key == "mu":
            out[key] = encode_complex(parse_complex(value, f"{path}/mu"))
        elif key in ("u", "U"):
            out[key] = encode_matrix(parse_matrix(value, f"{path}/{key}", dim))
        else:
            out[key] = encode_vector(parse_vector(value, f"{path}/{key}", dim))
    return out


def _parse_seed(value):
    if isinstance(value, str):
        return int(value, 0)
    return int(value)


def parse_document(doc):
    """
    由已解码的 JSON 对象构建 JobSpec

    Args:
        doc (dict): JSON 对象

    Returns:
        JobSpec: 规范化后的作业

    Raises:
        SchemaError: 结构或取值不合法
    """
    if not isinstance(doc, dict):
        raise SchemaError("/", "作业必须是 JSON 对象")
    validate_document(doc)
    space = SpaceKind(Space(doc["space"]["kind"]), doc["space"]["N"])
    dim = space.dim
    params = parse_params(doc.get("params", {}), dim)
    return JobSpec(
        space=space,
        checks=tuple(doc.get("checks", ())),
        psi=_normalize_weight(doc["psi"], dim, "/psi") if "psi" in doc else None,
        phi=_normalize_map(doc["phi"], dim, "/phi") if "phi" in doc else None,
        conjugation=_normalize_conjugation(doc["conjugation"], dim, "/conjugation") if "conjugation" in doc else None,
        params=_encode_params(params),
        degree_cap=doc.get("degree_cap"),
        sample_count=doc.get("sample_count"),
        seed=_parse_seed(doc["seed"]) if "seed" in doc else None,
        tolerances={k: float(v) for k, v in doc.get("tolerances", {}).items()},
        name=doc.get("name"),
    )


def parse_spec(text):
    """
    解析 UTF-8 JSON 作业

    Args:
        text (bytes | str): 作业文本

    Returns:
        JobSpec: 作业

    Raises:
        SchemaError: 编码、JSON 语法或模式不合法，附 JSON-pointer 路径
    """
    if isinstance(text, bytes):
        try:
            text = text.decode('utf-8')
        except UnicodeDecodeError as e:
            raise SchemaError("/", f"不是 UTF-8 文本: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("/", f"JSON 解析失败: {e}") from e
    return parse_document(doc)


def parse_batch(text):
    """批量作业：JSON 数组，或单个作业对象"""
    if isinstance(text, bytes):
        try:
            text = text.decode('utf-8')
        except UnicodeDecodeError as e:
            raise SchemaError("/", f"不是 UTF-8 文本: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("/", f"JSON 解析失败: {e}") from e
    if isinstance(doc, list):
        specs = []
        for i, item in enumerate(doc):
            try:
                specs.append(parse_document(item))
            except SchemaError as e:
                raise SchemaError(f"/{i}{e.path if e.path != '/' else ''}", e.message) from e
        return specs
    return [parse_document(doc)]


def serialize(spec):
    """JobSpec 转回 JSON 文本，parse_spec(serialize(s)) == s"""
    return json.dumps(spec.to_dict(), ensure_ascii=False, indent=2)
