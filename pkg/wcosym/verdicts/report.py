"""
判定结果（Verdict）及其 JSON 序列化
"""

import json
import logging
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Condition:
    """
    单个判定条件

    lhs_norm 为实测偏差，rhs_norm 为允许上界，slack = rhs_norm − lhs_norm，
    slack ≥ 0 即条件成立
    """

    name: str
    lhs_norm: float
    rhs_norm: float

    @property
    def slack(self):
        return self.rhs_norm - self.lhs_norm

    @property
    def holds(self):
        return bool(self.lhs_norm <= self.rhs_norm)

    def to_dict(self):
        return {"name": self.name, "lhs_norm": float(self.lhs_norm),
                "rhs_norm": float(self.rhs_norm), "slack": float(self.slack)}


@dataclass
class Verdict:
    """定理判定结果：所有条件都成立时 holds 为真，witness 为第一个不成立的条件"""

    theorem: str
    conditions: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def check(self, name, lhs_norm, rhs_norm):
        """追加一个条件并返回其是否成立"""
        condition = Condition(name, float(lhs_norm), float(rhs_norm))
        self.conditions.append(condition)
        return condition.holds

    @property
    def holds(self):
        return all(c.holds for c in self.conditions)

    @property
    def witness(self):
        for condition in self.conditions:
            if not condition.holds:
                return condition.name
        return None

    def failed(self):
        return [c.name for c in self.conditions if not c.holds]

    def to_dict(self):
        return {
            "theorem": self.theorem,
            "holds": self.holds,
            "witness": self.witness,
            "conditions": [c.to_dict() for c in self.conditions],
            "diagnostics": jsonable(self.diagnostics),
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    def summary(self):
        mark = "✅" if self.holds else "❌"
        tail = "" if self.holds else f"（不成立: {self.witness}）"
        return f"{mark} {self.theorem}{tail}"


def jsonable(value):
    """把 numpy 标量、复数、数组递归转换为 JSON 兼容对象，复数写成 [re, im]"""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value
