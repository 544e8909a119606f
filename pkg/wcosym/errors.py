"""
异常类型定义
"""


class WcosymError(Exception):
    """工具包所有异常的基类"""


class DenominatorVanishes(WcosymError, ValueError):
    """线性分式映射的分母在求值点消失"""


class DenominatorVanishesAtOrigin(DenominatorVanishes):
    """线性分式映射的分母在原点消失，无法做幂级数展开"""


class NotInBall(WcosymError, ValueError):
    """参数向量不在开单位球内"""


class OutOfDomain(WcosymError, ValueError):
    """求值点超出核函数或映射的定义域"""


class DimensionMismatch(WcosymError, ValueError):
    """维数或截断次数不一致"""


class InvalidConjugation(WcosymError, ValueError):
    """共轭算子不满足对合或等距条件"""


class WrongSpace(WcosymError, ValueError):
    """判定定理不适用于给定的函数空间"""


class NotSymmetric(WcosymError, ValueError):
    """矩阵不是对称矩阵（A ≠ Aᵀ）"""


class SingularIminusA(WcosymError, ValueError):
    """1 是 A 的特征值，I−A 不可逆"""


class UnsupportedFamily(WcosymError, ValueError):
    """符号不属于支持的闭式族"""


class PreconditionViolated(WcosymError, ValueError):
    """前置条件不满足"""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("前置条件不满足: " + ", ".join(self.violations))


class SchemaError(WcosymError, ValueError):
    """作业描述不符合模式，path 为 JSON-pointer 路径"""

    def __init__(self, path, message):
        self.path = path or "/"
        self.message = message
        super().__init__(f"{self.path}: {message}")
