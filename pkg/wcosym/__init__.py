"""
加权复合算子复对称性数值验证工具包
"""
