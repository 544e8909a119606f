"""
算子模块，包含加权复合算子的压缩、共轭算子与各类残差
"""
