"""
截断多元幂级数模块，将闭式符号 ψ、φ 展开为泰勒系数
"""
