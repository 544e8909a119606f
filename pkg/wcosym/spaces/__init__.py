"""
函数空间模块，包含 D(B_N) 与 H²(B_N) 的再生核、导数核与乘子族
"""
