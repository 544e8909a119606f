"""
线性分式映射模块，包含单位球上线性分式自映射的精确演算
"""
