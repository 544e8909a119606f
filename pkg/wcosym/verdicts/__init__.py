"""
判定模块，把各分类定理实现为可执行的谓词与构造
"""
