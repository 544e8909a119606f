"""
作业模块：JSON 作业描述的解析、检验执行与验收检验组
"""
