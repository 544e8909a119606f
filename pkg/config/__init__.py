"""
配置模块，用于管理项目的所有配置项和环境变量
"""
