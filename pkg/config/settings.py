"""
集中管理项目所有配置项和环境变量
"""

import os
from dotenv import load_dotenv

# 加载环境变量
load_dotenv()

# 项目根目录
ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# 作业与模式文件
JOBS_DIR = os.path.join(ROOT_DIR, 'jobs')
SCHEMA_PATH = os.path.join(ROOT_DIR, 'schema', 'jobspec.schema.json')

# 输出目录
OUTPUT_DIR = os.getenv("WCOSYM_OUTPUT_DIR", os.path.join(ROOT_DIR, 'output'))
os.makedirs(OUTPUT_DIR, exist_ok=True)

# 截断次数配置：P_D 的维数为 binom(N+D, N)
DEFAULT_DEGREE_CAPS = {1: 10, 2: 8, 3: 6}
FALLBACK_DEGREE_CAP = int(os.getenv("WCOSYM_FALLBACK_DEGREE", "4"))


def default_degree_cap(dim):
    """按维数返回默认截断次数"""
    override = os.getenv(f"WCOSYM_DEGREE_N{dim}")
    if override:
        return int(override)
    return DEFAULT_DEGREE_CAPS.get(dim, FALLBACK_DEGREE_CAP)


# 采样配置
SAMPLE_COUNT = int(os.getenv("WCOSYM_SAMPLE_COUNT", "100"))
SAMPLE_RADIUS = float(os.getenv("WCOSYM_SAMPLE_RADIUS", "0.6"))
SAMPLE_SEED = int(os.getenv("WCOSYM_SAMPLE_SEED", "0xB411"), 0)

# 自同构判定的采样网格
AUTOMORPHISM_GRID_SIZE = int(os.getenv("WCOSYM_AUTOMORPHISM_GRID_SIZE", "200"))
AUTOMORPHISM_GRID_RADIUS = float(os.getenv("WCOSYM_AUTOMORPHISM_GRID_RADIUS", "0.99"))
AUTOMORPHISM_GRID_SEED = int(os.getenv("WCOSYM_AUTOMORPHISM_GRID_SEED", "0x5EED"), 0)

# 数值容差配置
_DEFAULT_TOLERANCES = {
    "denominator": 1e-13,
    "krein": 1e-10,
    "exact": 1e-9,
    "symmetric": 1e-10,
    "linear": 1e-12,
    "real": 1e-12,
    "eigenvector": 1e-10,
    "unitary_symmetric": 1e-12,
    "conjugation": 1e-6,
    "kernel": 1e-9,
    "condition": 1e-10,
    "contraction": 1e-10,
}

TOLERANCES = {
    name: float(os.getenv(f"WCOSYM_TOL_{name.upper()}", str(value)))
    for name, value in _DEFAULT_TOLERANCES.items()
}


def tolerance(name, overrides=None):
    """
    读取指定名称的容差

    Args:
        name (str): 容差名称
        overrides (dict, optional): 作业级别的覆盖值

    Returns:
        float: 容差
    """
    if overrides and name in overrides:
        return float(overrides[name])
    return TOLERANCES[name]


# 日志配置
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_FILE = os.getenv("WCOSYM_LOG_FILE", "wcosym.log")
