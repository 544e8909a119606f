"""
加权复合算子复对称性工具的命令行入口
读取 JSON 作业，执行判定与残差检验，输出 JSON 报告或对齐的文本摘要
"""

import asyncio
import json
import logging
import sys
import time
from dataclasses import replace

import click
from tqdm import tqdm

from config import settings

# 设置日志
logging.basicConfig(
    level=settings.LOG_LEVEL,
    format=settings.LOG_FORMAT,
    handlers=[
        logging.FileHandler(settings.LOG_FILE),
        logging.StreamHandler(sys.stderr)
    ]
)

logger = logging.getLogger(__name__)

# 导入自定义模块
from wcosym.errors import SchemaError, WcosymError
from wcosym.jobs.runner import SYMMETRY_CHECKS, VERDICT_CHECKS, get_job_runner
from wcosym.jobs.spec import parse_batch
from wcosym.jobs.suite import CRITERIA, run_suite
from wcosym.operators.compression import build_compression
from wcosym.operators.export import export_matrix

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


def parse_tolerances(values):
    """--tol NAME=VALUE 列表转为字典"""
    out = {}
    for item in values:
        name, sep, value = item.partition("=")
        if not sep or name not in settings.TOLERANCES:
            raise click.BadParameter(f"无法识别的容差: {item}", param_hint="--tol")
        try:
            out[name] = float(value)
        except ValueError:
            raise click.BadParameter(f"容差必须是数值: {item}", param_hint="--tol")
    return out


def job_options(func):
    """各子命令共用的作业参数"""
    options = [
        click.argument('job_file', type=click.Path(exists=True, dir_okay=False)),
        click.option('--degree', type=click.IntRange(min=1), default=None, help='截断次数 D'),
        click.option('--samples', type=click.IntRange(min=1), default=None, help='核残差的采样点对数'),
        click.option('--seed', type=str, default=None, help='随机种子，支持十六进制如 0xB411'),
        click.option('--tol', 'tol', multiple=True, help='容差覆盖 NAME=VALUE，可重复'),
        click.option('--out', 'out', type=click.Path(dir_okay=False), default=None, help='输出文件路径'),
        click.option('--format', 'fmt', type=click.Choice(['json', 'text']), default='text', help='输出格式'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def load_jobs(job_file, degree, samples, seed, tol):
    """读取作业文件并应用命令行覆盖"""
    with open(job_file, 'rb') as f:
        specs = parse_batch(f.read())
    seed = int(seed, 0) if seed is not None else None
    tolerances = parse_tolerances(tol)
    return [spec.with_overrides(degree, samples, seed, tolerances) for spec in specs]


def emit(text, out):
    if out:
        with open(out, 'w', encoding='utf-8') as f:
            f.write(text + "\n")
        print(f"📄 报告已保存至: {out}", file=sys.stderr)
    else:
        click.echo(text)


def select_checks(spec, group, default):
    """从作业的检验列表中挑出属于本子命令的检验，没有时使用默认值"""
    chosen = [name for name in spec.checks if name in group]
    return chosen or default(spec)


def default_verdicts(spec):
    conjugation = (spec.conjugation or {}).get("type")
    if spec.space.is_dirichlet:
        return ["classify_dirichlet_JCU" if conjugation == "jcu" else "classify_dirichlet_J"]
    if {"A", "c"} <= set(spec.params) and "a1" not in spec.params:
        return ["jw_affine"]
    return ["hardy_unitary", "hardy_hermitian"]


async def run_jobs(specs, group=None, default=None):
    """执行一批作业，报告顺序与输入一致"""
    if group is not None:
        specs = [replace(spec, checks=tuple(select_checks(spec, group, default))) for spec in specs]
    with tqdm(total=len(specs), desc="执行作业", unit="作业", disable=len(specs) < 2) as progress:
        return await get_job_runner().run_batch(specs, progress=progress)


def render(reports, fmt):
    if fmt == 'json':
        payload = [r.to_dict() for r in reports]
        return json.dumps(payload[0] if len(payload) == 1 else payload, ensure_ascii=False, indent=2)
    return "\n\n".join(r.to_text() for r in reports)


def execute(job_file, degree, samples, seed, tol, out, fmt, group=None, default=None):
    """子命令的公共流程：解析、执行、输出、返回退出码"""
    start_time = time.time()
    try:
        specs = load_jobs(job_file, degree, samples, seed, tol)
        reports = asyncio.run(run_jobs(specs, group, default))
    except SchemaError as e:
        logger.error(f"作业描述不合法: {str(e)}")
        print(f"\n❌ 作业描述不合法 {e.path}: {e.message}", file=sys.stderr)
        return EXIT_INPUT
    except (WcosymError, ValueError) as e:
        path = getattr(e, "path", None)
        logger.error(f"作业执行失败: {str(e)}")
        print(f"\n❌ 作业执行失败{' ' + path if path else ''}: {str(e)}", file=sys.stderr)
        return EXIT_INPUT

    emit(render(reports, fmt), out)
    passed = all(r.holds for r in reports)
    elapsed = time.time() - start_time
    mark = "✅" if passed else "❌"
    print(f"\n{mark} {sum(r.holds for r in reports)}/{len(reports)} 个作业通过 (用时: {elapsed:.2f}秒)",
          file=sys.stderr)
    return EXIT_PASS if passed else EXIT_FAIL


@click.group()
def cli():
    """加权复合算子的复对称性、自伴性、酉性与正规性检验工具"""


@cli.command()
@job_options
def classify(job_file, degree, samples, seed, tol, out, fmt):
    """按闭式判定定理给出结论"""
    sys.exit(execute(job_file, degree, samples, seed, tol, out, fmt, VERDICT_CHECKS, default_verdicts))


@cli.command('check-symmetry')
@job_options
def check_symmetry(job_file, degree, samples, seed, tol, out, fmt):
    """计算矩阵压缩与核层面的对称残差"""
    sys.exit(execute(job_file, degree, samples, seed, tol, out, fmt, SYMMETRY_CHECKS,
                     lambda spec: list(SYMMETRY_CHECKS)))


@cli.command('check-conjugation')
@job_options
def check_conjugation(job_file, degree, samples, seed, tol, out, fmt):
    """检验共轭算子的对合与等距残差"""
    sys.exit(execute(job_file, degree, samples, seed, tol, out, fmt, ("conjugation_validity",),
                     lambda spec: ["conjugation_validity"]))


@cli.command('run')
@job_options
def run(job_file, degree, samples, seed, tol, out, fmt):
    """执行作业中列出的全部检验"""
    sys.exit(execute(job_file, degree, samples, seed, tol, out, fmt))


@cli.command('build-matrix')
@job_options
def build_matrix(job_file, degree, samples, seed, tol, out, fmt):
    """导出 P_D W P_D 的矩阵（grlex 排序的正交基）"""
    try:
        specs = load_jobs(job_file, degree, samples, seed, tol)
        if len(specs) != 1:
            raise SchemaError("/", "build-matrix 只接受单个作业")
        spec = specs[0]
        compression = build_compression(get_job_runner().operator(spec), spec.degree_cap)
    except SchemaError as e:
        print(f"\n❌ 作业描述不合法 {e.path}: {e.message}", file=sys.stderr)
        sys.exit(EXIT_INPUT)
    except (WcosymError, ValueError) as e:
        print(f"\n❌ 构建矩阵失败: {str(e)}", file=sys.stderr)
        sys.exit(EXIT_INPUT)

    text = export_matrix(compression, out)
    if out:
        print(f"📈 {compression.size}×{compression.size} 矩阵已保存至: {out}", file=sys.stderr)
    else:
        click.echo(text)
    sys.exit(EXIT_PASS)


@cli.command()
@click.option('--quick', is_flag=True, help='把实例数缩小到五分之一')
@click.option('--only', multiple=True, type=click.Choice([name for name, _, _ in CRITERIA]),
              help='只运行指定的检验组，可重复')
@click.option('--out', 'out', type=click.Path(dir_okay=False), default=None, help='输出文件路径')
@click.option('--format', 'fmt', type=click.Choice(['json', 'text']), default='text', help='输出格式')
def suite(quick, only, out, fmt):
    """运行验收检验组"""
    print("\n🚀 开始运行验收检验组...", file=sys.stderr)
    start_time = time.time()
    try:
        results = run_suite("quick" if quick else "full", only)
    except Exception as e:
        print(f"\n❌ 验收检验运行出错: {str(e)}", file=sys.stderr)
        raise

    if fmt == 'json':
        text = json.dumps([r.to_dict() for r in results], ensure_ascii=False, indent=2)
    else:
        width = max(len(r.name) for r in results)
        lines = [f"{'✅' if r.holds else '❌'} {r.name:<{width}}  {r.passed:>4}/{r.total:<4}  {r.elapsed:6.2f}s"
                 for r in results]
        text = "\n".join(lines)
    emit(text, out)

    passed = all(r.holds for r in results)
    print(f"\n✨ 验收检验完成 (用时: {time.time() - start_time:.2f}秒)", file=sys.stderr)
    sys.exit(EXIT_PASS if passed else EXIT_FAIL)


if __name__ == "__main__":
    try:
        cli()
    except KeyboardInterrupt:
        print("\n\n👋 程序已终止")
