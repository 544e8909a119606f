"""
作业执行模块
按 JobSpec 中列出的检验逐项执行，汇总判定结果、残差与耗时
"""

import asyncio
import json
import logging
import os
import time
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from config import settings
from wcosym.errors import InvalidConjugation, PreconditionViolated, SchemaError, WcosymError
from wcosym.jobs.spec import serialize_map
from wcosym.operators.compression import WeightedCompositionSpec, build_compression
from wcosym.operators.conjugation import JCU, PlainJ, build_conjugation
from wcosym.operators.export import export_matrix
from wcosym.operators.residuals import (
    default_samples,
    hermitian_residual,
    kernel_hermitian_residual,
    kernel_symmetry_residual,
    normal_residual,
    symmetry_residual_matrix,
    unitary_residual,
)
from wcosym.verdicts.dirichlet import (
    classify_dirichlet_hermitian,
    classify_dirichlet_J,
    classify_dirichlet_JCU,
    classify_dirichlet_unitary,
)
from wcosym.verdicts.hardy import (
    SymbolFamily,
    build_unitary_Jsym,
    conjugate_symbols,
    hardy_hermitian_check,
    hardy_normality_check,
    hardy_unitary_check,
    jw_affine_symmetry_check,
)
from wcosym.verdicts.report import jsonable

logger = logging.getLogger(__name__)

VERDICT_CHECKS = (
    "classify_dirichlet_J",
    "classify_dirichlet_JCU",
    "classify_dirichlet_hermitian",
    "classify_dirichlet_unitary",
    "hardy_unitary",
    "hardy_hermitian",
    "hardy_normality",
    "jw_affine",
    "build_unitary_Jsym",
    "conjugate_symbols",
)
SYMMETRY_CHECKS = ("matrix_symmetry", "kernel_symmetry")


@dataclass
class CheckResult:
    """
    单项检验结果

    holds 为 None 表示只报告数值（如非精确压缩的残差），不计入通过与否
    """

    check: str
    holds: bool = None
    value: float = None
    threshold: float = None
    verdict: dict = None
    details: dict = field(default_factory=dict)
    elapsed_ms: float = 0.0

    def to_dict(self, include_timing=True):
        out = {
            "check": self.check,
            "holds": self.holds,
            "value": self.value,
            "threshold": self.threshold,
            "verdict": self.verdict,
            "details": jsonable(self.details),
        }
        if include_timing:
            out["elapsed_ms"] = self.elapsed_ms
        return out


@dataclass
class Report:
    """一个作业的报告"""

    name: str
    space: dict
    degree_cap: int
    results: list = field(default_factory=list)
    elapsed_ms: float = 0.0

    @property
    def holds(self):
        """所有给出结论的检验都成立"""
        return all(r.holds is not False for r in self.results)

    def failed(self):
        return [r.check for r in self.results if r.holds is False]

    def to_dict(self, include_timing=True):
        out = {
            "name": self.name,
            "space": self.space,
            "degree_cap": self.degree_cap,
            "holds": self.holds,
            "results": [r.to_dict(include_timing) for r in self.results],
        }
        if include_timing:
            out["elapsed_ms"] = self.elapsed_ms
        return out

    def to_json(self, include_timing=True):
        return json.dumps(self.to_dict(include_timing), ensure_ascii=False, indent=2)

    def to_text(self):
        """对齐的文本摘要"""
        title = self.name or "job"
        lines = [f"{title}  [{self.space['kind']} N={self.space['dim']} D={self.degree_cap}]"]
        width = max((len(r.check) for r in self.results), default=0)
        for r in self.results:
            mark = {True: "PASS", False: "FAIL", None: "INFO"}[r.holds]
            value = "" if r.value is None else f"{r.value:.3e}"
            threshold = "" if r.threshold is None else f"≤ {r.threshold:.1e}"
            witness = ""
            if r.verdict and r.verdict.get("witness"):
                witness = f"witness={r.verdict['witness']}"
            lines.append(f"  {r.check:<{width}}  {mark}  {value:>10}  {threshold:>9}  {witness}".rstrip())
        lines.append(f"  => {'PASS' if self.holds else 'FAIL'}")
        return "\n".join(lines)


class _JobContext:
    """一次作业执行中按需构建并缓存的对象"""

    def __init__(self, spec):
        self.spec = spec
        self.tolerances = dict(spec.tolerances)
        self.params = spec.parameters()

    def tol(self, name):
        return settings.tolerance(name, self.tolerances)

    def require(self, *keys):
        missing = [k for k in keys if k not in self.params]
        if missing:
            raise SchemaError(f"/params/{missing[0]}", "该检验需要此参数")
        return [self.params[k] for k in keys]

    @cached_property
    def operator(self):
        spec = self.spec
        if spec.psi is not None and spec.phi is not None:
            return WeightedCompositionSpec(spec.space, spec.weight(), spec.map())
        if {"a1", "a0", "A"} <= set(self.params):
            family = SymbolFamily(self.params["a1"], self.params["a0"], self.params["A"])
            return WeightedCompositionSpec(spec.space, family.psi(), family.phi())
        raise SchemaError("/psi" if spec.psi is None else "/phi", "缺少算子符号")

    @cached_property
    def conjugation(self):
        return self.spec.conjugation_spec() or PlainJ()

    @cached_property
    def compression(self):
        return build_compression(self.operator, self.spec.degree_cap)

    @cached_property
    def conjugation_matrix(self):
        return build_conjugation(self.conjugation, self.spec.space, self.spec.degree_cap)

    @cached_property
    def samples(self):
        return default_samples(self.spec.dim, self.spec.sample_count, self.spec.seed)

    @property
    def leading_degree(self):
        return self.params.get("leading_degree")

    def family(self):
        if {"a1", "a0", "A"} <= set(self.params):
            return self.params["a1"], self.params["a0"], self.params["A"]
        family = SymbolFamily.from_spec(self.operator, self.tolerances)
        return family.a1, family.a0, family.A

    def symmetric_u(self):
        if isinstance(self.conjugation, JCU):
            return self.conjugation.u
        (u,) = self.require("U")
        return u


class JobRunner:
    """作业执行器"""

    def __init__(self, export_dir=None):
        """
        初始化作业执行器

        Args:
            export_dir (str, optional): matrix_export 的输出目录
        """
        self.export_dir = export_dir or settings.OUTPUT_DIR
        self.checks = {
            "classify_dirichlet_J": self._classify_dirichlet_J,
            "classify_dirichlet_JCU": self._classify_dirichlet_JCU,
            "classify_dirichlet_hermitian": self._classify_dirichlet_hermitian,
            "classify_dirichlet_unitary": self._classify_dirichlet_unitary,
            "hardy_unitary": self._hardy_unitary,
            "hardy_hermitian": self._hardy_hermitian,
            "hardy_normality": self._hardy_normality,
            "jw_affine": self._jw_affine,
            "build_unitary_Jsym": self._build_unitary_Jsym,
            "conjugate_symbols": self._conjugate_symbols,
            "matrix_symmetry": self._matrix_symmetry,
            "kernel_symmetry": self._kernel_symmetry,
            "kernel_hermitian": self._kernel_hermitian,
            "hermitian_residual": self._hermitian_residual,
            "unitary_residual": self._unitary_residual,
            "normal_residual": self._normal_residual,
            "conjugation_validity": self._conjugation_validity,
            "matrix_export": self._matrix_export,
        }

    def operator(self, spec):
        """作业描述的算子符号；未给出 psi/phi 时由 params 中的 a1、a0、A 构建"""
        return _JobContext(spec).operator

    def run_job(self, spec, checks=None):
        """
        执行一个作业

        Args:
            spec (JobSpec): 作业
            checks (list, optional): 覆盖作业中的检验列表

        Returns:
            Report: 报告，结果顺序与检验列表一致

        Raises:
            SchemaError: 检验名未知或缺少检验所需的字段
            WcosymError: 数值层面的错误，path 属性指向相关字段
        """
        names = list(spec.checks if checks is None else checks)
        for i, name in enumerate(names):
            if name not in self.checks:
                raise SchemaError(f"/checks/{i}", f"未知的检验: {name}")

        ctx = _JobContext(spec)
        report = Report(spec.name, spec.space.to_dict(), spec.degree_cap)
        start = time.perf_counter()
        for name in names:
            tick = time.perf_counter()
            try:
                result = self.checks[name](ctx)
            except SchemaError:
                raise
            except WcosymError as e:
                if getattr(e, "path", None) is None:
                    e.path = _source_field(name)
                logger.error(f"检验 {name} 失败: {str(e)}")
                raise
            result.elapsed_ms = (time.perf_counter() - tick) * 1000.0
            report.results.append(result)
        report.elapsed_ms = (time.perf_counter() - start) * 1000.0
        logger.info(f"成功执行作业 {spec.name or ''}: {len(names)} 项检验，"
                    f"{'全部通过' if report.holds else '未通过: ' + ', '.join(report.failed())}")
        return report

    async def run_batch(self, specs, checks=None, progress=None):
        """
        并行执行多个作业，每个作业在独立线程中运行，报告顺序与输入一致

        Args:
            specs (list): JobSpec 列表
            checks (list, optional): 覆盖检验列表
            progress (tqdm, optional): 进度条

        Returns:
            list: Report 列表
        """
        async def one(spec):
            report = await asyncio.to_thread(self.run_job, spec, checks)
            if progress is not None:
                progress.update(1)
            return report

        return list(await asyncio.gather(*(one(spec) for spec in specs)))

    # ---------------------------------------------------------------------
    # 判定类检验
    # ---------------------------------------------------------------------

    @staticmethod
    def _from_verdict(name, verdict):
        return CheckResult(name, holds=verdict.holds, verdict=verdict.to_dict())

    def _classify_dirichlet_J(self, ctx):
        return self._from_verdict("classify_dirichlet_J", classify_dirichlet_J(ctx.operator, ctx.tolerances))

    def _classify_dirichlet_JCU(self, ctx):
        verdict = classify_dirichlet_JCU(ctx.operator, ctx.symmetric_u(), ctx.tolerances)
        return self._from_verdict("classify_dirichlet_JCU", verdict)

    def _classify_dirichlet_hermitian(self, ctx):
        verdict = classify_dirichlet_hermitian(ctx.operator, ctx.tolerances)
        return self._from_verdict("classify_dirichlet_hermitian", verdict)

    def _classify_dirichlet_unitary(self, ctx):
        verdict = classify_dirichlet_unitary(ctx.operator, ctx.tolerances)
        return self._from_verdict("classify_dirichlet_unitary", verdict)

    def _hardy_unitary(self, ctx):
        return self._from_verdict("hardy_unitary", hardy_unitary_check(*ctx.family(), ctx.tolerances))

    def _hardy_hermitian(self, ctx):
        return self._from_verdict("hardy_hermitian", hardy_hermitian_check(*ctx.family(), ctx.tolerances))

    def _hardy_normality(self, ctx):
        a1, a0, a = ctx.family()
        u = ctx.params.get("U", np.eye(a.shape[0]))
        return self._from_verdict("hardy_normality", hardy_normality_check(a1, a0, a, u, ctx.tolerances))

    def _jw_affine(self, ctx):
        a, c = ctx.require("A", "c")
        verdict = jw_affine_symmetry_check(a, c, ctx.samples, ctx.tolerances)
        result = self._from_verdict("jw_affine", verdict)
        if "kernel_residual" in verdict.diagnostics:
            result.value = verdict.diagnostics["kernel_residual"]
            result.threshold = ctx.tol("kernel")
            result.holds = result.holds and result.value <= result.threshold
        return result

    def _build_unitary_Jsym(self, ctx):
        choice = ctx.params.get("choice", "involution")
        ctx.require("U" if choice == "rotation" else "a")
        try:
            psi, phi = build_unitary_Jsym(choice, ctx.params, ctx.tolerances)
        except PreconditionViolated as e:
            return CheckResult("build_unitary_Jsym", holds=False, details={"violations": e.violations})
        w = WeightedCompositionSpec(ctx.spec.space, psi, phi)
        residual = kernel_symmetry_residual(w, PlainJ(), ctx.samples)
        return CheckResult("build_unitary_Jsym", holds=residual <= ctx.tol("kernel"), value=residual,
                           threshold=ctx.tol("kernel"),
                           details={"Psi": psi.to_dict(), "Phi": serialize_map(phi)})

    def _conjugate_symbols(self, ctx):
        psi, phi = conjugate_symbols(ctx.operator, ctx.conjugation, ctx.tolerances)
        w = WeightedCompositionSpec(ctx.spec.space, psi, phi)
        residual = kernel_symmetry_residual(w, ctx.conjugation, ctx.samples)
        return CheckResult("conjugate_symbols", holds=residual <= ctx.tol("kernel"), value=residual,
                           threshold=ctx.tol("kernel"),
                           details={"psi": psi.to_dict(), "phi": serialize_map(phi)})

    # ---------------------------------------------------------------------
    # 残差类检验
    # ---------------------------------------------------------------------

    def _matrix_symmetry(self, ctx):
        c = ctx.conjugation_matrix
        residual = symmetry_residual_matrix(ctx.compression, c, ctx.leading_degree)
        threshold = ctx.tol("symmetric")
        # 非精确的共轭压缩只报告残差
        holds = residual <= threshold if c.exact else None
        return CheckResult("matrix_symmetry", holds=holds, value=residual, threshold=threshold,
                           details={"conjugation": ctx.conjugation.kind, "exact": c.exact,
                                    "leading_degree": ctx.leading_degree})

    def _kernel_symmetry(self, ctx):
        residual = kernel_symmetry_residual(ctx.operator, ctx.conjugation, ctx.samples)
        return CheckResult("kernel_symmetry", holds=residual <= ctx.tol("kernel"), value=residual,
                           threshold=ctx.tol("kernel"),
                           details={"conjugation": ctx.conjugation.kind, "samples": len(ctx.samples)})

    def _kernel_hermitian(self, ctx):
        residual = kernel_hermitian_residual(ctx.operator, ctx.samples)
        return CheckResult("kernel_hermitian", holds=residual <= ctx.tol("kernel"), value=residual,
                           threshold=ctx.tol("kernel"), details={"samples": len(ctx.samples)})

    def _residual(self, name, fn, ctx):
        value = fn(ctx.compression, ctx.leading_degree)
        threshold = ctx.tol("exact")
        exact = ctx.operator.degree_preserving(ctx.tol("linear"))
        details = {"leading_degree": ctx.leading_degree, "exact": exact}
        if not exact:
            # P_D W P_D 不再是 W 的限制，残差只随 D 收敛，不据此判定
            details["caution"] = "non_degree_preserving"
            logger.warning(f"⚠️ {name}: φ 或 ψ 不保次数，截断次数 {ctx.spec.degree_cap} 下的残差仅供参考")
        return CheckResult(name, holds=value <= threshold if exact else None, value=value,
                           threshold=threshold, details=details)

    def _hermitian_residual(self, ctx):
        return self._residual("hermitian_residual", hermitian_residual, ctx)

    def _unitary_residual(self, ctx):
        return self._residual("unitary_residual", unitary_residual, ctx)

    def _normal_residual(self, ctx):
        return self._residual("normal_residual", normal_residual, ctx)

    def _conjugation_validity(self, ctx):
        threshold = ctx.tol("conjugation")
        try:
            c = ctx.conjugation_matrix
        except InvalidConjugation as e:
            return CheckResult("conjugation_validity", holds=False, threshold=threshold,
                               details={"error": str(e)})
        leading = None
        if ctx.leading_degree is not None:
            leading = ctx.compression.leading_size(ctx.leading_degree)
        involution = c.involution_residual(leading)
        isometry = c.isometry_residual(leading)
        holds = max(involution, isometry) <= threshold if c.exact else None
        return CheckResult("conjugation_validity", holds=holds, value=max(involution, isometry),
                           threshold=threshold,
                           details={"conjugation": ctx.conjugation.kind, "exact": c.exact,
                                    "involution_residual": involution, "isometry_residual": isometry})

    def _matrix_export(self, ctx):
        compression = ctx.compression
        space = ctx.spec.space
        file_name = f"{ctx.spec.name or 'job'}_{space.kind.value}_N{space.dim}_D{compression.degree_cap}.json"
        path = os.path.join(self.export_dir, file_name)
        export_matrix(compression, path)
        return CheckResult("matrix_export", holds=True,
                           details={"path": path, "size": compression.size})


def _source_field(check):
    if check in ("hardy_unitary", "hardy_hermitian", "hardy_normality", "jw_affine", "build_unitary_Jsym"):
        return "/params"
    if check in ("conjugation_validity", "classify_dirichlet_JCU"):
        return "/conjugation"
    return "/phi"


# 创建默认作业执行器实例
default_job_runner = None


def get_job_runner():
    """
    获取默认作业执行器实例

    Returns:
        JobRunner: 作业执行器实例
    """
    global default_job_runner
    if default_job_runner is None:
        default_job_runner = JobRunner()
    return default_job_runner


def run_job(spec, checks=None):
    """用默认执行器执行一个作业"""
    return get_job_runner().run_job(spec, checks)
