from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any, TextIO

import mpmath

from .config import QuadConfig
from .harness import (
    CatalogEntry,
    EmitService,
    LemmaCheckService,
    LemmaRow,
    OutputFormat,
    RateFit,
    RateModel,
    StudyMode,
    StudyRecord,
    StudyService,
    catalog_lookup,
    fit_rate,
)
from .log import logger, setup_default_logging
from .model import DecayKind, DecayModelError, DecayProfile
from .numerics import PrecisionContext, format_real
from .planner import (
    ErrorBoundReport,
    QuadraturePlan,
    plan_double_exponential,
    plan_exponential,
)
from .quadrature import QuadratureResult, evaluate_adaptive, evaluate_box


class QuadratureApp:
    """Planning, integration and study facade.

    Typical usage:
    1. Create one `QuadratureApp`, optionally with a precision and output dir.
    2. Adjust `app.cfg.plan` / `app.cfg.adaptive` / `app.cfg.study` as needed.
    3. Call `plan`, `integrate`, `study`, `fit` or `lemma_check`.
    4. Hand results to `emit`.

    Every call runs inside the configured precision scope.
    """

    def __init__(
        self,
        *,
        precision: PrecisionContext | None = None,
        output_dir: Path | None = None,
        log_level: int | None = logging.INFO,
    ):
        self.cfg = QuadConfig(precision=precision, output_dir=output_dir)
        if log_level is not None:
            setup_default_logging(log_level)
        self.studies = StudyService(self.cfg)
        self.emitter = EmitService(self.cfg)
        self.lemmas = LemmaCheckService()

    def entry(
        self, name: str, dims: int, params: Mapping[str, Any] | None = None
    ) -> CatalogEntry:
        with self.cfg.precision.activate():
            return catalog_lookup(name, dims, params)

    def _plan(
        self, profile: DecayProfile, budget: int
    ) -> tuple[QuadraturePlan, ErrorBoundReport]:
        lam = self.cfg.plan.lam
        if profile.function_kind is DecayKind.EXP:
            return plan_exponential(profile, budget, lam)
        if profile.function_kind is DecayKind.DEXP:
            return plan_double_exponential(profile, budget, lam, self.cfg.plan.balance)
        raise DecayModelError(
            "planning requires exponential or double-exponential decay"
        )

    def plan(
        self, profile: DecayProfile, budget: int
    ) -> tuple[QuadraturePlan, ErrorBoundReport]:
        with self.cfg.precision.activate():
            plan, report = self._plan(profile, budget)
        logger.info(
            "[app] planned N=%d points=%d bound=%s",
            budget,
            plan.points_total,
            mpmath.nstr(report.total_bound, 5),
        )
        return plan, report

    def integrate(
        self,
        entry: CatalogEntry,
        budget: int,
        *,
        profile: DecayProfile | None = None,
    ) -> tuple[QuadraturePlan, ErrorBoundReport, QuadratureResult]:
        """Plan for ``profile`` (default: the entry's own), then sum on that grid."""
        with self.cfg.precision.activate():
            plan, report = self._plan(profile or entry.profile, budget)
            f = entry.integrand(plan.h_per_dim)
            result = evaluate_box(f, plan.h_per_dim, plan.half_width_per_dim)
        return plan, report, result

    def integrate_adaptive(self, entry: CatalogEntry, m: int) -> QuadratureResult:
        adaptive = self.cfg.adaptive
        with self.cfg.precision.activate():
            h = mpmath.pi / m
            f = entry.integrand([h] * entry.dims)
            return evaluate_adaptive(
                f,
                h,
                adaptive.threshold_exponent(entry.dims),
                stop_run=adaptive.stop_run,
                max_points=adaptive.max_points_per_ray,
            )

    def study(
        self,
        entry: CatalogEntry,
        budgets: Sequence[int],
        *,
        mode: StudyMode | str = StudyMode.PLANNED,
    ) -> list[StudyRecord]:
        with self.cfg.precision.activate():
            return self.studies.run(entry, budgets, mode=mode)

    def fit(
        self, records: Sequence[StudyRecord], model: RateModel | str, dims: int
    ) -> RateFit:
        with self.cfg.precision.activate():
            return fit_rate(records, model, dims)

    def lemma_check(self) -> list[LemmaRow]:
        with self.cfg.precision.activate():
            return self.lemmas.run()

    def describe_result(
        self, entry: CatalogEntry, result: QuadratureResult
    ) -> dict[str, Any]:
        with self.cfg.precision.activate():
            reference = entry.reference_value
            error = abs(result.estimate - reference) / abs(reference)
            return {
                "integrand": entry.to_dict(),
                "estimate": format_real(result.estimate),
                "reference": format_real(entry.reference_value),
                "relative_error": format_real(error),
                "points_evaluated": result.points_evaluated,
                "truncation_box_used": [
                    list(pair) for pair in result.truncation_box_used
                ],
            }

    def emit(
        self,
        payload: Any,
        fmt: OutputFormat | str,
        path: Path | str | None = None,
        *,
        stream: TextIO | None = None,
    ) -> Path | None:
        with self.cfg.precision.activate():
            return self.emitter.emit(payload, fmt, path, stream=stream)
