from __future__ import annotations

from collections.abc import Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any

import mpmath
from mpmath import mp

from ..config import AdaptiveConfig, QuadConfig
from ..log import get_logger
from ..model import DecayKind
from ..numerics import RealLike, format_real, to_real
from ..planner import Balance, plan_double_exponential, plan_exponential
from ..quadrature import QuadratureResult, evaluate_adaptive, evaluate_box
from .catalog import CatalogEntry, CatalogError, catalog_lookup

logger = get_logger("study")

CSV_FIELDS = (
    "budget_N",
    "points_used",
    "estimate",
    "reference",
    "relative_error",
    "predicted_bound",
    "h",
    "lambda",
)

# records this close to the working precision carry no rate information
_PRECISION_GUARD_DIGITS = 10


class StudyMode(str, Enum):
    PLANNED = "planned"
    ADAPTIVE = "adaptive"

    @classmethod
    def from_str(cls, value: "StudyMode | str") -> "StudyMode":
        if isinstance(value, StudyMode):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise CatalogError(f"Unsupported study mode: {value}")


@dataclass(frozen=True)
class StudyRecord:
    """One row of a convergence study.

    In adaptive mode ``budget_N`` holds the sweep parameter M and
    ``predicted_bound`` is None.
    """

    budget_N: int
    points_used: int
    estimate: mpmath.mpf
    reference: mpmath.mpf
    relative_error: mpmath.mpf
    predicted_bound: mpmath.mpf | None
    h: mpmath.mpf
    lam: mpmath.mpf
    precision_limited: bool = False
    box: tuple[tuple[int, int], ...] = field(default=(), compare=False)

    def with_reference(self, reference: mpmath.mpf) -> "StudyRecord":
        error = abs(self.estimate - reference) / abs(reference)
        return replace(
            self,
            reference=reference,
            relative_error=error,
            precision_limited=_is_precision_limited(error),
        )

    @classmethod
    def from_csv_row(cls, row: Mapping[str, str]) -> "StudyRecord":
        try:
            bound = str(row["predicted_bound"]).strip()
            error = to_real(row["relative_error"])
            return cls(
                budget_N=int(row["budget_N"]),
                points_used=int(row["points_used"]),
                estimate=to_real(row["estimate"]),
                reference=to_real(row["reference"]),
                relative_error=error,
                predicted_bound=to_real(bound) if bound else None,
                h=to_real(row["h"]),
                lam=to_real(row["lambda"]),
                precision_limited=_is_precision_limited(error),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CatalogError(f"malformed study row: {exc}") from exc

    def csv_row(self) -> list[str]:
        return [
            str(self.budget_N),
            str(self.points_used),
            format_real(self.estimate),
            format_real(self.reference),
            format_real(self.relative_error),
            "" if self.predicted_bound is None else format_real(self.predicted_bound),
            format_real(self.h),
            format_real(self.lam),
        ]

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = dict(zip(CSV_FIELDS, self.csv_row()))
        payload["budget_N"] = self.budget_N
        payload["points_used"] = self.points_used
        payload["predicted_bound"] = (
            None if self.predicted_bound is None else format_real(self.predicted_bound)
        )
        payload["precision_limited"] = self.precision_limited
        payload["box"] = [list(pair) for pair in self.box]
        return payload


@dataclass(frozen=True)
class StudyTask:
    """Picklable description of one budget; workers rebuild the entry by name."""

    name: str
    dims: int
    params: Mapping[str, Any]
    budget: int
    lam: RealLike
    mode: StudyMode
    balance: Balance
    a: RealLike | None
    decimal_digits: int
    stop_run: int = 3
    max_points: int = 10**6


def _is_precision_limited(error: mpmath.mpf) -> bool:
    return error < mpmath.mpf(10) ** (-(mp.dps - _PRECISION_GUARD_DIGITS))


def _make_record(
    entry: CatalogEntry,
    budget: int,
    result: QuadratureResult,
    bound: mpmath.mpf | None,
    h: mpmath.mpf,
    lam: mpmath.mpf,
) -> StudyRecord:
    reference = entry.reference_value
    error = abs(result.estimate - reference) / abs(reference)
    limited = _is_precision_limited(error)
    if limited:
        logger.warning(
            "[study] %s N=%d: relative error %s is at working precision",
            entry.name,
            budget,
            mpmath.nstr(error, 5),
        )
    return StudyRecord(
        budget_N=budget,
        points_used=result.points_evaluated,
        estimate=result.estimate,
        reference=reference,
        relative_error=error,
        predicted_bound=bound,
        h=h,
        lam=lam,
        precision_limited=limited,
        box=result.truncation_box_used,
    )


def _planned_record(entry: CatalogEntry, task: StudyTask) -> StudyRecord:
    profile = entry.profile
    if profile.function_kind is DecayKind.EXP:
        plan, report = plan_exponential(profile, task.budget, task.lam)
    elif profile.function_kind is DecayKind.DEXP:
        plan, report = plan_double_exponential(
            profile, task.budget, task.lam, task.balance
        )
    else:
        raise CatalogError(f"'{entry.name}' has no exponential profile to plan with")
    f = entry.integrand(plan.h_per_dim)
    result = evaluate_box(f, plan.h_per_dim, plan.half_width_per_dim)
    return _make_record(
        entry, task.budget, result, report.total_bound, plan.h, plan.lam
    )


def _adaptive_record(entry: CatalogEntry, task: StudyTask) -> StudyRecord:
    if task.a is None:
        raise CatalogError("adaptive mode requires a threshold exponent")
    if task.budget < 1:
        raise CatalogError(f"M must be a positive integer, got {task.budget}")
    h = mp.pi / task.budget
    f = entry.integrand([h] * entry.dims)
    result = evaluate_adaptive(
        f, h, task.a, stop_run=task.stop_run, max_points=task.max_points
    )
    return _make_record(entry, task.budget, result, None, h, to_real(task.lam))


def run_study_task(task: StudyTask) -> StudyRecord:
    with mpmath.workdps(task.decimal_digits):
        entry = catalog_lookup(task.name, task.dims, task.params)
        if task.mode is StudyMode.PLANNED:
            return _planned_record(entry, task)
        return _adaptive_record(entry, task)


def run_study(
    entry: CatalogEntry,
    budgets: Sequence[int],
    lam: RealLike = 1,
    mode: StudyMode | str = StudyMode.PLANNED,
    a: RealLike | None = None,
    *,
    balance: Balance | str = Balance.APPROX_LOG,
    workers: int = 1,
    self_convergence: bool = False,
    adaptive: AdaptiveConfig | None = None,
) -> list[StudyRecord]:
    """One record per budget (or per M in adaptive mode), in input order."""
    mode = StudyMode.from_str(mode)
    adaptive = adaptive or AdaptiveConfig()
    if mode is StudyMode.ADAPTIVE and a is None:
        a = adaptive.threshold_exponent(entry.dims)
    tasks = [
        StudyTask(
            name=entry.name,
            dims=entry.dims,
            params=dict(entry.params),
            budget=int(budget),
            lam=lam,
            mode=mode,
            balance=Balance.from_str(balance),
            a=a,
            decimal_digits=mp.dps,
            stop_run=adaptive.stop_run,
            max_points=adaptive.max_points_per_ray,
        )
        for budget in budgets
    ]
    logger.info(
        "[study] %s s=%d mode=%s budgets=%s workers=%d",
        entry.name,
        entry.dims,
        mode.value,
        [task.budget for task in tasks],
        workers,
    )
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(run_study_task, tasks))
    else:
        records = [run_study_task(task) for task in tasks]

    if self_convergence and records:
        anchor = max(records, key=lambda record: record.budget_N)
        records = [record.with_reference(anchor.estimate) for record in records]

    for record in records:
        logger.info(
            "[study] N=%d points=%d rel_err=%s",
            record.budget_N,
            record.points_used,
            mpmath.nstr(record.relative_error, 5),
        )
    return records


class StudyService:
    """Runs catalog studies with the settings held by a QuadConfig."""

    def __init__(self, config: QuadConfig) -> None:
        self.config = config

    def run(
        self,
        entry: CatalogEntry,
        budgets: Sequence[int],
        *,
        mode: StudyMode | str = StudyMode.PLANNED,
    ) -> list[StudyRecord]:
        cfg = self.config
        return run_study(
            entry,
            budgets,
            cfg.plan.lam,
            mode,
            cfg.adaptive.a,
            balance=cfg.plan.balance,
            workers=cfg.study.workers,
            self_convergence=cfg.study.self_convergence,
            adaptive=cfg.adaptive,
        )
