from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from typing import Any

import mpmath

from ..log import get_logger
from ..numerics import format_real
from .study_service import StudyRecord

logger = get_logger("fit")

MIN_FIT_POINTS = 3


class RateFitError(ValueError):
    """Not enough usable records to fit a convergence rate."""


class RateModel(str, Enum):
    EXP_RATE = "exp_rate"
    DEXP_RATE = "dexp_rate"

    @classmethod
    def from_str(cls, value: "RateModel | str") -> "RateModel":
        if isinstance(value, RateModel):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise RateFitError(f"Unsupported rate model: {value}")


@dataclass(frozen=True)
class RateFit:
    """ln(err) ~ logK - c * x with x = N^(1/s) or N^(1/s) / ln N."""

    model: RateModel
    c: mpmath.mpf
    logK: mpmath.mpf
    residual_rms: mpmath.mpf
    points: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.model.value,
            "c": format_real(self.c),
            "logK": format_real(self.logK),
            "residual_rms": format_real(self.residual_rms),
            "points": self.points,
        }


def regressor(model: RateModel, n: int, dims: int) -> mpmath.mpf:
    root = mpmath.mpf(n) ** (mpmath.mpf(1) / dims)
    if model is RateModel.EXP_RATE:
        return root
    if n < 2:
        raise RateFitError(f"dexp_rate needs N >= 2, got {n}")
    return root / mpmath.log(n)


def fit_rate(
    records: Sequence[StudyRecord], model: RateModel | str, dims: int
) -> RateFit:
    model = RateModel.from_str(model)
    if dims < 1:
        raise RateFitError(f"dims must be >= 1, got {dims}")
    nonzero = [record for record in records if record.relative_error > 0]
    if records and not nonzero:
        raise RateFitError("all relative errors are zero")
    usable = [record for record in nonzero if not record.precision_limited]
    if len(usable) < MIN_FIT_POINTS:
        raise RateFitError(
            f"insufficient points: need {MIN_FIT_POINTS} usable records, "
            f"got {len(usable)}"
        )

    xs = [regressor(model, record.points_used, dims) for record in usable]
    ys = [mpmath.log(record.relative_error) for record in usable]
    design = mpmath.matrix([[x, 1] for x in xs])
    solution, _ = mpmath.qr_solve(design, mpmath.matrix(ys))
    slope, intercept = solution[0], solution[1]
    residuals = [y - (slope * x + intercept) for x, y in zip(xs, ys)]
    rms = mpmath.sqrt(mpmath.fsum(r * r for r in residuals) / len(residuals))

    fit = RateFit(
        model=model, c=-slope, logK=intercept, residual_rms=rms, points=len(usable)
    )
    logger.info(
        "[fit] %s s=%d c=%s logK=%s rms=%s",
        model.value,
        dims,
        mpmath.nstr(fit.c, 6),
        mpmath.nstr(fit.logK, 6),
        mpmath.nstr(rms, 3),
    )
    return fit
