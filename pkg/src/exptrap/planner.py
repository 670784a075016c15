"""Error bounds and balanced plans (h, h_j, n_j) for a point budget N."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from typing import Any

import mpmath

from .decay_model import Aggregates, aggregates
from .log import get_logger
from .model import (
    DecayKind,
    DecayModelError,
    DecayProfile,
    FourierExponential,
    FunctionDoubleExponential,
    FunctionExponential,
)
from .numerics import RealLike, format_real, gamma, lambert_w, to_real

logger = get_logger("planner")


@dataclass
class PlanningError(Exception):
    message: str
    exit_code: int = 2

    def __str__(self) -> str:
        return self.message


class PlanMode(str, Enum):
    EXP = "exp"
    DEXP = "dexp"


class Balance(str, Enum):
    APPROX_LOG = "approx_log"
    LAMBERT_W = "lambert_w"

    @classmethod
    def from_str(cls, value: "Balance | str") -> "Balance":
        if isinstance(value, Balance):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"Unsupported balance mode: {value}")


@dataclass(frozen=True)
class QuadraturePlan:
    h: mpmath.mpf
    h_per_dim: tuple[mpmath.mpf, ...]
    n_per_dim: tuple[int, ...]
    budget: int
    lam: mpmath.mpf
    mode: PlanMode | None = None
    balance: Balance | None = None

    @property
    def half_width_per_dim(self) -> tuple[int, ...]:
        return tuple(n // 2 for n in self.n_per_dim)

    @property
    def points_total(self) -> int:
        return math.prod(2 * k + 1 for k in self.half_width_per_dim)

    def to_dict(self) -> dict[str, Any]:
        return {
            "h": format_real(self.h),
            "h_per_dim": [format_real(item) for item in self.h_per_dim],
            "n_per_dim": list(self.n_per_dim),
            "half_width_per_dim": list(self.half_width_per_dim),
            "budget": self.budget,
            "lambda": format_real(self.lam),
            "points_total": self.points_total,
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "QuadraturePlan":
        return cls(
            h=to_real(payload["h"]),
            h_per_dim=tuple(to_real(item) for item in payload["h_per_dim"]),
            n_per_dim=tuple(int(item) for item in payload["n_per_dim"]),
            budget=int(payload["budget"]),
            lam=to_real(payload["lambda"]),
        )


@dataclass(frozen=True)
class ErrorBoundReport:
    discretization_bound: mpmath.mpf
    truncation_bound: mpmath.mpf
    constant_Cs_omega: mpmath.mpf
    constant_trunc: mpmath.mpf
    exponent_predicted: mpmath.mpf
    theorem_bound: mpmath.mpf

    @property
    def total_bound(self) -> mpmath.mpf:
        return self.discretization_bound + self.truncation_bound

    def to_dict(self) -> dict[str, Any]:
        return {
            "discretization_bound": format_real(self.discretization_bound),
            "truncation_bound": format_real(self.truncation_bound),
            "total_bound": format_real(self.total_bound),
            "constant_Cs_omega": format_real(self.constant_Cs_omega),
            "constant_trunc": format_real(self.constant_trunc),
            "exponent_predicted": format_real(self.exponent_predicted),
            "theorem_bound": format_real(self.theorem_bound),
        }


def max_master_step() -> mpmath.mpf:
    return 1 / mpmath.log(2 * mpmath.e)


def _fourier_exp(profile: DecayProfile) -> tuple[FourierExponential, ...]:
    if profile.fourier_kind is not DecayKind.EXP:
        raise DecayModelError("discretization bound requires exponential Fourier decay")
    return profile.fourier  # type: ignore[return-value]


def _function_exp(profile: DecayProfile) -> tuple[FunctionExponential, ...]:
    if profile.function_kind is not DecayKind.EXP:
        raise DecayModelError("expected an exponentially decaying (F2) profile")
    return profile.function  # type: ignore[return-value]


def _function_dexp(profile: DecayProfile) -> tuple[FunctionDoubleExponential, ...]:
    if profile.function_kind is not DecayKind.DEXP:
        raise DecayModelError("expected a double-exponentially decaying (F3) profile")
    return profile.function  # type: ignore[return-value]


def _check_grid(
    profile: DecayProfile, h_per_dim: Sequence, n_per_dim: Sequence
) -> None:
    if len(h_per_dim) != profile.dims or len(n_per_dim) != profile.dims:
        raise DecayModelError(
            f"expected {profile.dims} step sizes and truncation counts"
        )
    if any(to_real(h) <= 0 for h in h_per_dim) or any(n < 0 for n in n_per_dim):
        raise DecayModelError("step sizes must be > 0 and truncation counts >= 0")


def constant_cs_omega(profile: DecayProfile) -> mpmath.mpf:
    """2e * sum over non-empty u of prod_{j in u} Gamma(1/b_j)/b_j."""
    product = mpmath.fprod(
        1 + gamma(1 / item.b) / item.b for item in _fourier_exp(profile)
    )
    return 2 * mpmath.e * (product - 1)


def discretization_bound(profile: DecayProfile, h: RealLike) -> mpmath.mpf:
    h = to_real(h)
    if not (0 < h <= max_master_step()):
        raise DecayModelError(f"h must lie in (0, 1/ln(2e)], got {h}")
    return constant_cs_omega(profile) * profile.norm_fhat_omega * mpmath.exp(-1 / h)


def truncation_constant_exp(profile: DecayProfile, h_per_dim: Sequence) -> mpmath.mpf:
    functions = _function_exp(profile)
    factors = (
        to_real(h) + 2 * gamma(1 / fun.d) / (fun.d * fun.c ** (1 / fun.d))
        for h, fun in zip(h_per_dim, functions)
    )
    return 2 * profile.dims * mpmath.fprod(factors)


def truncation_bound_exp(
    profile: DecayProfile, h_per_dim: Sequence, n_per_dim: Sequence[int]
) -> mpmath.mpf:
    functions = _function_exp(profile)
    _check_grid(profile, h_per_dim, n_per_dim)
    exponent = min(
        fun.c * to_real(h) ** fun.d * (mpmath.mpf(n + 1) / 2) ** fun.d
        for h, n, fun in zip(h_per_dim, n_per_dim, functions)
    )
    constant = truncation_constant_exp(profile, h_per_dim)
    return constant * profile.norm_f_nu * mpmath.exp(-exponent)


def _dexp_direction_terms(
    profile: DecayProfile, h_per_dim: Sequence, n_per_dim: Sequence[int]
) -> tuple[list[mpmath.mpf], list[mpmath.mpf]]:
    """Per-direction tail bounds T_i and full-line sum bounds L_j."""
    functions = _function_dexp(profile)
    _check_grid(profile, h_per_dim, n_per_dim)
    tails: list[mpmath.mpf] = []
    lines: list[mpmath.mpf] = []
    for h, n, fun in zip(h_per_dim, n_per_dim, functions):
        h = to_real(h)
        reach = h * (mpmath.mpf(n + 1) / 2)
        head = mpmath.exp(-fun.e * mpmath.exp(fun.c * reach**fun.d))
        spread = gamma(1 / fun.d) / ((fun.e * fun.c) ** (1 / fun.d) * h * fun.d)
        tails.append(head * (1 + 2 * spread))
        lines.append(mpmath.exp(-fun.e) * (1 + 2 * spread))
    return tails, lines


def _sharp_direction_sum(
    tails: list[mpmath.mpf], lines: list[mpmath.mpf]
) -> mpmath.mpf:
    terms = []
    for i, tail in enumerate(tails):
        others = mpmath.fprod(line for j, line in enumerate(lines) if j != i)
        terms.append(tail * others)
    return mpmath.fsum(terms)


def truncation_bound_dexp(
    profile: DecayProfile, h_per_dim: Sequence, n_per_dim: Sequence[int]
) -> mpmath.mpf:
    tails, lines = _dexp_direction_terms(profile, h_per_dim, n_per_dim)
    grid_volume = mpmath.fprod(to_real(h) for h in h_per_dim)
    return profile.norm_f_nu * grid_volume * 2 * _sharp_direction_sum(tails, lines)


def _truncation_constant_dexp(profile: DecayProfile, h_per_dim: Sequence) -> mpmath.mpf:
    zeros = [0] * profile.dims
    _, lines = _dexp_direction_terms(profile, h_per_dim, zeros)
    prefactors = [
        line * mpmath.exp(fun.e) for line, fun in zip(lines, profile.function)
    ]
    grid_volume = mpmath.fprod(to_real(h) for h in h_per_dim)
    return grid_volume * 2 * _sharp_direction_sum(prefactors, lines)


def _even_down(count: int) -> int:
    n = max(count - 1, 0)
    return n - (n % 2)


def _enforce_budget(n_per_dim: list[int], budget: int) -> tuple[int, ...]:
    while math.prod(n + 1 for n in n_per_dim) > budget:
        widest = max(range(len(n_per_dim)), key=lambda j: n_per_dim[j])
        if n_per_dim[widest] == 0:
            break
        logger.warning(
            "[plan] trimming n_%d to keep within budget %d", widest + 1, budget
        )
        n_per_dim[widest] -= 2
    return tuple(n_per_dim)


def _truncation_counts(
    profile: DecayProfile, agg: Aggregates, h: mpmath.mpf, budget: int
) -> tuple[int, ...]:
    """n_j + 1 = max(floor(C_* h^(B/(D d_j)) N^(1/(D d_j)) / (C_j h^(1/b_j))), 1)."""
    n = mpmath.mpf(budget)
    counts = []
    for four, fun, c_j in zip(profile.fourier, profile.function, agg.c_per_dim):
        power = agg.b_sum / (agg.d_sum * fun.d) - 1 / four.b
        value = agg.c_star / c_j * h**power * n ** (1 / (agg.d_sum * fun.d))
        counts.append(max(int(mpmath.floor(value)), 1))
    return tuple(counts)


def _exp_truncation_counts(
    agg: Aggregates, profile: DecayProfile, budget: int
) -> tuple[int, ...]:
    """Closed form of the counts once the exponential-case h is substituted."""
    n = mpmath.mpf(budget)
    total = agg.b_sum + agg.d_sum
    counts = []
    for four, fun, c_j in zip(profile.fourier, profile.function, agg.c_per_dim):
        sharp_power = (agg.d_sum / four.b - agg.b_sum / fun.d) / total
        n_power = (1 / four.b + 1 / fun.d) / total
        value = agg.c_star / c_j * agg.c_sharp**sharp_power * n**n_power
        counts.append(max(int(mpmath.floor(value)), 1))
    return tuple(counts)


def _check_budget(budget: int) -> int:
    if isinstance(budget, bool) or int(budget) < 1:
        raise DecayModelError(f"budget must be a positive integer, got {budget}")
    return int(budget)


def _check_master_step(h: mpmath.mpf, budget: int) -> None:
    limit = max_master_step()
    if h > limit:
        raise PlanningError(
            f"budget too small: N={budget} gives h={mpmath.nstr(h, 8)} > 1/ln(2e)"
            f"={mpmath.nstr(limit, 8)}"
        )


def _build_plan(
    profile: DecayProfile,
    h: mpmath.mpf,
    counts: tuple[int, ...],
    budget: int,
    lam: mpmath.mpf,
    mode: PlanMode,
    balance: Balance | None,
) -> QuadraturePlan:
    h_per_dim = tuple((four.a * h) ** (1 / four.b) for four in _fourier_exp(profile))
    n_per_dim = _enforce_budget([_even_down(count) for count in counts], budget)
    plan = QuadraturePlan(
        h=h,
        h_per_dim=h_per_dim,
        n_per_dim=n_per_dim,
        budget=budget,
        lam=lam,
        mode=mode,
        balance=balance,
    )
    logger.debug(
        "[plan] %s N=%d h=%s n=%s points=%d",
        mode.value,
        budget,
        mpmath.nstr(h, 10),
        list(n_per_dim),
        plan.points_total,
    )
    return plan


def plan_exponential(
    profile: DecayProfile, budget: int, lam: RealLike = 1
) -> tuple[QuadraturePlan, ErrorBoundReport]:
    _function_exp(profile)
    budget = _check_budget(budget)
    agg = aggregates(profile, lam)
    n = mpmath.mpf(budget)
    total = agg.b_sum + agg.d_sum

    h = n ** (-1 / total) * agg.c_sharp ** (-agg.d_sum / total)
    _check_master_step(h, budget)
    counts = _exp_truncation_counts(agg, profile, budget)
    plan = _build_plan(profile, h, counts, budget, agg.lam, PlanMode.EXP, None)

    exponent = n ** (1 / total) * agg.c_sharp ** (agg.d_sum / total)
    disc = discretization_bound(profile, h)
    trunc = truncation_bound_exp(profile, plan.h_per_dim, plan.n_per_dim)
    report = ErrorBoundReport(
        discretization_bound=disc,
        truncation_bound=trunc,
        constant_Cs_omega=constant_cs_omega(profile),
        constant_trunc=truncation_constant_exp(profile, plan.h_per_dim),
        exponent_predicted=exponent,
        theorem_bound=(
            theorem_constant_exp(profile) * mpmath.exp(-exponent) * profile.norm
        ),
    )
    return plan, report


def plan_double_exponential(
    profile: DecayProfile,
    budget: int,
    lam: RealLike = 1,
    balance: Balance | str = Balance.APPROX_LOG,
) -> tuple[QuadraturePlan, ErrorBoundReport]:
    _function_dexp(profile)
    budget = _check_budget(budget)
    balance = Balance.from_str(balance)
    agg = aggregates(profile, lam)
    n = mpmath.mpf(budget)
    b_sum, d_sum, sharp = agg.b_sum, agg.d_sum, agg.c_sharp
    assert agg.e_star is not None

    log_arg = agg.e_star ** (-b_sum) * n
    if log_arg <= 1:
        raise PlanningError(
            f"budget too small: ln(e_*^(-B) N) <= 0 for N={budget}, "
            f"e_*={mpmath.nstr(agg.e_star, 8)}"
        )
    if balance is Balance.APPROX_LOG:
        scale = mpmath.log(log_arg) / (sharp * b_sum)
        h = n ** (-1 / b_sum) * scale ** (d_sum / b_sum)
    else:
        w_arg = (
            sharp
            * (b_sum / d_sum)
            * agg.e_star ** (-b_sum / d_sum)
            * n ** (1 / d_sum)
        )
        h = n ** (-1 / b_sum) * (
            d_sum * lambert_w(w_arg) / (sharp * b_sum)
        ) ** (d_sum / b_sum)
    _check_master_step(h, budget)
    counts = _truncation_counts(profile, agg, h, budget)
    plan = _build_plan(profile, h, counts, budget, agg.lam, PlanMode.DEXP, balance)

    exponent = (
        n ** (1 / b_sum)
        * mpmath.log(log_arg) ** (-d_sum / b_sum)
        * sharp ** (d_sum / b_sum)
        * b_sum ** (d_sum / b_sum)
    )
    report = ErrorBoundReport(
        discretization_bound=discretization_bound(profile, h),
        truncation_bound=truncation_bound_dexp(profile, plan.h_per_dim, plan.n_per_dim),
        constant_Cs_omega=constant_cs_omega(profile),
        constant_trunc=_truncation_constant_dexp(profile, plan.h_per_dim),
        exponent_predicted=exponent,
        theorem_bound=(
            theorem_constant_dexp(profile) * mpmath.exp(-exponent) * profile.norm
        ),
    )
    return plan, report


def theorem_constant_exp(profile: DecayProfile) -> mpmath.mpf:
    """4s prod(a_j^(1/b_j) + 2 Gamma(1/d_j)/(d_j c_j^(1/d_j))) + 2 C(s, omega)."""
    functions = _function_exp(profile)
    product = mpmath.fprod(
        four.a ** (1 / four.b) + 2 * gamma(1 / fun.d) / (fun.d * fun.c ** (1 / fun.d))
        for four, fun in zip(_fourier_exp(profile), functions)
    )
    return 4 * profile.dims * product + 2 * constant_cs_omega(profile)


def theorem_constant_dexp(profile: DecayProfile) -> mpmath.mpf:
    functions = _function_dexp(profile)
    product = mpmath.fprod(
        mpmath.exp(-fun.e)
        * (
            four.a ** (1 / four.b)
            + 2 * gamma(1 / fun.d) / (fun.e * fun.c ** (1 / fun.d) * fun.d)
        )
        for four, fun in zip(_fourier_exp(profile), functions)
    )
    return 4 * profile.dims * product + 2 * constant_cs_omega(profile)


def balance_residual(
    plan: QuadraturePlan, agg: Aggregates, mode: PlanMode | str
) -> mpmath.mpf:
    """Difference between the two sides of the balance equation at plan.h."""
    mode = PlanMode(mode)
    growth = mpmath.mpf(plan.budget) ** (1 / agg.d_sum)
    rate = agg.c_sharp * plan.h ** (agg.b_sum / agg.d_sum) * growth
    if mode is PlanMode.EXP:
        return 1 / plan.h - rate
    if agg.e_star is None:
        raise DecayModelError("double-exponential residual requires e_star")
    return 1 / plan.h - agg.e_star * mpmath.exp(rate)
