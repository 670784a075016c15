"""Truncated trapezoidal rule over R^s, adaptive truncation and the Poisson check."""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import mpmath

from .log import get_logger
from .model import DecayProfile
from .numerics import RealLike, to_real

logger = get_logger("quadrature")

Factor = Callable[[mpmath.mpf], mpmath.mpf]
PointFunction = Callable[[Sequence[mpmath.mpf]], mpmath.mpf]

DEFAULT_STOP_RUN = 3
DEFAULT_MAX_POINTS_PER_RAY = 10**6


class QuadratureError(ValueError):
    """Invalid quadrature request or failed truncation search."""


def _product_of(factors: tuple[Factor, ...]) -> PointFunction:
    def evaluate(point: Sequence[mpmath.mpf]) -> mpmath.mpf:
        return mpmath.fprod(factor(x) for factor, x in zip(factors, point))

    return evaluate


@dataclass(frozen=True)
class Integrand:
    """Evaluator over R^s with optional tensor factors and reference value."""

    dims: int
    evaluate: PointFunction
    reference_value: mpmath.mpf | None = None
    profile: DecayProfile | None = None
    tensor_factors: tuple[Factor, ...] | None = None
    fourier_factors: tuple[Factor, ...] | None = None
    name: str = ""

    @classmethod
    def from_factors(
        cls,
        factors: Sequence[Factor],
        *,
        reference_value: RealLike | None = None,
        profile: DecayProfile | None = None,
        fourier_factors: Sequence[Factor] | None = None,
        name: str = "",
    ) -> "Integrand":
        factors = tuple(factors)
        return cls(
            dims=len(factors),
            evaluate=_product_of(factors),
            reference_value=(
                None if reference_value is None else to_real(reference_value)
            ),
            profile=profile,
            tensor_factors=factors,
            fourier_factors=None if fourier_factors is None else tuple(fourier_factors),
            name=name,
        )

    @property
    def is_tensor(self) -> bool:
        return self.tensor_factors is not None


@dataclass(frozen=True)
class QuadratureResult:
    estimate: mpmath.mpf
    points_evaluated: int
    truncation_box_used: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ErrorSplit:
    total: mpmath.mpf
    discretization: mpmath.mpf
    truncation: mpmath.mpf


def _line_indices(k_minus: int, k_plus: int) -> list[int]:
    """Indices -k_minus..k_plus ordered from the largest |k| inward."""
    width = max(k_minus, k_plus)
    order: list[int] = []
    for k in range(width, 0, -1):
        if k <= k_plus:
            order.append(k)
        if k <= k_minus:
            order.append(-k)
    order.append(0)
    return order


def _line_sum(factor: Factor, h: mpmath.mpf, k_minus: int, k_plus: int) -> mpmath.mpf:
    return mpmath.fsum(factor(k * h) for k in _line_indices(k_minus, k_plus))


def _check_steps(f: Integrand, h_per_dim: Sequence[RealLike]) -> tuple[mpmath.mpf, ...]:
    if len(h_per_dim) != f.dims:
        raise QuadratureError(
            f"dimension mismatch: integrand has {f.dims}, got {len(h_per_dim)} steps"
        )
    steps = tuple(to_real(h) for h in h_per_dim)
    if any(h <= 0 for h in steps):
        raise QuadratureError("step sizes must be > 0")
    return steps


def evaluate_bounds(
    f: Integrand,
    h_per_dim: Sequence[RealLike],
    bounds: Sequence[tuple[int, int]],
) -> QuadratureResult:
    """Trapezoidal sum over the box prod_j [-K_j^-, K_j^+] (possibly asymmetric)."""
    steps = _check_steps(f, h_per_dim)
    if len(bounds) != f.dims:
        raise QuadratureError(
            f"dimension mismatch: integrand has {f.dims}, got {len(bounds)} bounds"
        )
    box = tuple((int(lo), int(hi)) for lo, hi in bounds)
    if any(lo < 0 or hi < 0 for lo, hi in box):
        raise QuadratureError("truncation bounds must be >= 0")

    volume = mpmath.fprod(steps)
    if f.tensor_factors is not None:
        sums = (
            _line_sum(factor, h, lo, hi)
            for factor, h, (lo, hi) in zip(f.tensor_factors, steps, box)
        )
        estimate = volume * mpmath.fprod(sums)
    else:
        axes = [
            [k * h for k in _line_indices(lo, hi)] for h, (lo, hi) in zip(steps, box)
        ]
        grid = itertools.product(*axes)
        estimate = volume * mpmath.fsum(f.evaluate(point) for point in grid)
    points = math.prod(lo + hi + 1 for lo, hi in box)
    logger.debug("[quad] %s box=%s points=%d", f.name or "integrand", list(box), points)
    return QuadratureResult(
        estimate=estimate, points_evaluated=points, truncation_box_used=box
    )


def evaluate_box(
    f: Integrand, h_per_dim: Sequence[RealLike], half_widths: Sequence[int]
) -> QuadratureResult:
    """Q = (prod h_j) * sum over |k_j| <= K_j of f(k_1 h_1, ..., k_s h_s)."""
    if len(half_widths) != f.dims:
        raise QuadratureError(
            f"dimension mismatch: integrand has {f.dims}, "
            f"got {len(half_widths)} half widths"
        )
    return evaluate_bounds(f, h_per_dim, [(int(k), int(k)) for k in half_widths])


def _scan_ray(
    factor: Factor,
    h: mpmath.mpf,
    sign: int,
    threshold: mpmath.mpf,
    stop_run: int,
    max_points: int,
) -> int:
    run = 0
    for k in range(1, max_points + 1):
        if abs(factor(sign * k * h)) < threshold:
            run += 1
            if run == stop_run:
                return k - stop_run
        else:
            run = 0
    raise QuadratureError(
        f"no decay detected: ray {'+' if sign > 0 else '-'} "
        f"exceeded {max_points} points"
    )


def evaluate_adaptive(
    f: Integrand,
    h: RealLike,
    threshold_exponent: RealLike,
    *,
    stop_run: int = DEFAULT_STOP_RUN,
    max_points: int = DEFAULT_MAX_POINTS_PER_RAY,
) -> QuadratureResult:
    """Isotropic step h; each ray stops once stop_run consecutive terms are small.

    A term is small when |factor_j(k h)| < exp(-a/h). Along an axis the other
    factors are of order one, so every ray gets the full product threshold.
    The box keeps every index before the first small term of that run.
    """
    if f.tensor_factors is None:
        raise QuadratureError("adaptive truncation requires tensor factors")
    if stop_run < 1:
        raise QuadratureError("stop_run must be >= 1")
    step = to_real(h)
    if step <= 0:
        raise QuadratureError("step size must be > 0")
    a = to_real(threshold_exponent)
    threshold = mpmath.exp(-a / step)

    bounds = []
    for j, factor in enumerate(f.tensor_factors):
        k_plus = _scan_ray(factor, step, 1, threshold, stop_run, max_points)
        k_minus = _scan_ray(factor, step, -1, threshold, stop_run, max_points)
        logger.debug("[adaptive] dim %d: K-=%d K+=%d", j + 1, k_minus, k_plus)
        bounds.append((k_minus, k_plus))
    return evaluate_bounds(f, [step] * f.dims, bounds)


def poisson_check(
    f: Integrand, h: RealLike, terms: int
) -> tuple[mpmath.mpf, mpmath.mpf]:
    """Both sides of h * sum f(kh) = sum fhat(k/h), per tensor factor."""
    if f.tensor_factors is None or f.fourier_factors is None:
        raise QuadratureError("poisson check requires tensor and Fourier factors")
    step = to_real(h)
    if step <= 0:
        raise QuadratureError("step size must be > 0")
    lhs = mpmath.fprod(
        step * _line_sum(factor, step, terms, terms) for factor in f.tensor_factors
    )
    rhs = mpmath.fprod(
        _line_sum(lambda xi, fourier=fourier: fourier(xi), 1 / step, terms, terms)
        for fourier in f.fourier_factors
    )
    return lhs, rhs


def error_split(
    f: Integrand,
    h_per_dim: Sequence[RealLike],
    half_widths: Sequence[int],
    large_widths: Sequence[int],
) -> ErrorSplit:
    """|I - Q|, |I - I_h| and |I_h - Q| with I_h taken from a much larger box."""
    if f.reference_value is None:
        raise QuadratureError("error split requires a reference value")
    q = evaluate_box(f, h_per_dim, half_widths).estimate
    i_h = evaluate_box(f, h_per_dim, large_widths).estimate
    exact = f.reference_value
    return ErrorSplit(
        total=abs(exact - q),
        discretization=abs(exact - i_h),
        truncation=abs(i_h - q),
    )
