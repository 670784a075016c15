"""Extended-precision arithmetic context and the special functions the planner needs.

All reals in the package are ``mpmath.mpf`` values evaluated at the precision of
the innermost active :class:`PrecisionContext`.
"""

from __future__ import annotations

from contextlib import AbstractContextManager
from dataclasses import dataclass
from typing import Union

import mpmath
from mpmath import mp

Real = mpmath.mpf
RealLike = Union[mpmath.mpf, int, float, str]

MIN_DECIMAL_DIGITS = 30
DEFAULT_DECIMAL_DIGITS = 120

_GUARD_DIGITS = 15
_MAX_NEWTON_STEPS = 200


class NumericsDomainError(ValueError):
    """Argument outside the domain of a special function."""


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision shared by every module."""

    decimal_digits: int = DEFAULT_DECIMAL_DIGITS

    def __post_init__(self) -> None:
        if int(self.decimal_digits) < MIN_DECIMAL_DIGITS:
            raise NumericsDomainError(
                f"decimal_digits must be >= {MIN_DECIMAL_DIGITS}, "
                f"got {self.decimal_digits}"
            )

    def activate(self) -> AbstractContextManager:
        return mpmath.workdps(self.decimal_digits)


def to_real(value: RealLike) -> mpmath.mpf:
    """Convert to ``mpf``; floats go through their decimal repr."""
    if isinstance(value, mpmath.mpf):
        return +value
    if isinstance(value, float):
        return mpmath.mpf(repr(value))
    return mpmath.mpf(value)


def format_real(value: RealLike) -> str:
    return mpmath.nstr(to_real(value), mp.dps)


def _stirling_log_gamma(z: mpmath.mpf, eps: mpmath.mpf) -> mpmath.mpf:
    total = (z - mpmath.mpf(0.5)) * mpmath.log(z) - z + mpmath.log(2 * mp.pi) / 2
    z_sq = z * z
    power = z
    k = 1
    while True:
        term = mpmath.bernoulli(2 * k) / ((2 * k) * (2 * k - 1) * power)
        total += term
        if abs(term) < eps * abs(total) or k > 4 * mp.dps:
            return total
        power *= z_sq
        k += 1


def gamma(x: RealLike) -> mpmath.mpf:
    """Gamma function for positive reals via an argument-shifted Stirling series."""
    value = to_real(x)
    if value <= 0:
        raise NumericsDomainError(f"gamma requires x > 0, got {value}")
    if value == int(value) and value <= 1000:
        return mpmath.factorial(int(value) - 1)

    target_dps = mp.dps
    with mpmath.extradps(_GUARD_DIGITS):
        threshold = mpmath.mpf(target_dps) * mpmath.mpf("0.7")
        shifted = mpmath.mpf(value)
        divisor = mpmath.mpf(1)
        while shifted < threshold:
            divisor *= shifted
            shifted += 1
        eps = mpmath.mpf(10) ** (-(target_dps + _GUARD_DIGITS))
        result = mpmath.exp(_stirling_log_gamma(shifted, eps)) / divisor
    return +result


def lambert_w(x: RealLike) -> mpmath.mpf:
    """Principal branch of Lambert-W on x >= 0 by Newton iteration."""
    value = to_real(x)
    if value < 0:
        raise NumericsDomainError(f"lambert_w requires x >= 0, got {value}")
    if value == 0:
        return mpmath.mpf(0)

    target_dps = mp.dps
    with mpmath.extradps(_GUARD_DIGITS):
        eps = mpmath.mpf(10) ** (-(target_dps + _GUARD_DIGITS // 2))
        w = mpmath.log1p(value)
        for _ in range(_MAX_NEWTON_STEPS):
            ew = mpmath.exp(w)
            step = (w * ew - value) / (ew * (w + 1))
            w -= step
            if abs(step) <= eps * abs(w):
                break
        else:
            raise NumericsDomainError(f"lambert_w did not converge for x={value}")
    return +w
