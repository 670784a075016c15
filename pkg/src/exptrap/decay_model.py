"""Planning constants and tail-sum bounds for the exponential decay classes."""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass
from enum import Enum

import mpmath
from mpmath import mp

from .model import (
    DecayKind,
    DecayModelError,
    DecayProfile,
    FunctionDoubleExponential,
)
from .numerics import RealLike, format_real, gamma, to_real


@dataclass(frozen=True)
class Aggregates:
    """Derived constants that drive planning.

    ``b_sum``/``d_sum`` are B(s) = sum 1/b_j and D(s) = sum 1/d_j,
    ``c_per_dim`` holds C_j = c_j^(1/d_j) a_j^(1/b_j) / 2, ``c_star`` their
    minimum and ``c_sharp`` = min_j (lam * c_star)^d_j. With lam = 1/2 the
    latter is the classical (C_star/2)^d_j constant.
    """

    b_sum: mpmath.mpf
    d_sum: mpmath.mpf
    c_per_dim: tuple[mpmath.mpf, ...]
    c_star: mpmath.mpf
    c_sharp: mpmath.mpf
    lam: mpmath.mpf
    e_star: mpmath.mpf | None = None

    def to_dict(self) -> dict[str, object]:
        return {
            "B": format_real(self.b_sum),
            "D": format_real(self.d_sum),
            "C_per_dim": [format_real(item) for item in self.c_per_dim],
            "C_star": format_real(self.c_star),
            "C_sharp": format_real(self.c_sharp),
            "e_star": None if self.e_star is None else format_real(self.e_star),
            "lambda": format_real(self.lam),
        }


def check_lambda(lam: RealLike) -> mpmath.mpf:
    value = to_real(lam)
    if not (0 < value <= 1):
        raise DecayModelError(f"lambda must lie in (0, 1], got {value}")
    return value


def aggregates(profile: DecayProfile, lam: RealLike) -> Aggregates:
    if profile.fourier_kind is not DecayKind.EXP:
        raise DecayModelError("planning requires exponential Fourier decay (W2)")
    if profile.function_kind is DecayKind.POLY:
        raise DecayModelError(
            "planning requires exponential or double-exponential decay"
        )
    lam_value = check_lambda(lam)

    b_sum = mpmath.fsum(1 / item.b for item in profile.fourier)
    d_sum = mpmath.fsum(1 / item.d for item in profile.function)
    c_per_dim = tuple(
        fun.c ** (1 / fun.d) * four.a ** (1 / four.b) / 2
        for four, fun in zip(profile.fourier, profile.function)
    )
    c_star = min(c_per_dim)
    c_sharp = min((lam_value * c_star) ** fun.d for fun in profile.function)
    e_star = None
    if profile.function_kind is DecayKind.DEXP:
        e_star = min(
            fun.e
            for fun in profile.function
            if isinstance(fun, FunctionDoubleExponential)
        )
    return Aggregates(
        b_sum=b_sum,
        d_sum=d_sum,
        c_per_dim=c_per_dim,
        c_star=c_star,
        c_sharp=c_sharp,
        lam=lam_value,
        e_star=e_star,
    )


def _positive(value: RealLike, name: str) -> mpmath.mpf:
    real = to_real(value)
    if not real > 0:
        raise DecayModelError(f"{name} must be > 0, got {real}")
    return real


def _exponent_d(value: RealLike) -> mpmath.mpf:
    d = to_real(value)
    if d < 1:
        raise DecayModelError(f"d must be >= 1, got {d}")
    return d


def _start(value: RealLike) -> mpmath.mpf:
    n = to_real(value)
    if n < 0:
        raise DecayModelError(f"n must be >= 0, got {n}")
    return n


def tail_bound_exp_unit(b: RealLike, h: RealLike) -> mpmath.mpf:
    """Upper bound on sum_{k>=1} exp(-k^b / h) for h in (0, 1]."""
    b = _positive(b, "b")
    h = to_real(h)
    if not (0 < h <= 1):
        raise DecayModelError(f"h must lie in (0, 1], got {h}")
    return mpmath.exp(-1 / h) * mpmath.e * gamma(1 / b) / b


def tail_bound_exp(c: RealLike, d: RealLike, n: RealLike) -> mpmath.mpf:
    """Upper bound on sum_{k>=n} exp(-c k^d)."""
    c = _positive(c, "c")
    d = _exponent_d(d)
    n = _start(n)
    return mpmath.exp(-c * n**d) * (1 + gamma(1 / d) / (c ** (1 / d) * d))


def tail_bound_dexp(
    alpha: RealLike, c: RealLike, d: RealLike, n: RealLike
) -> mpmath.mpf:
    """Upper bound on sum_{k>=n} exp(-alpha exp(c k^d)).

    Uses exp(c(n+m)^d) - exp(c n^d) >= c m^d, so the tail is at most
    exp(-alpha exp(c n^d)) times sum_{m>=0} exp(-alpha c m^d).
    """
    alpha = _positive(alpha, "alpha")
    c = _positive(c, "c")
    d = _exponent_d(d)
    n = _start(n)
    head = mpmath.exp(-alpha * mpmath.exp(c * n**d))
    return head * (1 + gamma(1 / d) / ((alpha * c) ** (1 / d) * d))


def tail_bound_dexp_printed(
    alpha: RealLike, c: RealLike, d: RealLike, n: RealLike
) -> mpmath.mpf:
    """The historical form with an extra exp(-alpha) factor; fails at small n."""
    return mpmath.exp(-to_real(alpha)) * tail_bound_dexp(alpha, c, d, n)


class TailKind(str, Enum):
    EXP_UNIT = "exp_unit"
    EXP = "exp"
    DEXP = "dexp"

    @classmethod
    def from_str(cls, value: str) -> "TailKind":
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise DecayModelError(f"Unsupported tail kind: {value}")


@dataclass(frozen=True)
class TailSum:
    value: mpmath.mpf
    next_term: mpmath.mpf
    converged: bool


def _tail_term(
    kind: TailKind, params: Mapping[str, RealLike]
) -> Callable[[int], mpmath.mpf]:
    p = {key: to_real(value) for key, value in params.items()}
    try:
        if kind is TailKind.EXP_UNIT:
            b, h = p["b"], p["h"]
            return lambda k: mpmath.exp(-mpmath.mpf(k) ** b / h)
        if kind is TailKind.EXP:
            c, d = p["c"], p["d"]
            return lambda k: mpmath.exp(-c * mpmath.mpf(k) ** d)
        alpha, c, d = p["alpha"], p["c"], p["d"]
        return lambda k: mpmath.exp(-alpha * mpmath.exp(c * mpmath.mpf(k) ** d))
    except KeyError as exc:
        raise DecayModelError(f"missing parameter {exc} for {kind.value} tail") from exc


def brute_force_tail(
    kind: TailKind | str,
    params: Mapping[str, RealLike],
    start: int,
    terms: int,
) -> TailSum:
    """Partial sum of the tail series over k = start .. start + terms - 1."""
    kind = TailKind.from_str(kind) if isinstance(kind, str) else kind
    term = _tail_term(kind, params)
    values = [term(k) for k in range(start, start + terms)]
    total = mpmath.fsum(reversed(values))
    following = term(start + terms)
    last = values[-1] if values else following
    tolerance = mpmath.mpf(10) ** (-mp.dps) * abs(total)
    converged = following <= last and following <= tolerance
    return TailSum(value=total, next_term=following, converged=bool(converged))


def oracle_terms(
    kind: TailKind | str,
    params: Mapping[str, RealLike],
    start: int,
    *,
    limit: int = 2_000_000,
) -> int:
    """Number of terms after which the series drops below working precision."""
    kind = TailKind.from_str(kind) if isinstance(kind, str) else kind
    p = {key: to_real(value) for key, value in params.items()}
    level = (mp.dps + 10) * mpmath.log(10)
    if kind is TailKind.EXP_UNIT:
        last = (p["h"] * level) ** (1 / p["b"])
    elif kind is TailKind.EXP:
        last = (level / p["c"]) ** (1 / p["d"])
    else:
        last = (max(mpmath.log(level / p["alpha"]), 0) / p["c"]) ** (1 / p["d"])
    needed = int(mpmath.ceil(last)) + 2 - start
    return max(1, min(needed, limit))
