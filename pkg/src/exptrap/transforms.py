"""Variable changes that turn slowly decaying integrands into fast decaying ones."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

import mpmath
from mpmath import mp

from .model import DecayProfile
from .numerics import RealLike, format_real, to_real
from .quadrature import Factor, Integrand, QuadratureError

OOURA_BETA = mpmath.mpf(1) / 4


class TransformKind(str, Enum):
    IDENTITY = "identity"
    DE_EXP = "de_exp"
    OOURA_FOURIER = "ooura_fourier"


@dataclass(frozen=True)
class OouraParams:
    M: mpmath.mpf
    alpha: mpmath.mpf
    beta: mpmath.mpf

    def to_dict(self) -> dict[str, str]:
        return {
            "M": format_real(self.M),
            "alpha": format_real(self.alpha),
            "beta": format_real(self.beta),
        }


def de_exp_eval(u: RealLike) -> tuple[mpmath.mpf, mpmath.mpf]:
    """x = exp(u - exp(-u)) mapping R onto (0, inf), with dx/du."""
    u = to_real(u)
    inner = mpmath.exp(-u)
    x = mpmath.exp(u - inner)
    return x, (1 + inner) * x


def ooura_params(h: RealLike) -> OouraParams:
    h = to_real(h)
    if h <= 0:
        raise QuadratureError(f"step size must be > 0, got {h}")
    m = mp.pi / h
    alpha = OOURA_BETA / mpmath.sqrt(1 + m * mpmath.log1p(m) / (4 * mp.pi))
    return OouraParams(M=m, alpha=alpha, beta=OOURA_BETA)


def _ooura_exponent(params: OouraParams, u: mpmath.mpf) -> mpmath.mpf:
    return 2 * u - params.alpha * mpmath.expm1(-u) + params.beta * mpmath.expm1(u)


def ooura_eval(
    params: OouraParams, u: RealLike
) -> tuple[mpmath.mpf, mpmath.mpf]:
    """phi(u) = u / (1 - exp(-t(u))) and its derivative; the M factor is excluded."""
    u = to_real(u)
    alpha, beta = params.alpha, params.beta
    t = _ooura_exponent(params, u)
    t1 = 2 + alpha + beta
    if abs(t) < mpmath.mpf(10) ** (-(mp.dps // 3)):
        # first-order expansion around the removable singularity at u = 0
        t2 = (beta - alpha) / 2
        slope = mpmath.mpf(1) / 2 - t2 / t1**2
        return 1 / t1 + slope * u, slope

    with mpmath.extradps(mp.dps // 3 + 5):
        u_x = +u
        t_x = _ooura_exponent(params, u_x)
        dt = 2 + alpha * mpmath.exp(-u_x) + beta * mpmath.exp(u_x)
        denom = -mpmath.expm1(-t_x)
        phi = u_x / denom
        dphi = (denom - u_x * mpmath.exp(-t_x) * dt) / denom**2
    return +phi, +dphi


@dataclass(frozen=True)
class Transform1D:
    kind: TransformKind
    ooura: OouraParams | None = None

    def __post_init__(self) -> None:
        if self.kind is TransformKind.OOURA_FOURIER and self.ooura is None:
            raise QuadratureError("ooura_fourier transform requires parameters")

    @classmethod
    def identity(cls) -> "Transform1D":
        return cls(TransformKind.IDENTITY)

    @classmethod
    def de_exp(cls) -> "Transform1D":
        return cls(TransformKind.DE_EXP)

    @classmethod
    def ooura_fourier(cls, h: RealLike) -> "Transform1D":
        return cls(TransformKind.OOURA_FOURIER, ooura_params(h))

    def eval(self, u: RealLike) -> tuple[mpmath.mpf, mpmath.mpf]:
        """Return (x(u), dx/du)."""
        if self.kind is TransformKind.IDENTITY:
            return to_real(u), mpmath.mpf(1)
        if self.kind is TransformKind.DE_EXP:
            return de_exp_eval(u)
        phi, dphi = ooura_eval(self.ooura, u)
        return self.ooura.M * phi, self.ooura.M * dphi

    def to_dict(self) -> dict[str, object]:
        payload: dict[str, object] = {"kind": self.kind.value}
        if self.ooura is not None:
            payload.update(self.ooura.to_dict())
        return payload


@dataclass(frozen=True)
class TransformChain:
    """One transform per dimension."""

    transforms: tuple[Transform1D, ...]

    @classmethod
    def uniform(cls, transform: Transform1D, dims: int) -> "TransformChain":
        return cls((transform,) * dims)

    @property
    def dims(self) -> int:
        return len(self.transforms)

    def to_dict(self) -> dict[str, object]:
        return {"transforms": [item.to_dict() for item in self.transforms]}


def _compose(factor: Factor, transform: Transform1D) -> Factor:
    def composed(u: mpmath.mpf) -> mpmath.mpf:
        x, dx = transform.eval(u)
        return factor(x) * dx

    return composed


def apply_chain(
    chain: TransformChain,
    base: Integrand,
    *,
    profile: DecayProfile | None = None,
) -> Integrand:
    """g(u) = f(x_1(u_1), ..., x_s(u_s)) * prod_j x_j'(u_j).

    The integral is unchanged, so the reference value carries over. ``profile``
    describes the transformed integrand; the base profile does not.
    """
    if chain.dims != base.dims:
        raise QuadratureError(
            f"dimension mismatch: chain has {chain.dims}, integrand has {base.dims}"
        )
    name = f"{base.name}[{','.join(t.kind.value for t in chain.transforms)}]"
    if base.tensor_factors is not None:
        return Integrand.from_factors(
            [_compose(f, t) for f, t in zip(base.tensor_factors, chain.transforms)],
            reference_value=base.reference_value,
            profile=profile,
            name=name,
        )

    def evaluate(point: Sequence[mpmath.mpf]) -> mpmath.mpf:
        mapped = [t.eval(u) for t, u in zip(chain.transforms, point)]
        jacobian = mpmath.fprod(dx for _, dx in mapped)
        return base.evaluate([x for x, _ in mapped]) * jacobian

    return Integrand(
        dims=base.dims,
        evaluate=evaluate,
        reference_value=base.reference_value,
        profile=profile,
        name=name,
    )
