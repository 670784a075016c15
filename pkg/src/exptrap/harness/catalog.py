from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

import mpmath
from mpmath import mp

from ..model import (
    DecayModelError,
    DecayProfile,
    FieldCaster,
    FourierExponential,
    FunctionDoubleExponential,
    FunctionExponential,
)
from ..numerics import RealLike, format_real
from ..quadrature import Integrand
from ..transforms import Transform1D, TransformChain, apply_chain

CATALOG_NAMES = ("gaussian", "gaussian_aniso", "exp_moment", "sinc")

# decay parameters assumed for the transformed half-line integrands
_DEXP_DEFAULTS = {"a": 1, "b": 1, "c": 1, "d": 1, "e": 1}


class CatalogError(ValueError):
    """Unknown catalog entry or invalid entry parameters."""


@dataclass(frozen=True)
class CatalogEntry:
    """A built-in integrand with its planning profile and closed-form integral.

    ``base`` lives on the original domain; ``integrand(h_per_dim)`` returns the
    function actually summed on R^s. The Ooura chain depends on the step, so
    sinc entries rebuild it for every h.
    """

    name: str
    dims: int
    params: dict[str, Any]
    base: Integrand
    profile: DecayProfile
    reference_value: mpmath.mpf
    chain: TransformChain | None = None
    step_dependent: bool = False
    transformed: Integrand | None = field(default=None, repr=False, compare=False)

    def integrand(self, h_per_dim: Sequence[RealLike] | None = None) -> Integrand:
        if not self.step_dependent:
            return self.transformed if self.transformed is not None else self.base
        if h_per_dim is None or len(h_per_dim) != self.dims:
            raise CatalogError(
                f"'{self.name}' needs {self.dims} step sizes to build its transform"
            )
        chain = TransformChain(tuple(Transform1D.ooura_fourier(h) for h in h_per_dim))
        return apply_chain(chain, self.base, profile=self.profile)

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "name": self.name,
            "dims": self.dims,
            "params": dict(self.params),
            "reference_value": format_real(self.reference_value),
            "profile": self.profile.to_dict(),
        }
        if self.chain is not None:
            payload["transforms"] = self.chain.to_dict()["transforms"]
        elif self.step_dependent:
            payload["transforms"] = [{"kind": "ooura_fourier"}] * self.dims
        return payload


def _gaussian_factor(sigma: mpmath.mpf) -> Callable[[mpmath.mpf], mpmath.mpf]:
    return lambda x: mpmath.exp(-sigma * x * x)


def _gaussian_fourier(sigma: mpmath.mpf) -> Callable[[mpmath.mpf], mpmath.mpf]:
    # transform convention: fhat(xi) = integral of f(x) exp(-2 pi i x xi) dx
    scale = mpmath.sqrt(mp.pi / sigma)
    return lambda xi: scale * mpmath.exp(-(mp.pi**2) * xi * xi / sigma)


def _moment_factor(x: mpmath.mpf) -> mpmath.mpf:
    return x * x * mpmath.exp(-x)


def _sinc_factor(x: mpmath.mpf) -> mpmath.mpf:
    return mpmath.sinc(x)


def _sigmas(params: Mapping[str, Any], dims: int) -> tuple[mpmath.mpf, ...]:
    raw = params.get("sigma")
    if raw is None:
        raw = list(range(1, dims + 1))
    if isinstance(raw, (int, float, str)):
        raw = [raw] * dims
    values = list(raw)
    if len(values) != dims:
        raise CatalogError(f"sigma needs {dims} values, got {len(values)}")
    try:
        return tuple(
            FieldCaster.to_positive_real(item, field=f"sigma[{j}]")
            for j, item in enumerate(values)
        )
    except DecayModelError as exc:
        raise CatalogError(str(exc)) from exc


def _gaussian_entry(
    name: str,
    dims: int,
    sigmas: tuple[mpmath.mpf, ...],
    params: Mapping[str, Any],
) -> CatalogEntry:
    profile = DecayProfile(
        dims=dims,
        fourier=tuple(
            FourierExponential(a=mp.pi**2 / s, b=mpmath.mpf(2)) for s in sigmas
        ),
        function=tuple(FunctionExponential(c=s, d=mpmath.mpf(2)) for s in sigmas),
        norm_f_nu=mpmath.mpf(1),
        norm_fhat_omega=mpmath.fprod(mpmath.sqrt(mp.pi / s) for s in sigmas),
    )
    reference = mpmath.fprod(mpmath.sqrt(mp.pi / s) for s in sigmas)
    base = Integrand.from_factors(
        [_gaussian_factor(s) for s in sigmas],
        reference_value=reference,
        profile=profile,
        fourier_factors=[_gaussian_fourier(s) for s in sigmas],
        name=name,
    )
    return CatalogEntry(
        name=name,
        dims=dims,
        params=dict(params),
        base=base,
        profile=profile,
        reference_value=reference,
    )


def _dexp_profile(dims: int, params: Mapping[str, Any]) -> DecayProfile:
    merged = {key: params.get(key, default) for key, default in _DEXP_DEFAULTS.items()}
    try:
        return DecayProfile.isotropic(
            dims,
            FourierExponential(
                a=FieldCaster.to_positive_real(merged["a"], field="a"),
                b=FieldCaster.to_positive_real(merged["b"], field="b"),
            ),
            FunctionDoubleExponential(
                e=FieldCaster.to_positive_real(merged["e"], field="e"),
                c=FieldCaster.to_positive_real(merged["c"], field="c"),
                d=FieldCaster.to_real_at_least(merged["d"], 1, field="d"),
            ),
        )
    except DecayModelError as exc:
        raise CatalogError(str(exc)) from exc


def _exp_moment_entry(dims: int, params: Mapping[str, Any]) -> CatalogEntry:
    profile = _dexp_profile(dims, params)
    reference = mpmath.mpf(2) ** dims
    base = Integrand.from_factors(
        [_moment_factor] * dims, reference_value=reference, name="exp_moment"
    )
    chain = TransformChain.uniform(Transform1D.de_exp(), dims)
    return CatalogEntry(
        name="exp_moment",
        dims=dims,
        params=dict(params),
        base=base,
        profile=profile,
        reference_value=reference,
        chain=chain,
        transformed=apply_chain(chain, base, profile=profile),
    )


def _sinc_entry(dims: int, params: Mapping[str, Any]) -> CatalogEntry:
    profile = _dexp_profile(dims, params)
    reference = (mp.pi / 2) ** dims
    base = Integrand.from_factors(
        [_sinc_factor] * dims, reference_value=reference, name="sinc"
    )
    return CatalogEntry(
        name="sinc",
        dims=dims,
        params=dict(params),
        base=base,
        profile=profile,
        reference_value=reference,
        step_dependent=True,
    )


def catalog_lookup(
    name: str, dims: int, params: Mapping[str, Any] | None = None
) -> CatalogEntry:
    key = str(name or "").strip().lower()
    if key not in CATALOG_NAMES:
        raise CatalogError(
            f"unknown integrand '{name}', "
            f"expected one of {', '.join(CATALOG_NAMES)}"
        )
    if isinstance(dims, bool) or not isinstance(dims, int) or dims < 1:
        raise CatalogError(f"dims must be a positive integer, got {dims!r}")
    params = dict(params or {})

    if key == "gaussian":
        return _gaussian_entry(key, dims, (mpmath.mpf(1),) * dims, params)
    if key == "gaussian_aniso":
        return _gaussian_entry(key, dims, _sigmas(params, dims), params)
    if key == "exp_moment":
        return _exp_moment_entry(dims, params)
    return _sinc_entry(dims, params)
