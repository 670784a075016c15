from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Any, Union

import mpmath

from .numerics import format_real, to_real


class DecayModelError(ValueError):
    """Invalid decay parameters or profile payload."""


class FieldCaster:
    """Shared coercion helpers for profile payload normalization."""

    @staticmethod
    def to_positive_real(value: Any, *, field: str) -> mpmath.mpf:
        if value is None or isinstance(value, bool):
            raise DecayModelError(f"field '{field}' is required")
        try:
            real = to_real(value)
        except (TypeError, ValueError) as exc:
            raise DecayModelError(f"field '{field}' must be a real: {value!r}") from exc
        if not real > 0:
            raise DecayModelError(f"field '{field}' must be > 0, got {value}")
        return real

    @staticmethod
    def to_real_at_least(value: Any, lower: int, *, field: str) -> mpmath.mpf:
        real = FieldCaster.to_positive_real(value, field=field)
        if real < lower:
            raise DecayModelError(f"field '{field}' must be >= {lower}, got {value}")
        return real

    @staticmethod
    def to_positive_int(value: Any, *, field: str) -> int:
        if isinstance(value, bool):
            raise DecayModelError(f"field '{field}' must be an integer")
        try:
            number = int(value)
        except (TypeError, ValueError) as exc:
            raise DecayModelError(f"field '{field}' must be an integer") from exc
        if number < 1 or number != to_real(value):
            raise DecayModelError(f"field '{field}' must be a positive integer")
        return number

    @staticmethod
    def require_object_list(value: Any, *, field: str) -> list[dict[str, Any]]:
        if not isinstance(value, list) or not value:
            raise DecayModelError(f"field '{field}' must be a non-empty list")
        if not all(isinstance(item, dict) for item in value):
            raise DecayModelError(f"field '{field}' must contain objects")
        return [dict(item) for item in value]


class DecayKind(str, Enum):
    POLY = "poly"
    EXP = "exp"
    DEXP = "dexp"

    @classmethod
    def from_str(cls, value: str) -> "DecayKind":
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise DecayModelError(f"Unsupported decay kind: {value}")

    @classmethod
    def values(cls) -> list[str]:
        return [item.value for item in cls]

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class PolynomialDecay:
    """Classes W1/F1: decay like |x|^(-alpha)."""

    alpha: mpmath.mpf

    kind = DecayKind.POLY

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind.value, "alpha": format_real(self.alpha)}


@dataclass(frozen=True)
class FourierExponential:
    """Class W2: omega_j(xi) = exp(a_j |xi|^b_j)."""

    a: mpmath.mpf
    b: mpmath.mpf

    kind = DecayKind.EXP

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "a": format_real(self.a),
            "b": format_real(self.b),
        }


@dataclass(frozen=True)
class FunctionExponential:
    """Class F2: nu_j(x) = exp(c_j |x|^d_j), d_j >= 1."""

    c: mpmath.mpf
    d: mpmath.mpf

    kind = DecayKind.EXP

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "c": format_real(self.c),
            "d": format_real(self.d),
        }


@dataclass(frozen=True)
class FunctionDoubleExponential:
    """Class F3: nu_j(x) = exp(e_j exp(c_j |x|^d_j)), d_j >= 1."""

    e: mpmath.mpf
    c: mpmath.mpf
    d: mpmath.mpf

    kind = DecayKind.DEXP

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "e": format_real(self.e),
            "c": format_real(self.c),
            "d": format_real(self.d),
        }


FourierDecay = Union[PolynomialDecay, FourierExponential]
FunctionDecay = Union[PolynomialDecay, FunctionExponential, FunctionDoubleExponential]


def _fourier_from_raw(item: dict[str, Any], index: int) -> FourierDecay:
    kind = DecayKind.from_str(item.get("kind", ""))
    where = f"fourier[{index}]"
    if kind is DecayKind.POLY:
        alpha = FieldCaster.to_positive_real(item.get("alpha"), field=f"{where}.alpha")
        return PolynomialDecay(alpha)
    if kind is DecayKind.EXP:
        return FourierExponential(
            a=FieldCaster.to_positive_real(item.get("a"), field=f"{where}.a"),
            b=FieldCaster.to_positive_real(item.get("b"), field=f"{where}.b"),
        )
    raise DecayModelError(f"{where}: Fourier side supports only 'poly' or 'exp'")


def _function_from_raw(item: dict[str, Any], index: int) -> FunctionDecay:
    kind = DecayKind.from_str(item.get("kind", ""))
    where = f"function[{index}]"
    if kind is DecayKind.POLY:
        alpha = FieldCaster.to_positive_real(item.get("alpha"), field=f"{where}.alpha")
        return PolynomialDecay(alpha)
    c = FieldCaster.to_positive_real(item.get("c"), field=f"{where}.c")
    d = FieldCaster.to_real_at_least(item.get("d"), 1, field=f"{where}.d")
    if kind is DecayKind.EXP:
        return FunctionExponential(c=c, d=d)
    return FunctionDoubleExponential(
        e=FieldCaster.to_positive_real(item.get("e"), field=f"{where}.e"), c=c, d=d
    )


@dataclass(frozen=True)
class DecayProfile:
    """Per-dimension decay metadata of f (nu side) and of its Fourier transform."""

    dims: int
    fourier: tuple[FourierDecay, ...]
    function: tuple[FunctionDecay, ...]
    norm_f_nu: mpmath.mpf = mpmath.mpf(1)
    norm_fhat_omega: mpmath.mpf = mpmath.mpf(1)

    def __post_init__(self) -> None:
        if self.dims < 1:
            raise DecayModelError("dims must be >= 1")
        if len(self.fourier) != self.dims or len(self.function) != self.dims:
            raise DecayModelError(
                f"profile expects {self.dims} dimensions, got "
                f"fourier={len(self.fourier)} function={len(self.function)}"
            )
        for side, items in (("fourier", self.fourier), ("function", self.function)):
            if len({item.kind for item in items}) != 1:
                raise DecayModelError(f"all {side} dimensions must share a decay class")
        for item in self.function:
            if isinstance(item, PolynomialDecay):
                continue
            if item.d < 1:
                raise DecayModelError(f"function decay requires d >= 1, got {item.d}")
        if not (self.norm_f_nu > 0 and self.norm_fhat_omega > 0):
            raise DecayModelError("norm bounds must be > 0")

    @property
    def fourier_kind(self) -> DecayKind:
        return self.fourier[0].kind

    @property
    def function_kind(self) -> DecayKind:
        return self.function[0].kind

    @property
    def norm(self) -> mpmath.mpf:
        return max(self.norm_f_nu, self.norm_fhat_omega)

    def with_norms(self, norm_f_nu: Any, norm_fhat_omega: Any) -> "DecayProfile":
        return DecayProfile(
            dims=self.dims,
            fourier=self.fourier,
            function=self.function,
            norm_f_nu=FieldCaster.to_positive_real(norm_f_nu, field="norm_f_nu"),
            norm_fhat_omega=FieldCaster.to_positive_real(
                norm_fhat_omega, field="norm_fhat_omega"
            ),
        )

    @classmethod
    def isotropic(
        cls,
        dims: int,
        fourier: FourierDecay,
        function: FunctionDecay,
        **norms: Any,
    ) -> "DecayProfile":
        return cls(
            dims=dims, fourier=(fourier,) * dims, function=(function,) * dims, **norms
        )

    @classmethod
    def from_raw(cls, payload: dict[str, Any]) -> "DecayProfile":
        if not isinstance(payload, dict):
            raise DecayModelError("profile must be a JSON object")
        dims = FieldCaster.to_positive_int(payload.get("dims"), field="dims")
        fourier = FieldCaster.require_object_list(
            payload.get("fourier"), field="fourier"
        )
        function = FieldCaster.require_object_list(
            payload.get("function"), field="function"
        )
        norms = {
            key: FieldCaster.to_positive_real(payload[key], field=key)
            for key in ("norm_f_nu", "norm_fhat_omega")
            if payload.get(key) is not None
        }
        return cls(
            dims=dims,
            fourier=tuple(
                _fourier_from_raw(item, i) for i, item in enumerate(fourier)
            ),
            function=tuple(
                _function_from_raw(item, i) for i, item in enumerate(function)
            ),
            **norms,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "dims": self.dims,
            "fourier": [item.to_dict() for item in self.fourier],
            "function": [item.to_dict() for item in self.function],
            "norm_f_nu": format_real(self.norm_f_nu),
            "norm_fhat_omega": format_real(self.norm_fhat_omega),
        }

    @classmethod
    def from_json(cls, text: str) -> "DecayProfile":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DecayModelError(f"invalid profile json: {exc}") from exc
        return cls.from_raw(payload)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)
