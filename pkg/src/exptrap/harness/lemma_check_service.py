from __future__ import annotations

import itertools
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import mpmath

from ..decay_model import (
    TailKind,
    brute_force_tail,
    oracle_terms,
    tail_bound_dexp,
    tail_bound_dexp_printed,
    tail_bound_exp,
    tail_bound_exp_unit,
)
from ..log import get_logger
from ..numerics import format_real

logger = get_logger("lemma")

EXP_UNIT_GRID = {"b": ("0.5", "1", "2", "4"), "h": ("0.05", "0.2", "1")}
EXP_GRID = {"c": ("0.5", "1", "3"), "d": ("1", "1.5", "2"), "n": (0, 1, 5)}
DEXP_GRID = {
    "alpha": ("0.5", "1", "2"),
    "c": ("0.5", "1"),
    "d": ("1", "2"),
    "n": (0, 1, 3),
}
COUNTEREXAMPLE = {"alpha": "1", "c": "1", "d": "1", "n": 1}


@dataclass(frozen=True)
class LemmaRow:
    kind: str
    params: dict[str, Any]
    brute_force: mpmath.mpf
    bound: mpmath.mpf
    printed_form: bool = False

    @property
    def holds(self) -> bool:
        return bool(self.brute_force <= self.bound)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "params": {key: str(value) for key, value in self.params.items()},
            "brute_force": format_real(self.brute_force),
            "bound": format_real(self.bound),
            "holds": self.holds,
            "printed_form": self.printed_form,
        }


def _grid(axes: dict[str, tuple]) -> list[dict[str, Any]]:
    keys = list(axes)
    return [dict(zip(keys, values)) for values in itertools.product(*axes.values())]


def _brute(kind: TailKind, params: dict[str, Any], start: int) -> mpmath.mpf:
    terms = oracle_terms(kind, params, start)
    tail = brute_force_tail(kind, params, start, terms)
    if not tail.converged:
        logger.warning("[lemma] %s %s: partial sum not converged", kind.value, params)
    return tail.value


def _check(
    kind: TailKind,
    grid: dict[str, tuple],
    bound: Callable[..., mpmath.mpf],
) -> list[LemmaRow]:
    rows = []
    for point in _grid(grid):
        series = {key: value for key, value in point.items() if key != "n"}
        start = int(point.get("n", 1))
        rows.append(
            LemmaRow(
                kind=kind.value,
                params=point,
                brute_force=_brute(kind, series, start),
                bound=bound(**point),
            )
        )
    return rows


class LemmaCheckService:
    """Brute-force sums against the three tail bounds on fixed parameter grids."""

    def check_exp_unit(self) -> list[LemmaRow]:
        return _check(TailKind.EXP_UNIT, EXP_UNIT_GRID, tail_bound_exp_unit)

    def check_exp(self) -> list[LemmaRow]:
        return _check(TailKind.EXP, EXP_GRID, tail_bound_exp)

    def check_dexp(self) -> list[LemmaRow]:
        return _check(TailKind.DEXP, DEXP_GRID, tail_bound_dexp)

    def counterexample(self) -> LemmaRow:
        series = {key: value for key, value in COUNTEREXAMPLE.items() if key != "n"}
        start = COUNTEREXAMPLE["n"]
        return LemmaRow(
            kind=TailKind.DEXP.value,
            params=dict(COUNTEREXAMPLE),
            brute_force=_brute(TailKind.DEXP, series, start),
            bound=tail_bound_dexp_printed(**COUNTEREXAMPLE),
            printed_form=True,
        )

    def run(self) -> list[LemmaRow]:
        rows = self.check_exp_unit() + self.check_exp() + self.check_dexp()
        rows.append(self.counterexample())
        failed = [row for row in rows if not row.printed_form and not row.holds]
        logger.info("[lemma] %d rows checked, %d violations", len(rows), len(failed))
        return rows

    @staticmethod
    def all_hold(rows: list[LemmaRow]) -> bool:
        return all(row.holds for row in rows if not row.printed_form)
