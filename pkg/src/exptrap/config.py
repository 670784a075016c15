from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .numerics import PrecisionContext


@dataclass
class PlanConfig:
    lam: float = 1.0
    balance: str = "approx_log"


@dataclass
class AdaptiveConfig:
    a: float | None = None
    stop_run: int = 3
    max_points_per_ray: int = 10**6

    def threshold_exponent(self, dims: int) -> float:
        if self.a is not None:
            return self.a
        return 5.0 if dims <= 3 else 6.0


@dataclass
class StudyConfig:
    workers: int = 1
    self_convergence: bool = False


class QuadConfig:
    def __init__(
        self,
        *,
        precision: PrecisionContext | None = None,
        output_dir: Path | None = None,
    ):
        self.precision = precision or PrecisionContext()
        self.plan = PlanConfig()
        self.adaptive = AdaptiveConfig()
        self.study = StudyConfig()
        self.output_dir = (output_dir or Path.cwd() / "results").resolve()
