from __future__ import annotations

import sys
import unittest
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parents[1]
SRC_ROOT = REPO_ROOT / "src"
if str(SRC_ROOT) not in sys.path:
    sys.path.insert(0, str(SRC_ROOT))

import mpmath  # noqa: E402

from exptrap.harness.rate_fit import (  # noqa: E402
    RateFitError,
    RateModel,
    fit_rate,
    regressor,
)
from exptrap.harness.study_service import StudyRecord  # noqa: E402
from exptrap.numerics import PrecisionContext  # noqa: E402


def record(n: int, error: mpmath.mpf, *, limited: bool = False) -> StudyRecord:
    return StudyRecord(
        budget_N=n,
        points_used=n,
        estimate=mpmath.mpf(1) + error,
        reference=mpmath.mpf(1),
        relative_error=error,
        predicted_bound=None,
        h=mpmath.mpf(1) / n,
        lam=mpmath.mpf(1),
        precision_limited=limited,
    )


class FitRateTest(unittest.TestCase):
    def setUp(self) -> None:
        scope = PrecisionContext(60).activate()
        scope.__enter__()
        self.addCleanup(scope.__exit__, None, None, None)

    def test_recovers_exponential_rate(self) -> None:
        c = mpmath.mpf("1.6")
        records = [record(n, mpmath.exp(-c * n)) for n in (10, 20, 30, 40)]
        fit = fit_rate(records, "exp_rate", 1)
        self.assertLess(abs(fit.c - c), mpmath.mpf("1e-40"))
        self.assertLess(abs(fit.logK), mpmath.mpf("1e-40"))
        self.assertLess(fit.residual_rms, mpmath.mpf("1e-40"))
        self.assertEqual(fit.points, 4)

    def test_recovers_double_exponential_rate(self) -> None:
        budgets = (16, 36, 64, 100, 144, 196)
        records = [
            record(n, 7 * mpmath.exp(-3 * regressor(RateModel.DEXP_RATE, n, 2)))
            for n in budgets
        ]
        fit = fit_rate(records, RateModel.DEXP_RATE, 2)
        self.assertLess(abs(fit.c - 3), mpmath.mpf("1e-40"))
        self.assertLess(abs(fit.logK - mpmath.log(7)), mpmath.mpf("1e-40"))
        self.assertEqual(fit.to_dict()["model"], "dexp_rate")

    def test_regressor(self) -> None:
        value = regressor(RateModel.EXP_RATE, 100, 2)
        self.assertLess(abs(value - 10), mpmath.mpf("1e-50"))
        expected = 10 / mpmath.log(100)
        value = regressor(RateModel.DEXP_RATE, 100, 2)
        self.assertLess(abs(value - expected), mpmath.mpf("1e-50"))
        with self.assertRaises(RateFitError):
            regressor(RateModel.DEXP_RATE, 1, 1)

    def test_all_zero_errors(self) -> None:
        records = [record(n, mpmath.mpf(0)) for n in (10, 20, 30)]
        with self.assertRaisesRegex(RateFitError, "all relative errors are zero"):
            fit_rate(records, "exp_rate", 1)

    def test_insufficient_points(self) -> None:
        records = [record(n, mpmath.exp(-n)) for n in (10, 20)]
        with self.assertRaisesRegex(RateFitError, "insufficient points"):
            fit_rate(records, "exp_rate", 1)
        with self.assertRaisesRegex(RateFitError, "insufficient points"):
            fit_rate([], "exp_rate", 1)

    def test_precision_limited_records_are_skipped(self) -> None:
        records = [record(n, mpmath.exp(-2 * n)) for n in (10, 20, 30)]
        records.append(record(40, mpmath.mpf("1e-3"), limited=True))
        fit = fit_rate(records, "exp_rate", 1)
        self.assertEqual(fit.points, 3)
        self.assertLess(abs(fit.c - 2), mpmath.mpf("1e-40"))

    def test_unknown_model_and_dims(self) -> None:
        records = [record(n, mpmath.exp(-n)) for n in (10, 20, 30)]
        with self.assertRaises(RateFitError):
            fit_rate(records, "linear", 1)
        with self.assertRaises(RateFitError):
            fit_rate(records, "exp_rate", 0)


if __name__ == "__main__":
    unittest.main()
