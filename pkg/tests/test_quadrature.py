from __future__ import annotations

import random
import sys
import unittest
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parents[1]
SRC_ROOT = REPO_ROOT / "src"
if str(SRC_ROOT) not in sys.path:
    sys.path.insert(0, str(SRC_ROOT))

import mpmath  # noqa: E402
from mpmath import mp  # noqa: E402

from exptrap.numerics import PrecisionContext  # noqa: E402
from exptrap.quadrature import (  # noqa: E402
    Integrand,
    QuadratureError,
    error_split,
    evaluate_adaptive,
    evaluate_bounds,
    evaluate_box,
    poisson_check,
)
from exptrap.transforms import Transform1D, TransformChain, apply_chain  # noqa: E402


def gauss(x: mpmath.mpf) -> mpmath.mpf:
    return mpmath.exp(-x * x)


def gauss_hat(xi: mpmath.mpf) -> mpmath.mpf:
    return mpmath.sqrt(mp.pi) * mpmath.exp(-(mp.pi**2) * xi * xi)


def gaussian(dims: int) -> Integrand:
    return Integrand.from_factors(
        [gauss] * dims,
        reference_value=mp.pi ** (mpmath.mpf(dims) / 2),
        fourier_factors=[gauss_hat] * dims,
        name="gaussian",
    )


class PrecisionScopeMixin:
    digits = 60

    def setUp(self) -> None:
        scope = PrecisionContext(self.digits).activate()
        scope.__enter__()
        self.addCleanup(scope.__exit__, None, None, None)


class EvaluateBoxTest(PrecisionScopeMixin, unittest.TestCase):
    def test_one_dimensional_gaussian(self) -> None:
        result = evaluate_box(gaussian(1), ["0.5"], [2])
        expected = (1 + 2 * mpmath.exp("-0.25") + 2 * mpmath.exp(-1)) / 2
        self.assertLess(abs(result.estimate - expected), mpmath.mpf("1e-55"))
        error = abs(result.estimate - mpmath.mpf("1.646680"))
        self.assertLess(error, mpmath.mpf("1e-6"))
        self.assertEqual(result.points_evaluated, 5)
        self.assertEqual(result.truncation_box_used, ((2, 2),))

    def test_zero_width_box_is_single_point(self) -> None:
        result = evaluate_box(gaussian(1), ["0.5"], [0])
        self.assertEqual(result.estimate, mpmath.mpf("0.5"))
        self.assertEqual(result.points_evaluated, 1)

    def test_two_dimensional_gaussian_is_square(self) -> None:
        one = evaluate_box(gaussian(1), ["0.5"], [2]).estimate
        two = evaluate_box(gaussian(2), ["0.5", "0.5"], [2, 2])
        self.assertLess(abs(two.estimate - one**2), mpmath.mpf("1e-55"))
        self.assertEqual(two.points_evaluated, 25)

    def test_dimension_mismatch(self) -> None:
        with self.assertRaises(QuadratureError):
            evaluate_box(gaussian(2), ["0.5"], [2, 2])
        with self.assertRaises(QuadratureError):
            evaluate_box(gaussian(2), ["0.5", "0.5"], [2])
        with self.assertRaises(QuadratureError):
            evaluate_box(gaussian(1), ["0"], [2])
        with self.assertRaises(QuadratureError):
            evaluate_bounds(gaussian(1), ["0.5"], [(-1, 2)])

    def test_tensor_path_matches_direct_summation(self) -> None:
        rng = random.Random(3)
        for dims in (2, 3):
            widths = [rng.randint(1, 4) for _ in range(dims)]
            steps = [mpmath.mpf(repr(rng.uniform(0.2, 0.9))) for _ in range(dims)]
            coeffs = [mpmath.mpf(repr(rng.uniform(0.5, 2))) for _ in range(dims)]
            factors = [
                (lambda x, c=c: mpmath.exp(-c * x * x) * (1 + x / 3)) for c in coeffs
            ]
            tensor = Integrand.from_factors(factors)
            direct = Integrand(dims=dims, evaluate=tensor.evaluate)
            a = evaluate_box(tensor, steps, widths).estimate
            b = evaluate_box(direct, steps, widths).estimate
            tolerance = mpmath.mpf(10) ** -(self.digits - 8)
            self.assertLessEqual(abs(a - b) / abs(b), tolerance)

    def test_reflection_of_even_integrand(self) -> None:
        direct = Integrand(dims=2, evaluate=lambda p: gauss(p[0]) * gauss(2 * p[1]))
        mirrored = Integrand(dims=2, evaluate=lambda p: direct.evaluate([-p[0], -p[1]]))
        steps = ["0.3", "0.7"]
        self.assertEqual(
            evaluate_box(direct, steps, [3, 2]).estimate,
            evaluate_box(mirrored, steps, [3, 2]).estimate,
        )

    def test_refinement_is_monotone_for_nonnegative_integrands(self) -> None:
        f = gaussian(2)
        values = [evaluate_box(f, ["0.4", "0.4"], [k, k]).estimate for k in range(6)]
        self.assertEqual(values, sorted(values))

    def test_asymmetric_bounds(self) -> None:
        f = Integrand.from_factors([gauss])
        result = evaluate_bounds(f, ["0.5"], [(1, 3)])
        expected = sum(gauss(mpmath.mpf(k) / 2) for k in range(-1, 4)) / 2
        self.assertLess(abs(result.estimate - expected), mpmath.mpf("1e-55"))
        self.assertEqual(result.points_evaluated, 5)


class AdaptiveTest(PrecisionScopeMixin, unittest.TestCase):
    def test_gaussian_box(self) -> None:
        result = evaluate_adaptive(gaussian(1), "0.5", 5)
        self.assertEqual(result.truncation_box_used, ((6, 6),))
        self.assertEqual(result.points_evaluated, 13)

    def test_every_factor_gets_the_full_threshold(self) -> None:
        one = evaluate_adaptive(gaussian(1), "0.5", 5)
        two = evaluate_adaptive(gaussian(2), "0.5", 5)
        self.assertEqual(two.truncation_box_used, ((6, 6), (6, 6)))
        self.assertEqual(two.points_evaluated, 169)
        ratio = two.estimate / one.estimate**2
        self.assertLess(abs(ratio - 1), mpmath.mpf(10) ** -50)

    def test_transformed_sinc_two_dimensions_doubles_the_error(self) -> None:
        h = mp.pi / 10
        one_d = Integrand.from_factors([mpmath.sinc], reference_value=mp.pi / 2)
        two_d = Integrand.from_factors(
            [mpmath.sinc] * 2, reference_value=(mp.pi / 2) ** 2
        )
        transform = Transform1D.ooura_fourier(h)
        one = evaluate_adaptive(
            apply_chain(TransformChain((transform,)), one_d), h, 5
        )
        two = evaluate_adaptive(
            apply_chain(TransformChain((transform,) * 2), two_d), h, 5
        )
        self.assertEqual(two.truncation_box_used, one.truncation_box_used * 2)
        error_one = abs(one.estimate / one_d.reference_value - 1)
        error_two = abs(two.estimate / two_d.reference_value - 1)
        self.assertLess(abs(error_two / error_one - 2), mpmath.mpf("1e-3"))

    def test_stop_run_one_gives_same_box_for_monotone_decay(self) -> None:
        result = evaluate_adaptive(gaussian(1), "0.5", 5, stop_run=1)
        self.assertEqual(result.truncation_box_used, ((6, 6),))

    def test_no_decay_detected(self) -> None:
        flat = Integrand.from_factors([lambda x: mpmath.mpf(1)])
        with self.assertRaisesRegex(QuadratureError, "no decay detected"):
            evaluate_adaptive(flat, "0.5", 5, max_points=500)

    def test_requires_tensor_factors(self) -> None:
        direct = Integrand(dims=1, evaluate=lambda p: gauss(p[0]))
        with self.assertRaises(QuadratureError):
            evaluate_adaptive(direct, "0.5", 5)

    def test_transformed_sinc_box_is_asymmetric(self) -> None:
        h = mp.pi / 10
        base = Integrand.from_factors([mpmath.sinc], reference_value=mp.pi / 2)
        g = apply_chain(TransformChain((Transform1D.ooura_fourier(h),)), base)
        result = evaluate_adaptive(g, h, 5)
        (k_minus, k_plus), = result.truncation_box_used
        self.assertNotEqual(k_minus, k_plus)
        self.assertLess(abs(result.estimate - mp.pi / 2), mpmath.mpf("1e-4"))

    def test_transformed_sinc_converges(self) -> None:
        base = Integrand.from_factors([mpmath.sinc], reference_value=mp.pi / 2)
        errors = []
        for m in (10, 20, 40):
            h = mp.pi / m
            g = apply_chain(TransformChain((Transform1D.ooura_fourier(h),)), base)
            errors.append(abs(evaluate_adaptive(g, h, 5).estimate - mp.pi / 2))
        self.assertGreater(errors[0], errors[1])
        self.assertGreater(errors[1], errors[2])


class PoissonTest(PrecisionScopeMixin, unittest.TestCase):
    digits = 120

    def test_gaussian_sides_agree(self) -> None:
        for h in ("0.5", "1", "2"):
            lhs, rhs = poisson_check(gaussian(1), h, 40)
            self.assertLessEqual(abs(lhs - rhs), mpmath.mpf(10) ** -110, f"h={h}")

    def test_unit_step_value(self) -> None:
        lhs, _ = poisson_check(gaussian(1), 1, 20)
        self.assertLess(abs(lhs - mpmath.mpf("1.7726372048")), mpmath.mpf("1e-10"))

    def test_two_dimensional_product(self) -> None:
        lhs, rhs = poisson_check(gaussian(2), 1, 30)
        one, _ = poisson_check(gaussian(1), 1, 30)
        self.assertLessEqual(abs(lhs - rhs), mpmath.mpf(10) ** -110)
        self.assertLessEqual(abs(lhs - one**2), mpmath.mpf(10) ** -110)

    def test_requires_fourier_factors(self) -> None:
        with self.assertRaises(QuadratureError):
            poisson_check(Integrand.from_factors([gauss]), 1, 10)


class ErrorSplitTest(PrecisionScopeMixin, unittest.TestCase):
    def test_total_is_dominated_by_parts(self) -> None:
        split = error_split(gaussian(1), ["0.5"], [3], [60])
        self.assertLessEqual(
            split.total, split.discretization + split.truncation + mpmath.mpf("1e-55")
        )
        self.assertGreater(split.truncation, split.discretization)

    def test_requires_reference(self) -> None:
        with self.assertRaises(QuadratureError):
            error_split(Integrand.from_factors([gauss]), ["0.5"], [3], [60])


if __name__ == "__main__":
    unittest.main()
