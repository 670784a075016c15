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
from exptrap.quadrature import Integrand, QuadratureError, evaluate_box  # noqa: E402
from exptrap.transforms import (  # noqa: E402
    OOURA_BETA,
    Transform1D,
    TransformChain,
    apply_chain,
    de_exp_eval,
    ooura_eval,
    ooura_params,
)


def moment(x: mpmath.mpf) -> mpmath.mpf:
    return x * x * mpmath.exp(-x)


class PrecisionScopeMixin:
    digits = 60

    def setUp(self) -> None:
        scope = PrecisionContext(self.digits).activate()
        scope.__enter__()
        self.addCleanup(scope.__exit__, None, None, None)

    def assertRelClose(self, actual, expected, digits: int) -> None:
        expected = mpmath.mpf(expected)
        self.assertLessEqual(
            abs(actual - expected) / abs(expected),
            mpmath.mpf(10) ** (-digits),
            f"{mpmath.nstr(actual, 20)} != {mpmath.nstr(expected, 20)}",
        )


class DeExpTest(PrecisionScopeMixin, unittest.TestCase):
    def test_values(self) -> None:
        x, dx = de_exp_eval(0)
        self.assertRelClose(x, 1 / mp.e, 50)
        self.assertRelClose(dx, 2 / mp.e, 50)
        self.assertRelClose(x, "0.367879", 5)

        x, dx = de_exp_eval(1)
        expected = mpmath.exp(1 - 1 / mp.e)
        self.assertRelClose(x, expected, 50)
        self.assertRelClose(dx, (1 + 1 / mp.e) * expected, 50)

    def test_left_tail_vanishes_double_exponentially(self) -> None:
        x, _ = de_exp_eval(-6)
        self.assertLess(x, mpmath.exp(-400))

    def test_monotone(self) -> None:
        rng = random.Random(99)
        for _ in range(100):
            u1, u2 = sorted(rng.uniform(-5, 5) for _ in range(2))
            if u1 == u2:
                continue
            self.assertLess(de_exp_eval(repr(u1))[0], de_exp_eval(repr(u2))[0])


class OouraTest(PrecisionScopeMixin, unittest.TestCase):
    def test_params(self) -> None:
        params = ooura_params(mp.pi / 10)
        self.assertRelClose(params.M, 10, 50)
        self.assertEqual(params.beta, OOURA_BETA)
        expected = OOURA_BETA / mpmath.sqrt(1 + 10 * mpmath.log(11) / (4 * mp.pi))
        self.assertRelClose(params.alpha, expected, 50)
        self.assertRelClose(params.alpha, "0.146598", 5)
        self.assertLess(ooura_params("1e-12").alpha, mpmath.mpf("0.003"))

    def test_params_reject_non_positive_step(self) -> None:
        with self.assertRaises(QuadratureError):
            ooura_params(0)

    def test_value_at_origin(self) -> None:
        params = ooura_params(mp.pi / 10)
        phi, dphi = ooura_eval(params, 0)
        t1 = 2 + params.alpha + params.beta
        self.assertRelClose(phi, 1 / t1, 50)
        self.assertRelClose(phi, "0.417255", 4)
        expected = mpmath.mpf(1) / 2 - (params.beta - params.alpha) / 2 / t1**2
        self.assertRelClose(dphi, expected, 50)

    def test_limit_form_is_continuous(self) -> None:
        params = ooura_params(mp.pi / 10)
        near, _ = ooura_eval(params, "1e-25")
        regular, dregular = ooura_eval(params, "1e-12")
        self.assertLess(abs(near - regular), mpmath.mpf("1e-11"))
        _, dnear = ooura_eval(params, "1e-25")
        self.assertLess(abs(dnear - dregular), mpmath.mpf("1e-10"))

    def test_limits(self) -> None:
        params = ooura_params(mp.pi / 10)
        phi, dphi = ooura_eval(params, 10)
        self.assertRelClose(phi, 10, 40)
        self.assertRelClose(dphi, 1, 40)
        phi, _ = ooura_eval(params, -6)
        self.assertLess(abs(phi), mpmath.mpf("1e-25"))

    def test_derivative_matches_finite_differences(self) -> None:
        params = ooura_params(mp.pi / 10)
        rng = random.Random(5)
        step = mpmath.mpf("1e-15")
        for _ in range(50):
            u = mpmath.mpf(repr(rng.uniform(-3, 3)))
            _, dphi = ooura_eval(params, u)
            plus, _ = ooura_eval(params, u + step)
            minus, _ = ooura_eval(params, u - step)
            central = (plus - minus) / (2 * step)
            self.assertLessEqual(abs(central - dphi) / abs(dphi), mpmath.mpf("1e-20"))

    def test_transformed_sinc_decays_at_nodes(self) -> None:
        h = mp.pi / 10
        transform = Transform1D.ooura_fourier(h)

        def g(u: mpmath.mpf) -> mpmath.mpf:
            x, dx = transform.eval(u)
            return mpmath.sinc(x) * dx

        for k in range(40, 61):
            self.assertLess(abs(g(k * h)), mpmath.mpf("1e-30"), f"k={k}")
            self.assertLess(abs(g(-k * h)), mpmath.mpf("1e-30"), f"k=-{k}")


class ApplyChainTest(PrecisionScopeMixin, unittest.TestCase):
    def test_identity_chain(self) -> None:
        base = Integrand.from_factors(
            [lambda x: mpmath.exp(-x * x)] * 2, reference_value=mp.pi
        )
        chain = TransformChain.uniform(Transform1D.identity(), 2)
        g = apply_chain(chain, base)
        point = [mpmath.mpf("0.3"), mpmath.mpf("-1.2")]
        self.assertEqual(g.evaluate(point), base.evaluate(point))
        self.assertEqual(g.reference_value, mp.pi)

    def test_de_exp_composition_at_origin(self) -> None:
        base = Integrand.from_factors([moment], reference_value=2)
        g = apply_chain(TransformChain((Transform1D.de_exp(),)), base)
        x = 1 / mp.e
        expected = x * x * mpmath.exp(-x) * 2 * x
        self.assertRelClose(g.evaluate([mpmath.mpf(0)]), expected, 50)
        self.assertRelClose(g.evaluate([mpmath.mpf(0)]), "0.068927", 4)

    def test_ooura_sinc_at_origin(self) -> None:
        h = mp.pi / 10
        base = Integrand.from_factors([mpmath.sinc], reference_value=mp.pi / 2)
        g = apply_chain(TransformChain((Transform1D.ooura_fourier(h),)), base)
        params = ooura_params(h)
        phi, dphi = ooura_eval(params, 0)
        expected = mpmath.sin(10 * phi) / phi * dphi
        self.assertRelClose(g.evaluate([mpmath.mpf(0)]), expected, 40)

    def test_non_tensor_base(self) -> None:
        base = Integrand(dims=2, evaluate=lambda p: moment(p[0]) * moment(p[1]))
        g = apply_chain(TransformChain.uniform(Transform1D.de_exp(), 2), base)
        self.assertIsNone(g.tensor_factors)
        x, dx = de_exp_eval("0.5")
        self.assertRelClose(
            g.evaluate([mpmath.mpf("0.5")] * 2), (moment(x) * dx) ** 2, 50
        )

    def test_dimension_mismatch(self) -> None:
        base = Integrand.from_factors([moment])
        with self.assertRaises(QuadratureError):
            apply_chain(TransformChain.uniform(Transform1D.de_exp(), 2), base)

    def test_de_exp_preserves_integral(self) -> None:
        base = Integrand.from_factors([moment], reference_value=2)
        g = apply_chain(TransformChain((Transform1D.de_exp(),)), base)
        h = mpmath.mpf(1) / 16
        estimate = evaluate_box(g, [h], [120]).estimate
        self.assertLess(abs(estimate - 2), mpmath.mpf("1e-30"))

    def test_chain_serialization(self) -> None:
        chain = TransformChain(
            (Transform1D.de_exp(), Transform1D.ooura_fourier(mp.pi / 10))
        )
        payload = chain.to_dict()
        self.assertEqual(payload["transforms"][0], {"kind": "de_exp"})
        self.assertEqual(payload["transforms"][1]["kind"], "ooura_fourier")
        self.assertEqual(set(payload["transforms"][1]), {"kind", "M", "alpha", "beta"})


if __name__ == "__main__":
    unittest.main()
