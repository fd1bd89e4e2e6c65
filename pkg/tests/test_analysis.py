import math
import pathlib
import sys
import unittest

import numpy as np

# Ensure src/ is on path for direct test execution
ROOT = pathlib.Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from lmcucb.analysis import (
    QuadratureGrid,
    asymptotic_allocation,
    grad_norm_integral,
    optimal_proportions,
    oracle_risk,
    oracle_summary,
    pl_substratum_sigmas,
    pseudo_regret,
    pseudo_risk,
    quadrature_sigmas,
    sigma_K,
    sigma_big,
    stratum_sigma,
    stratum_sigmas,
    uniform_constant,
)
from lmcucb.core.errors import AllZeroVariation, ConfigError, MissingGradient, ShapeMismatch
from lmcucb.core.geometry import Box, HyperCubePartition, SubStratification, make_partition
from lmcucb.core.integrand import (
    DEFAULT_PIECEWISE,
    Integrand,
    PiecewiseLinearSpec,
    corpus,
    get_integrand,
    pl_sigma_k,
    random_piecewise_linear,
)
from lmcucb.estimators import TwoLayerPlan

UNIT_1D = Box(lower=(0.0,), upper=(1.0,))
UNIT_2D = Box(lower=(0.0, 0.0), upper=(1.0, 1.0))


class QuadratureGridTest(unittest.TestCase):
    def test_axis_rule_shape_and_weights(self):
        for rule in ("gauss_legendre", "midpoint"):
            with self.subTest(rule=rule):
                nodes, weights = QuadratureGrid(m=40, rule=rule).axis_rule(0.25, 0.75)
                self.assertEqual(nodes.size, 40)
                self.assertAlmostEqual(math.fsum(weights), 0.5, places=14)
                self.assertTrue(np.all((nodes > 0.25) & (nodes < 0.75)))

    def test_gauss_legendre_panels_are_exact_on_polynomials(self):
        grid = QuadratureGrid(m=16)
        value = grid.integrate(lambda x: x[:, 0] ** 15, UNIT_1D)
        self.assertAlmostEqual(value, 1.0 / 16.0, places=14)

    def test_midpoint_rule(self):
        grid = QuadratureGrid(m=1000, rule="midpoint")
        self.assertAlmostEqual(grid.integrate(lambda x: x[:, 0], UNIT_1D), 0.5, places=14)
        self.assertAlmostEqual(grid.integrate(lambda x: x[:, 0] ** 2, UNIT_1D), 1.0 / 3.0, places=6)

    def test_panels_break_at_split_points(self):
        step = lambda x: (x[:, 0] > 0.3).astype(float)
        grid = QuadratureGrid(m=64)
        self.assertAlmostEqual(grid.integrate(step, UNIT_1D, breakpoints=(0.3,)), 0.7, places=14)
        split = QuadratureGrid(m=64, split_points=(0.3,))
        self.assertAlmostEqual(split.integrate(step, UNIT_1D), 0.7, places=14)

    def test_tiled_two_dimensional_integral(self):
        f = get_integrand("product2d")
        # 512**2 nodes span several evaluation tiles
        value = QuadratureGrid(m=512).integrate(f.fn, UNIT_2D)
        self.assertAlmostEqual(value, f.exact_integral, places=12)

    def test_validation(self):
        with self.assertRaises(ConfigError):
            QuadratureGrid(m=0)
        with self.assertRaises(ConfigError):
            QuadratureGrid(m=8, rule="simpson")
        with self.assertRaises(ConfigError):
            QuadratureGrid(m=8, split_points=(1.0,))
        with self.assertRaises(ConfigError):
            QuadratureGrid(m=2, split_points=(0.25, 0.5, 0.75)).axis_rule(0.0, 1.0)

    def test_refined(self):
        grid = QuadratureGrid(m=32, split_points=(0.5, 0.5))
        self.assertEqual(grid.split_points, (0.5,))
        self.assertEqual(grid.refined().m, 64)
        self.assertEqual(grid.refined(3).split_points, (0.5,))


class OracleConstantTest(unittest.TestCase):
    def test_linear_constants(self):
        f = get_integrand("linear1d")
        grid = QuadratureGrid(m=256)
        self.assertAlmostEqual(sigma_big(f, grid), 1.0 / 12.0, places=13)
        self.assertAlmostEqual(uniform_constant(f, grid), 1.0 / 12.0, places=13)

    def test_quadratic_constants(self):
        f = get_integrand("quadratic1d")
        grid = QuadratureGrid(m=4096)
        np.testing.assert_allclose(uniform_constant(f, grid), 1.0 / 9.0, rtol=1e-12)
        # int sqrt(2x) dx = 2 sqrt(2) / 3
        np.testing.assert_allclose(sigma_big(f, grid), 16.0 / 243.0, rtol=1e-6)

    def test_product_uniform_constant(self):
        f = get_integrand("product2d")
        np.testing.assert_allclose(uniform_constant(f, QuadratureGrid(m=64)), math.pi**2 / 24.0, rtol=1e-10)

    def test_grid_refinement_is_stable(self):
        for name in ("linear1d", "quadratic1d"):
            with self.subTest(fn=name):
                f = get_integrand(name)
                coarse = QuadratureGrid(m=4096)
                fine = coarse.refined()
                np.testing.assert_allclose(sigma_big(f, coarse), sigma_big(f, fine), rtol=1e-6)
                np.testing.assert_allclose(
                    uniform_constant(f, coarse), uniform_constant(f, fine), rtol=1e-10
                )

    def test_sigma_never_exceeds_uniform_constant(self):
        for name, f in corpus().items():
            if not f.has_gradient:
                continue
            with self.subTest(fn=name):
                grid = QuadratureGrid(m=4096 if f.d == 1 else 256)
                sigma = sigma_big(f, grid)
                # equality holds for constant gradient norm
                self.assertLessEqual(sigma, uniform_constant(f, grid) * (1.0 + 1e-12))

    def test_oscillator_constants_are_finite(self):
        f = get_integrand("oscillator1d")
        grid = QuadratureGrid(m=4096)
        sigma = sigma_big(f, grid)
        self.assertTrue(math.isfinite(sigma) and sigma > 0.0)
        self.assertGreater(uniform_constant(f, grid), 0.0)

    def test_gradient_requirements(self):
        f = Integrand(name="no_grad", d=1, fn=lambda x: x[:, 0] ** 3)
        grid = QuadratureGrid(m=64)
        with self.assertRaises(MissingGradient):
            sigma_big(f, grid)
        np.testing.assert_allclose(uniform_constant(f, grid, fd_fallback=True), 9.0 / 5.0 / 12.0, rtol=1e-6)
        with self.assertRaises(ConfigError):
            grad_norm_integral(get_integrand("linear1d"), 0.0, grid)

    def test_asymptotic_allocation_is_flat_for_linear(self):
        f = get_integrand("linear1d")
        density = asymptotic_allocation(f, np.linspace(0.0, 1.0, 11)[:, None], QuadratureGrid(m=64))
        np.testing.assert_allclose(density, np.ones(11), rtol=1e-12)
        with self.assertRaises(AllZeroVariation):
            asymptotic_allocation(get_integrand("constant1d"), [[0.5]], QuadratureGrid(m=64))


class StratumSigmaTest(unittest.TestCase):
    def test_linear_stratum(self):
        f = get_integrand("linear1d")
        grid = QuadratureGrid(m=64)
        box = Box(lower=(0.25,), upper=(0.5,))
        self.assertAlmostEqual(stratum_sigma(f, box, grid), 0.25 / math.sqrt(12.0), places=13)
        with self.assertRaises(ConfigError):
            stratum_sigma(f, box, QuadratureGrid(m=16))

    def test_matches_piecewise_closed_form(self):
        f = get_integrand("piecewise1d")
        sigmas = stratum_sigmas(f, DEFAULT_PIECEWISE.partition, QuadratureGrid(m=64))
        expected = [pl_sigma_k(DEFAULT_PIECEWISE, k) for k in range(DEFAULT_PIECEWISE.K)]
        np.testing.assert_allclose(sigmas, expected, rtol=1e-10)

    def test_substratum_sigmas_match_closed_form(self):
        spec = random_piecewise_linear(2, 16, np.random.default_rng(5))
        f = Integrand(name="pl2d", d=2, fn=spec.eval, grad_fn=spec.gradient, breakpoints=(0.25, 0.5, 0.75))
        counts = (1, 4, 9, 16) * 4
        sub = SubStratification(parent=spec.partition, counts=counts)
        numeric = quadrature_sigmas(f, sub, QuadratureGrid(m=32))
        closed = pl_substratum_sigmas(spec, counts)
        for k, values in enumerate(numeric):
            self.assertEqual(values.size, counts[k])
            np.testing.assert_allclose(values, closed[k], rtol=1e-9)

    def test_pl_substratum_validation(self):
        with self.assertRaises(ShapeMismatch):
            pl_substratum_sigmas(DEFAULT_PIECEWISE, [1, 2])
        with self.assertRaises(ConfigError):
            pl_substratum_sigmas(DEFAULT_PIECEWISE, [1, 0, 1, 1])


class OracleAllocationTest(unittest.TestCase):
    def test_optimal_proportions(self):
        np.testing.assert_allclose(optimal_proportions([1.0, 4.0], [0.5, 0.5], 1), [1 / 3, 2 / 3])
        np.testing.assert_allclose(optimal_proportions([1.0, 16.0], [0.5, 0.5], 1), [0.2, 0.8])
        lam = optimal_proportions([0.0, 1.0, 2.0, 3.0], [0.25] * 4, 2)
        self.assertAlmostEqual(math.fsum(lam), 1.0, places=14)
        self.assertEqual(lam[0], 0.0)

    def test_optimal_proportions_errors(self):
        with self.assertRaises(AllZeroVariation):
            optimal_proportions([0.0, 0.0], [0.5, 0.5], 1)
        with self.assertRaises(ShapeMismatch):
            optimal_proportions([1.0], [0.5, 0.5], 1)
        with self.assertRaises(ConfigError):
            optimal_proportions([-1.0, 1.0], [0.5, 0.5], 1)

    def test_proportions_ignore_common_scale(self):
        gen = np.random.default_rng(17)
        for d in (1, 2, 3):
            sigma = gen.uniform(0.0, 3.0, size=9)
            w = gen.uniform(0.5, 1.5, size=9)
            w /= w.sum()
            base = optimal_proportions(sigma, w, d)
            for factor in (1e-3, 0.37, 7.5, 1e4):
                with self.subTest(d=d, factor=factor):
                    np.testing.assert_allclose(optimal_proportions(sigma * factor, w, d), base, rtol=0, atol=1e-12)

    def test_sigma_K(self):
        self.assertAlmostEqual(sigma_K([1.0, 4.0], [0.5, 0.5], 1), math.sqrt(0.5) + math.sqrt(2.0))

    def test_oracle_risk_single_stratum(self):
        risk, counts = oracle_risk([1.0], [1.0], 100, 1)
        self.assertAlmostEqual(risk, 1e-6, places=18)
        np.testing.assert_allclose(counts, [100.0])

    def test_oracle_risk_flat_strata(self):
        risk, counts = oracle_risk([0.0] * 4, [0.25] * 4, 100, 1)
        self.assertEqual(risk, 0.0)
        np.testing.assert_allclose(counts, [25.0] * 4)

    def test_pseudo_regret(self):
        self.assertAlmostEqual(pseudo_regret(2e-6, 1.0, 100, 1), 1e-6, places=18)


class PseudoRiskTest(unittest.TestCase):
    def test_linear_four_sub_strata(self):
        spec = PiecewiseLinearSpec(
            partition=HyperCubePartition(d=1, cells_per_axis=1), slopes=[[1.0]], offsets=[0.0]
        )
        plan = TwoLayerPlan.relaxed([4], 1)
        homogeneous = pl_substratum_sigmas(spec, plan.counts)
        self.assertAlmostEqual(pseudo_risk(homogeneous, plan), 1.0 / 768.0, places=15)
        per_cell = [np.full(4, homogeneous[0])]
        self.assertAlmostEqual(pseudo_risk(per_cell, plan), 1.0 / 768.0, places=15)

    def test_shape_checks(self):
        plan = TwoLayerPlan.relaxed([4, 4], 1)
        with self.assertRaises(ShapeMismatch):
            pseudo_risk(np.array([0.1]), plan)
        with self.assertRaises(ShapeMismatch):
            pseudo_risk([np.ones(4), np.ones(3)], plan)

    def test_oracle_plan_attains_oracle_risk(self):
        # sub-strata of a linear piece share sigma_k * (1/S_k)**(1/d)
        for d, K, seed in ((1, 8, 1), (2, 16, 2), (3, 8, 3)):
            with self.subTest(d=d, K=K):
                spec = random_piecewise_linear(d, K, np.random.default_rng(seed))
                sigma = np.array([pl_sigma_k(spec, k) for k in range(spec.K)])
                w = spec.partition.weights()
                n = 10_000.0
                risk, counts = oracle_risk(sigma, w, n, d)
                plan = TwoLayerPlan.relaxed(counts, d)
                np.testing.assert_allclose(
                    pseudo_risk(pl_substratum_sigmas(spec, counts), plan), risk, rtol=1e-11
                )

    def test_oracle_plan_beats_random_plans(self):
        gen = np.random.default_rng(31)
        for d, K in ((1, 8), (2, 16), (3, 8)):
            spec = random_piecewise_linear(d, K, gen)
            sigma = np.array([pl_sigma_k(spec, k) for k in range(spec.K)])
            n = 5_000.0
            risk, _ = oracle_risk(sigma, spec.partition.weights(), n, d)
            for trial in range(100):
                with self.subTest(d=d, trial=trial):
                    shares = gen.random(spec.K) + 0.05
                    counts = n * shares / shares.sum()
                    plan = TwoLayerPlan.relaxed(counts, d)
                    other = pseudo_risk(pl_substratum_sigmas(spec, counts), plan)
                    self.assertLessEqual(risk, other * (1.0 + 1e-12))


class OracleSummaryTest(unittest.TestCase):
    def test_linear_summary(self):
        f = get_integrand("linear1d")
        summary = oracle_summary(f, 4, 100, QuadratureGrid(m=256))
        np.testing.assert_allclose(summary.stratum_sigmas, [0.25 / math.sqrt(12.0)] * 4, rtol=1e-12)
        np.testing.assert_allclose(summary.lam, [0.25] * 4)
        np.testing.assert_allclose(summary.oracle_counts, [25.0] * 4)
        self.assertAlmostEqual(summary.oracle_bound, (1.0 / 12.0) / 100.0**3, places=18)
        data = summary.to_mapping()
        for key in ("sigma", "sigma_K", "lambda", "uniform_constant", "oracle_risk", "oracle_bound"):
            self.assertIn(key, data)
        self.assertNotIn("substratum_sigmas", data)

    def test_flat_summary_falls_back_to_uniform_lambda(self):
        summary = oracle_summary(get_integrand("constant1d"), 5, 100, QuadratureGrid(m=64))
        np.testing.assert_allclose(summary.lam, [0.2] * 5)
        self.assertEqual(summary.sigma, 0.0)
        self.assertEqual(summary.oracle_risk, 0.0)

    def test_per_substratum(self):
        f = get_integrand("product2d")
        part = make_partition(2, 4)
        sub = SubStratification(parent=part, counts=(1, 4, 4, 9))
        summary = oracle_summary(f, 4, 400, QuadratureGrid(m=32), per_substratum=sub)
        self.assertEqual([a.size for a in summary.substratum_sigmas], [1, 4, 4, 9])
        self.assertEqual(len(summary.to_mapping()["substratum_sigmas"]), 4)
        with self.assertRaises(ShapeMismatch):
            oracle_summary(f, 16, 400, QuadratureGrid(m=32), per_substratum=sub)


if __name__ == "__main__":
    unittest.main()
