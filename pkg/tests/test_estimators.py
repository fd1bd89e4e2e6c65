import math
import os
import pathlib
import sys
import unittest

import numpy as np

# Ensure src/ is on path for direct test execution
ROOT = pathlib.Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from lmcucb.core.errors import ConfigError, NotPerfectPower
from lmcucb.core.geometry import integer_root
from lmcucb.core.integrand import Integrand, get_integrand
from lmcucb.core.rng import RngSpec
from lmcucb.estimators import (
    LeftoverPolicy,
    LmcUcbConfig,
    crude_mc,
    lmc_ucb,
    sbar,
    uniform_stratified,
)

SLOW = os.environ.get("LMCUCB_SLOW", "").strip() in {"1", "true", "yes"}


def _check_ledger(case: unittest.TestCase, report, cfg: LmcUcbConfig, d: int) -> None:
    case.assertEqual(report.samples_used, report.init_count + report.main_count + report.leftover_count)
    case.assertLessEqual(report.samples_used, cfg.n)
    case.assertEqual(int(report.points_drawn.sum()), report.samples_used)
    counts = report.counts
    case.assertEqual(counts.size, cfg.K)
    case.assertTrue(np.all(counts >= report.sbar))
    for count in counts:
        root = integer_root(int(count), d)
        case.assertEqual(root**d, int(count))
    if cfg.leftover_policy is LeftoverPolicy.DISCARD:
        case.assertEqual(report.leftover_count, 0)
    else:
        case.assertEqual(report.samples_used, cfg.n)


def _tenth(d: int) -> Integrand:
    return Integrand(
        name="tenth",
        d=d,
        fn=lambda x: np.full(x.shape[0], 0.1),
        exact_integral=0.1,
        grad_bound=0.0,
    )


class BaselineTest(unittest.TestCase):
    def test_crude_ledger_and_determinism(self):
        f = get_integrand("quadratic1d")
        a = crude_mc(f, 250, RngSpec(seed=3))
        b = crude_mc(f, 250, RngSpec(seed=3))
        self.assertEqual(a.estimate, b.estimate)
        self.assertEqual(a.samples_used, 250)
        self.assertEqual(a.main_count, 250)
        self.assertNotEqual(a.estimate, crude_mc(f, 250, RngSpec(seed=3, stream=1)).estimate)

    def test_uniform_needs_perfect_power(self):
        f = get_integrand("product2d")
        with self.assertRaises(NotPerfectPower):
            uniform_stratified(f, 10, RngSpec(seed=0))
        report = uniform_stratified(f, 16, RngSpec(seed=0))
        self.assertEqual(report.samples_used, 16)

    def test_uniform_is_exact_on_linear(self):
        # one point per cell: error of x is the mean of the cell jitters
        f = get_integrand("linear1d")
        report = uniform_stratified(f, 10_000, RngSpec(seed=11))
        self.assertAlmostEqual(report.estimate, 0.5, delta=5.0 / 10_000)

    def test_invalid_budget(self):
        f = get_integrand("linear1d")
        with self.assertRaises(ConfigError):
            crude_mc(f, 0, RngSpec(seed=0))
        with self.assertRaises(ConfigError):
            uniform_stratified(f, 0, RngSpec(seed=0))


class ConstantIntegrandTest(unittest.TestCase):
    def test_every_estimator_is_exact(self):
        f = get_integrand("constant1d")
        spec = RngSpec(seed=5)
        self.assertEqual(crude_mc(f, 100, spec).estimate, 1.5)
        self.assertEqual(uniform_stratified(f, 100, spec).estimate, 1.5)
        for policy in LeftoverPolicy:
            cfg = LmcUcbConfig(K=10, n=1000, L=0.0, leftover_policy=policy)
            self.assertEqual(lmc_ucb(f, cfg, spec).estimate, 1.5)

    def test_inexact_binary_constant_is_returned_bit_for_bit(self):
        f = _tenth(1)
        spec = RngSpec(seed=8)
        for n in (1, 3, 7, 100, 1000):
            self.assertEqual(crude_mc(f, n, spec).estimate, 0.1)
            self.assertEqual(uniform_stratified(f, n, spec).estimate, 0.1)
        for K, n in ((3, 12), (7, 100), (10, 1000)):
            for policy in LeftoverPolicy:
                cfg = LmcUcbConfig(K=K, n=n, L=0.0, leftover_policy=policy)
                report = lmc_ucb(f, cfg, spec)
                self.assertEqual(report.estimate, 0.1)
                np.testing.assert_array_equal(report.sigma_hat, np.zeros(K))

    def test_inexact_binary_constant_in_two_dimensions(self):
        f = _tenth(2)
        spec = RngSpec(seed=4)
        self.assertEqual(uniform_stratified(f, 400, spec).estimate, 0.1)
        for policy in LeftoverPolicy:
            cfg = LmcUcbConfig(K=4, n=401, L=0.0, leftover_policy=policy)
            report = lmc_ucb(f, cfg, spec)
            self.assertEqual(report.estimate, 0.1)
            np.testing.assert_array_equal(report.sigma_hat, np.zeros(4))

    def test_flat_strata_get_uniform_quotas(self):
        f = get_integrand("constant1d")
        cfg = LmcUcbConfig(K=4, n=400, L=0.0)
        report = lmc_ucb(f, cfg, RngSpec(seed=1))
        np.testing.assert_array_equal(report.sigma_hat, np.zeros(4))
        self.assertEqual(len(set(int(c) for c in report.counts)), 1)


class LmcUcbTest(unittest.TestCase):
    def test_deterministic_per_spec(self):
        f = get_integrand("oscillator1d")
        cfg = LmcUcbConfig(K=10, n=2000, L=f.grad_bound)
        a = lmc_ucb(f, cfg, RngSpec(seed=42, stream=7))
        b = lmc_ucb(f, cfg, RngSpec(seed=42, stream=7))
        self.assertEqual(a.estimate, b.estimate)
        np.testing.assert_array_equal(a.counts, b.counts)
        np.testing.assert_array_equal(a.sigma_hat, b.sigma_hat)
        c = lmc_ucb(f, cfg, RngSpec(seed=42, stream=8))
        self.assertNotEqual(a.estimate, c.estimate)

    def test_single_stratum_spends_everything(self):
        f = get_integrand("linear1d")
        cfg = LmcUcbConfig(K=1, n=100, L=1.0)
        report = lmc_ucb(f, cfg, RngSpec(seed=0))
        self.assertEqual(report.sbar, 10)
        np.testing.assert_array_equal(report.counts, [90])
        self.assertEqual(report.init_count, 10)
        self.assertEqual(report.main_count, 90)
        self.assertEqual(report.samples_used, 100)
        _check_ledger(self, report, cfg, 1)

    def test_two_dimensional_run(self):
        f = get_integrand("product2d")
        cfg = LmcUcbConfig(K=4, n=2000, L=f.grad_bound)
        report = lmc_ucb(f, cfg, RngSpec(seed=9))
        self.assertEqual(report.sbar, sbar(2000, 4, 2))
        _check_ledger(self, report, cfg, 2)
        self.assertLess(abs(report.estimate - f.exact_integral), 0.05)

    def test_rejects_non_square_K_in_two_dimensions(self):
        f = get_integrand("product2d")
        with self.assertRaises(NotPerfectPower):
            lmc_ucb(f, LmcUcbConfig(K=10, n=1000, L=1.0), RngSpec(seed=0))

    def test_uniform_refill_spends_the_whole_budget(self):
        f = get_integrand("piecewise1d")
        cfg = LmcUcbConfig(K=4, n=997, L=f.grad_bound, leftover_policy="uniform_refill")
        report = lmc_ucb(f, cfg, RngSpec(seed=21))
        _check_ledger(self, report, cfg, 1)
        discard = lmc_ucb(f, LmcUcbConfig(K=4, n=997, L=f.grad_bound), RngSpec(seed=21))
        # refill only adds points on top of the same allocation
        np.testing.assert_array_equal(report.counts, discard.counts)
        self.assertEqual(report.leftover_count, 997 - discard.samples_used)

    def test_reuses_initial_points_when_count_equals_sbar(self):
        # flat on the first half, so A = 0 leaves that stratum at sbar
        f = Integrand(name="half_ramp", d=1, fn=lambda x: np.where(x[:, 0] < 0.5, 0.0, x[:, 0]))
        cfg = LmcUcbConfig(K=2, n=104, A_override=0.0)
        report = lmc_ucb(f, cfg, RngSpec(seed=2))
        self.assertEqual(int(report.counts[0]), report.sbar)
        self.assertEqual(report.main_count, int(report.counts[1]))
        kept = report.counts == report.sbar
        np.testing.assert_array_equal(report.points_drawn[kept], report.sbar)
        _check_ledger(self, report, cfg, 1)

    def test_oscillating_stratum_gets_more_sub_strata(self):
        # sbar = 3 points per stratum leave sigma_hat noisy; measured rate is 0.939
        f = get_integrand("oscillator1d")
        cfg = LmcUcbConfig(K=10, n=100, A_override=10.0)
        first, second = [], []
        for stream in range(1000):
            report = lmc_ucb(f, cfg, RngSpec(seed=0, stream=stream))
            self.assertEqual(report.sbar, 3)
            first.append(int(report.counts[0]))
            second.append(int(report.counts[1]))
        first, second = np.array(first), np.array(second)
        self.assertGreater(first.mean(), second.mean())
        self.assertGreaterEqual(float(np.mean(first > second)), 0.92)


class RandomConfigurationTest(unittest.TestCase):
    """Ledger invariants over many random (function, K, n, policy) draws."""

    def test_ledger_invariants(self):
        trials = 10_000 if SLOW else 200
        gen = np.random.default_rng(2024)
        names_1d = ["constant1d", "linear1d", "quadratic1d", "oscillator1d", "piecewise1d"]
        for trial in range(trials):
            if gen.random() < 0.25:
                f = get_integrand("product2d")
                K = int(gen.integers(1, 5)) ** 2
                n = 8 * K + int(gen.integers(0, 3000))
            else:
                f = get_integrand(names_1d[int(gen.integers(len(names_1d)))])
                K = int(gen.integers(1, 40))
                n = 4 * K + int(gen.integers(0, 3000))
            policy = LeftoverPolicy.UNIFORM_REFILL if gen.random() < 0.5 else LeftoverPolicy.DISCARD
            cfg = LmcUcbConfig(
                K=K,
                n=n,
                L=f.grad_bound,
                delta=float(gen.uniform(0.01, 0.5)),
                leftover_policy=policy,
            )
            with self.subTest(trial=trial, fn=f.name, K=K, n=n):
                report = lmc_ucb(f, cfg, RngSpec(seed=trial))
                _check_ledger(self, report, cfg, f.d)
                self.assertTrue(math.isfinite(report.estimate))


class UnbiasednessTest(unittest.TestCase):
    def _mean_and_stderr(self, estimates):
        arr = np.asarray(estimates)
        return float(arr.mean()), float(arr.std(ddof=1)) / math.sqrt(arr.size)

    def test_estimators_centre_on_the_integral(self):
        reps = 20_000 if SLOW else 1_000
        f = get_integrand("quadratic1d")
        lmc_cfg = LmcUcbConfig(K=4, n=100, L=f.grad_bound)
        runs = {
            "crude": lambda spec: crude_mc(f, 100, spec),
            "uniform": lambda spec: uniform_stratified(f, 100, spec),
            "lmcucb": lambda spec: lmc_ucb(f, lmc_cfg, spec),
        }
        for name, run in runs.items():
            with self.subTest(estimator=name):
                mean, stderr = self._mean_and_stderr(
                    [run(RngSpec(seed=77, stream=r)).estimate for r in range(reps)]
                )
                self.assertLess(abs(mean - f.exact_integral), 4.0 * stderr + 1e-12)


if __name__ == "__main__":
    unittest.main()
