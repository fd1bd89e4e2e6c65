import pathlib
import sys
import unittest

import numpy as np

# Ensure src/ is on path for direct test execution
ROOT = pathlib.Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from lmcucb.core.errors import ConfigError, IndexOutOfRange, NotPerfectPower
from lmcucb.core.geometry import (
    SubStratification,
    exact_root,
    integer_root,
    is_perfect_power,
    locate,
    make_partition,
    stratum_box,
    substratum_box,
    default_strata,
)


class IntegerRootTest(unittest.TestCase):
    def test_exact_cubes_do_not_misround(self):
        self.assertEqual(integer_root(27, 3), 3)
        self.assertEqual(integer_root(26, 3), 2)
        self.assertEqual(integer_root(64, 3), 4)
        self.assertEqual(integer_root(10**18, 2), 10**9)
        self.assertEqual(integer_root(10**18 - 1, 2), 10**9 - 1)
        self.assertEqual(integer_root(3**60, 20), 27)

    def test_perfect_power_checks(self):
        self.assertTrue(is_perfect_power(64, 6))
        self.assertFalse(is_perfect_power(10, 2))
        self.assertFalse(is_perfect_power(0, 1))
        self.assertEqual(exact_root(64, 3), 4)
        with self.assertRaises(NotPerfectPower) as ctx:
            exact_root(10, 2)
        self.assertIn("10 is not a perfect 2-th power", str(ctx.exception))

    def test_default_strata(self):
        self.assertEqual(default_strata(100, 1), 10)
        self.assertEqual(default_strata(1000, 1), 31)
        self.assertEqual(default_strata(10_000, 2), 100)
        self.assertEqual(default_strata(400, 2), 16)
        self.assertEqual(default_strata(1, 3), 1)

    def test_rejects_bad_arguments(self):
        with self.assertRaises(ConfigError):
            integer_root(-1, 2)
        with self.assertRaises(ConfigError):
            integer_root(4, 0)


class PartitionTest(unittest.TestCase):
    def test_make_partition(self):
        p = make_partition(1, 10)
        self.assertEqual(p.cells_per_axis, 10)
        self.assertEqual(p.K, 10)
        p2 = make_partition(2, 16)
        self.assertEqual(p2.cells_per_axis, 4)
        self.assertAlmostEqual(p2.weight, 1.0 / 16)
        with self.assertRaises(NotPerfectPower):
            make_partition(2, 10)

    def test_stratum_boxes(self):
        p = make_partition(1, 10)
        self.assertEqual(stratum_box(p, 0).lower, (0.0,))
        self.assertAlmostEqual(stratum_box(p, 0).upper[0], 0.1)
        self.assertAlmostEqual(stratum_box(p, 9).lower[0], 0.9)
        self.assertEqual(stratum_box(p, 9).upper, (1.0,))
        box = stratum_box(make_partition(2, 4), 3)
        self.assertEqual(box.lower, (0.5, 0.5))
        self.assertEqual(box.upper, (1.0, 1.0))
        with self.assertRaises(IndexOutOfRange):
            stratum_box(p, 10)

    def test_row_major_order(self):
        p = make_partition(2, 9)
        self.assertEqual(p.coordinates(1), (0, 1))
        self.assertEqual(p.coordinates(3), (1, 0))
        self.assertEqual(stratum_box(p, 1).lower, (0.0, 1.0 / 3))

    def test_strata_cover_the_cube(self):
        p = make_partition(2, 16)
        total = sum(stratum_box(p, k).measure for k in range(p.K))
        self.assertAlmostEqual(total, 1.0, places=12)

    def test_partition_locate_ties_go_low(self):
        p = make_partition(1, 2)
        np.testing.assert_array_equal(p.locate(np.array([[0.0], [0.5], [0.5000001], [1.0]])), [0, 0, 1, 1])


class SubStratificationTest(unittest.TestCase):
    def test_substratum_boxes(self):
        s = SubStratification.uniform(make_partition(1, 1), 4)
        box = substratum_box(s, 0, 2)
        self.assertEqual((box.lower, box.upper), ((0.5,), (0.75,)))

        s = SubStratification(parent=make_partition(1, 4), counts=(1, 2, 1, 1))
        box = substratum_box(s, 1, 0)
        self.assertEqual((box.lower, box.upper), ((0.25,), (0.375,)))

        s = SubStratification.uniform(make_partition(2, 1), 4)
        box = substratum_box(s, 0, 0)
        self.assertEqual((box.lower, box.upper), ((0.0, 0.0), (0.5, 0.5)))
        self.assertAlmostEqual(box.measure, 0.25)

    def test_counts_must_be_perfect_powers(self):
        with self.assertRaises(NotPerfectPower):
            SubStratification(parent=make_partition(2, 4), counts=(1, 4, 9, 10))
        with self.assertRaises(ConfigError):
            SubStratification(parent=make_partition(2, 4), counts=(1, 4))

    def test_index_out_of_range(self):
        s = SubStratification.uniform(make_partition(1, 2), 3)
        with self.assertRaises(IndexOutOfRange):
            substratum_box(s, 0, 3)
        with self.assertRaises(IndexOutOfRange):
            substratum_box(s, 2, 0)

    def test_tiling_measure(self):
        s = SubStratification(parent=make_partition(2, 9), counts=(1, 4, 9, 16, 25, 36, 49, 64, 81))
        self.assertAlmostEqual(s.total_measure(), 1.0, delta=1e-12)
        s = SubStratification(parent=make_partition(1, 7), counts=(3, 5, 7, 11, 13, 17, 19))
        self.assertAlmostEqual(s.total_measure(), 1.0, delta=1e-12)

    def test_point_location_is_consistent_with_boxes(self):
        rng = np.random.default_rng(1234)
        s = SubStratification(parent=make_partition(2, 4), counts=(1, 4, 9, 16))
        x = rng.random((100_000, 2))
        k, i = locate(s, x)
        self.assertTrue(np.all((k >= 0) & (k < 4)))
        for stratum in range(4):
            mask = k == stratum
            corners, side = s.cell_lower_corners(stratum)
            self.assertTrue(np.all(i[mask] < s.counts[stratum]))
            lower = corners[i[mask]]
            self.assertTrue(np.all(x[mask] >= lower - 1e-12))
            self.assertTrue(np.all(x[mask] <= lower + side + 1e-12))

    def test_point_location_checked_against_boxes(self):
        rng = np.random.default_rng(99)
        s = SubStratification(parent=make_partition(1, 3), counts=(2, 5, 3))
        x = rng.random((2000, 1))
        k, i = s.locate(x)
        for point, kk, ii in zip(x, k, i):
            self.assertTrue(substratum_box(s, int(kk), int(ii)).contains(point))

    def test_center_round_trip(self):
        s = SubStratification(parent=make_partition(2, 4), counts=(4, 1, 9, 16))
        for kk, count in enumerate(s.counts):
            for ii in range(count):
                k, i = s.locate(substratum_box(s, kk, ii).center)
                self.assertEqual((int(k[0]), int(i[0])), (kk, ii))

    def test_boundary_ties(self):
        s = SubStratification.uniform(make_partition(1, 2), 2)
        k, i = s.locate(np.array([[0.0], [0.25], [0.5], [1.0]]))
        np.testing.assert_array_equal(k, [0, 0, 0, 1])
        np.testing.assert_array_equal(i, [0, 0, 1, 1])


if __name__ == "__main__":
    unittest.main()
