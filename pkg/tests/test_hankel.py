"""
Test module for Hankel minors and the all-minors sweep
"""

import random
import unittest
from fractions import Fraction
from unittest.mock import patch
import sys
import os

sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

from tests import RUN_SLOW
from src import hankel
from src.hankel import (
    DESK_TABLE,
    VERDICT_FAIL,
    VERDICT_INCOMPLETE,
    VERDICT_PASS,
    HankelSpec,
    MinorEngine,
    PolyMatrix,
    SweepOptions,
    bareiss_determinant,
    build_hankel,
    minor_determinant,
    numeric_prescreen,
    verify_all_minors,
)
from src.laguerre import LaguerreCache, MultiIndex, explicit_laguerre
from src.polyring import Polynomial


def random_polynomial(rng, num_vars, max_degree=2, max_terms=3):
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        exponents = [0] * num_vars
        for _ in range(rng.randint(0, max_degree)):
            exponents[rng.randrange(num_vars)] += 1
        terms[tuple(exponents)] = rng.randint(-5, 5)
    return Polynomial(terms, num_vars)


class TestHankelSpec(unittest.TestCase):
    """Test cases for HankelSpec validation"""

    def test_defaults_to_full_order(self):
        """Test that max_minor_order defaults to N"""
        spec = HankelSpec(MultiIndex.of(1), 4)
        self.assertEqual(spec.max_minor_order, 4)
        self.assertEqual(spec.to_dict(), {"r": 1, "k": [1], "N": 4, "max_minor_order": 4})

    def test_invalid_specs(self):
        """Test rejection of zero direction, empty size and large orders"""
        with self.assertRaises(ValueError):
            HankelSpec(MultiIndex.of(0, 0), 3)
        with self.assertRaises(ValueError):
            HankelSpec(MultiIndex.of(1), 0)
        with self.assertRaises(ValueError):
            HankelSpec(MultiIndex.of(1), 3, 4)


class TestDeterminants(unittest.TestCase):
    """Test cases for the memoized Laplace engine and the Bareiss oracle"""

    def setUp(self):
        """Set up test fixtures"""
        self.matrix = build_hankel(HankelSpec(MultiIndex.of(1), 3))

    def test_build_hankel(self):
        """Test entry (i, j) = L_((i+j)k)"""
        self.assertTrue(self.matrix.is_hankel())
        self.assertEqual(self.matrix[1, 2], explicit_laguerre(MultiIndex.of(3)))
        self.assertEqual(self.matrix[0, 0], Polynomial.one(2))

    def test_leading_two_by_two(self):
        """Test the leading 2 x 2 minor 2x + b1"""
        minor = minor_determinant(self.matrix, [0, 1], [0, 1])
        self.assertEqual(minor, Polynomial.from_text("2*x + b1", 2))

    def test_minor_argument_checks(self):
        """Test shape, repetition and range checks"""
        with self.assertRaises(ValueError):
            minor_determinant(self.matrix, [0, 1], [0])
        with self.assertRaises(ValueError):
            minor_determinant(self.matrix, [0, 0], [0, 1])
        with self.assertRaises(ValueError):
            minor_determinant(self.matrix, [0, 3], [0, 1])

    def test_shared_memo(self):
        """Test that one memo serves several minors"""
        memo = {}
        minor_determinant(self.matrix, [0, 1, 2], [0, 1, 2], memo)
        size_after_full = len(memo)
        minor_determinant(self.matrix, [0, 1], [0, 1], memo)
        self.assertEqual(len(memo), size_after_full)

    def test_rational_entries(self):
        """Test the engine over Fractions"""
        matrix = PolyMatrix([[Fraction(1, 2), Fraction(1)], [Fraction(3), Fraction(4)]])
        engine = MinorEngine(matrix)
        self.assertEqual(engine.determinant(0b11, 0b11), Fraction(-1))
        self.assertEqual(bareiss_determinant(matrix), Fraction(-1))

    def test_bareiss_needs_pivoting(self):
        """Test a matrix with a zero leading entry"""
        matrix = PolyMatrix([[Fraction(0), Fraction(2)], [Fraction(3), Fraction(1)]])
        self.assertEqual(bareiss_determinant(matrix), Fraction(-6))

    def test_oracles_agree_on_random_matrices(self):
        """Test Laplace and Bareiss on 100 random polynomial matrices"""
        rng = random.Random(20240611)
        for trial in range(100):
            size = 3 if trial % 2 == 0 else 4
            matrix = PolyMatrix([
                [random_polynomial(rng, 2) for _ in range(size)] for _ in range(size)
            ])
            everything = list(range(size))
            self.assertEqual(
                minor_determinant(matrix, everything, everything),
                bareiss_determinant(matrix),
                f"trial {trial}",
            )

    def test_oracles_agree_on_hankel(self):
        """Test Laplace and Bareiss on a Laguerre Hankel matrix"""
        matrix = build_hankel(HankelSpec(MultiIndex.of(1, 1), 3))
        self.assertEqual(minor_determinant(matrix, [0, 1, 2], [0, 1, 2]), bareiss_determinant(matrix))


class TestVerifyAllMinors(unittest.TestCase):
    """Test cases for the all-minors sweep"""

    def setUp(self):
        """Set up test fixtures"""
        self.cache = LaguerreCache()

    def test_single_entry(self):
        """Test that N = 1 checks exactly one minor"""
        report = verify_all_minors(HankelSpec(MultiIndex.of(1), 1))
        self.assertEqual(report.verdict, VERDICT_PASS)
        self.assertEqual(report.minors_checked, {1: 1})
        self.assertTrue(report.passed)

    def test_minor_counts(self):
        """Test C(N, m)^2 minors per order"""
        report = verify_all_minors(HankelSpec(MultiIndex.of(1), 4), SweepOptions(cache=self.cache))
        self.assertEqual(report.minors_checked, {1: 16, 2: 36, 3: 16, 4: 1})
        self.assertEqual(report.verdict, VERDICT_PASS)
        self.assertEqual(report.failures, [])

    def test_r1_five_by_five(self):
        """Test coefficientwise nonnegativity for r = 1, N = 5"""
        report = verify_all_minors(HankelSpec(MultiIndex.of(1), 5), SweepOptions(check_symmetry=True))
        self.assertEqual(report.verdict, VERDICT_PASS)

    def test_two_layers(self):
        """Test r = 2, k = (1,1), N = 3"""
        report = verify_all_minors(HankelSpec(MultiIndex.of(1, 1), 3))
        self.assertEqual(report.verdict, VERDICT_PASS)

    def test_max_minor_order(self):
        """Test that orders above max_minor_order are skipped"""
        report = verify_all_minors(HankelSpec(MultiIndex.of(1), 4, 2))
        self.assertEqual(sorted(report.minors_checked), [1, 2])
        self.assertEqual(report.verdict, VERDICT_PASS)

    def test_fault_injection(self):
        """Test that a negated entry is reported with a witness"""
        real_build = hankel.build_hankel

        def broken_build(spec, cache=None):
            matrix = real_build(spec, cache)
            return matrix.replace(0, 0, -matrix[0, 0])

        with patch('src.hankel.build_hankel', side_effect=broken_build):
            report = verify_all_minors(HankelSpec(MultiIndex.of(1), 3))

        self.assertEqual(report.verdict, VERDICT_FAIL)
        self.assertIn(((0,), (0,)), [(f.rows, f.cols) for f in report.failures])
        first = report.failures[0]
        self.assertLess(first.coefficient, 0)
        self.assertEqual(report.to_dict()["verdict"], "FAIL")

    def test_memory_budget_truncates(self):
        """Test that an exhausted budget yields INCOMPLETE"""
        report = verify_all_minors(
            HankelSpec(MultiIndex.of(1), 3),
            SweepOptions(memory_limit_mb=1e-6),
        )
        self.assertEqual(report.verdict, VERDICT_INCOMPLETE)
        self.assertEqual(report.orders_completed, 0)
        self.assertIn("memory", report.stop_reason)

    def test_time_budget_truncates(self):
        """Test that a zero time budget stops the sweep before the first order"""
        report = verify_all_minors(
            HankelSpec(MultiIndex.of(1), 3),
            SweepOptions(budget_seconds=0.0, cache=self.cache),
        )
        self.assertEqual(report.verdict, VERDICT_INCOMPLETE)
        self.assertEqual(report.orders_completed, 0)
        self.assertEqual(report.minors_checked, {})
        self.assertIn("time budget", report.stop_reason)

    def test_symmetry_break_is_a_failure(self):
        """Test that an asymmetric matrix is reported as FAIL, not raised"""
        real_build = hankel.build_hankel

        def skewed_build(spec, cache=None):
            matrix = real_build(spec, cache)
            return matrix.replace(0, 1, matrix[0, 1] + 1)

        with patch('src.hankel.build_hankel', side_effect=skewed_build):
            report = verify_all_minors(HankelSpec(MultiIndex.of(1), 2), SweepOptions(check_symmetry=True))

        self.assertEqual(report.failures, [])
        self.assertIn(((1,), (0,)), report.symmetry_breaks)
        self.assertEqual(report.verdict, VERDICT_FAIL)
        self.assertEqual(report.to_dict()["symmetry_breaks"][0], {"rows": [1], "cols": [0]})

    def test_workers_do_not_change_report(self):
        """Test determinism across worker counts"""
        spec = HankelSpec(MultiIndex.of(1), 4)
        serial = verify_all_minors(spec).to_dict()
        parallel = verify_all_minors(spec, SweepOptions(workers=2)).to_dict()
        serial.pop("wall_time_ms")
        parallel.pop("wall_time_ms")
        self.assertEqual(serial, parallel)

    @unittest.skipUnless(RUN_SLOW, "set MLL_RUN_SLOW=1 for the preset verification table")
    def test_preset_table(self):
        """Test every desk-scale preset"""
        options = SweepOptions(workers=os.cpu_count() or 1, cache=self.cache)
        for k, size in DESK_TABLE:
            report = verify_all_minors(HankelSpec(MultiIndex(k), size), options)
            self.assertEqual(report.verdict, VERDICT_PASS, f"k={k}, N={size}")


class TestNumericPrescreen(unittest.TestCase):
    """Test cases for the rational-point prescreen"""

    def setUp(self):
        """Set up test fixtures"""
        self.matrix = build_hankel(HankelSpec(MultiIndex.of(1), 3))

    def test_no_violation_on_laguerre_hankel(self):
        """Test that positive points give no candidates"""
        points = [(0, Fraction(1, 2)), (Fraction(7, 10), 1), (2, Fraction(23, 10))]
        self.assertEqual(numeric_prescreen(self.matrix, points), [])

    def test_detects_negative_minor(self):
        """Test that a negated entry is found"""
        broken = self.matrix.replace(0, 1, -self.matrix[0, 1])
        violations = numeric_prescreen(broken, [(1, 1)], max_minor_order=1)
        self.assertTrue(violations)
        self.assertEqual(violations[0].rows, (0,))

    def test_rejects_negative_points(self):
        """Test that evaluation points must be nonnegative"""
        with self.assertRaises(ValueError):
            numeric_prescreen(self.matrix, [(-1, 1)])


if __name__ == '__main__':
    unittest.main()
