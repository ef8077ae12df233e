"""
Test module for the moment representation and multiple orthogonality
"""

import itertools
import math
import unittest
from fractions import Fraction
import sys
import os

import numpy as np
from scipy import special

sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

from tests import RUN_SLOW
from src.laguerre import LaguerreCache, MultiIndex, explicit_laguerre
from src.polyring import eval_exact
from src.stieltjes import (
    ConvergenceError,
    HyperParams,
    ParameterError,
    bessel_moment_r1,
    check_moment,
    check_orthogonality,
    directional_moments,
    gauss_gen_laguerre,
    hyper_0Fr,
    hyper_0Fr_array,
    moment_integral,
    moment_integral_boundary_r1,
    moment_summands,
    orthogonality_scale,
    relative_error,
)

ALPHAS = (-0.5, 0.0, 1.3)
POINTS = (0.0, 0.7, 2.0)


class TestHypergeometric(unittest.TestCase):
    """Test cases for the 0F_r series"""

    def test_matches_scipy_0f1(self):
        """Test 0F1 against scipy.special.hyp0f1"""
        for b in (0.5, 1.0, 2.3):
            for z in (0.0, 0.4, 3.0, 50.0):
                value = hyper_0Fr(HyperParams((b,), z))
                self.assertAlmostEqual(value / special.hyp0f1(b, z), 1.0, places=12)

    def test_0f1_through_bessel(self):
        """Test 0F1(; 2; z) = I_1(2 sqrt z) / sqrt z"""
        z = 3.0
        expected = special.iv(1, 2 * math.sqrt(z)) / math.sqrt(z)
        self.assertAlmostEqual(hyper_0Fr(HyperParams((2.0,), z)) / expected, 1.0, places=12)

    def test_0f2_value_at_zero(self):
        """Test that every 0F_r equals 1 at z = 0"""
        self.assertEqual(hyper_0Fr(HyperParams((0.5, 2.3), 0.0)), 1.0)

    def test_vectorized(self):
        """Test that the array form agrees elementwise"""
        z = np.array([0.0, 1.0, 10.0])
        values = hyper_0Fr_array([1.5], z)
        for zi, vi in zip(z, values):
            self.assertAlmostEqual(vi, hyper_0Fr(HyperParams((1.5,), float(zi))), places=12)

    def test_invalid_parameters(self):
        """Test rejection of nonpositive denominators and negative arguments"""
        with self.assertRaises(ParameterError):
            HyperParams((0.0,), 1.0)
        with self.assertRaises(ParameterError):
            HyperParams((1.0,), -1.0)
        with self.assertRaises(ParameterError):
            HyperParams((), 1.0)

    def test_term_cap(self):
        """Test that a tiny term cap raises ConvergenceError"""
        with self.assertRaises(ConvergenceError):
            hyper_0Fr_array([1.0], np.array([1e6]), max_terms=10)

    def test_strictly_increasing_in_z(self):
        """Test that 0F_r grows with its argument"""
        z = np.array([0.0, 0.1, 1.0, 5.0, 20.0, 80.0])
        for denominators in ([0.5], [1.5], [0.5, 2.3], [1e-6, 1.0, 2.0]):
            values = hyper_0Fr_array(denominators, z)
            self.assertTrue(np.all(np.diff(values) > 0), (denominators, values))


class TestQuadrature(unittest.TestCase):
    """Test cases for generalized Gauss-Laguerre rules"""

    def test_matches_scipy_roots(self):
        """Test nodes and weights against scipy.special.roots_genlaguerre"""
        for alpha in ALPHAS:
            rule = gauss_gen_laguerre(alpha, 12)
            nodes, weights = special.roots_genlaguerre(12, alpha)
            np.testing.assert_allclose(rule.nodes, nodes, rtol=1e-10)
            np.testing.assert_allclose(rule.weights, weights, rtol=1e-8)

    def test_total_mass(self):
        """Test that the weights sum to Gamma(alpha + 1)"""
        for alpha in ALPHAS:
            rule = gauss_gen_laguerre(alpha, 40)
            self.assertAlmostEqual(rule.integrate(np.ones(40)) / special.gamma(alpha + 1), 1.0, places=12)

    def test_polynomial_exactness(self):
        """Test exact integration of y^m, m <= 2 order - 1"""
        rule = gauss_gen_laguerre(0.3, 6)
        for m in range(12):
            exact = special.gamma(m + 1.3)
            self.assertAlmostEqual(rule.integrate(rule.nodes ** m) / exact, 1.0, places=9)

    def test_single_node(self):
        """Test the one-point rule"""
        rule = gauss_gen_laguerre(1.0, 1)
        self.assertAlmostEqual(rule.nodes[0], 2.0)
        self.assertAlmostEqual(rule.weights[0], 1.0)

    def test_invalid_rule(self):
        """Test rejection of alpha <= -1 and empty rules"""
        with self.assertRaises(ParameterError):
            gauss_gen_laguerre(-1.0, 10)
        with self.assertRaises(ParameterError):
            gauss_gen_laguerre(0.0, 0)


class TestMoments(unittest.TestCase):
    """Test cases for the moment representation"""

    def setUp(self):
        """Set up test fixtures"""
        self.cache = LaguerreCache()

    def test_zero_x_gives_gamma_moments(self):
        """Test that mu_(alpha, 0) has moments (alpha + 1)^(rising n)"""
        value = moment_integral(MultiIndex.of(3), [0.5], 0.0, 40)
        self.assertAlmostEqual(value / (1.5 * 2.5 * 3.5), 1.0, places=10)

    def test_zeroth_moment_is_one(self):
        """Test that the measure is a probability measure"""
        for x in POINTS:
            self.assertAlmostEqual(moment_integral(MultiIndex.of(0, 0), [-0.5, 1.3], x, 40), 1.0, places=9)

    def test_single_layer_grid(self):
        """Test r = 1 over the full alpha and x grid, n <= 3"""
        for alpha, x in itertools.product(ALPHAS, POINTS):
            for n in range(4):
                result = check_moment(MultiIndex.of(n), [alpha], x, 40, cache=self.cache)
                self.assertLessEqual(result.rel_error, 1e-8, result.to_dict())

    def test_two_layer_case(self):
        """Test r = 2, alpha = (-0.5, 1.3), x = 0.7, n <= (3, 3)"""
        for n in MultiIndex.of(3, 3).iter_below():
            result = check_moment(n, [Fraction(-1, 2), Fraction(13, 10)], Fraction(7, 10), 40, cache=self.cache)
            self.assertLessEqual(result.rel_error, 1e-8, result.to_dict())

    @unittest.skipUnless(RUN_SLOW, "set MLL_RUN_SLOW=1 for the full two-layer grid")
    def test_two_layer_grid(self):
        """Test r = 2 over every alpha pair and x, n <= (3, 3)"""
        for a1, a2, x in itertools.product(ALPHAS, ALPHAS, POINTS):
            for n in MultiIndex.of(3, 3).iter_below():
                result = check_moment(n, [a1, a2], x, 40, cache=self.cache)
                self.assertLessEqual(result.rel_error, 1e-8, result.to_dict())

    def test_summands_nonnegative(self):
        """Test that every quadrature summand is a nonnegative finite number"""
        for alpha, x in itertools.product(ALPHAS, POINTS):
            for n in range(4):
                summands = moment_summands(MultiIndex.of(n), [alpha], x, 40)
                self.assertTrue(np.all(np.isfinite(summands)))
                self.assertTrue(np.all(summands >= 0), (n, alpha, x))
        summands = moment_summands(MultiIndex.of(2, 3), [-0.5, 1.3], 0.7, 40)
        self.assertEqual(summands.shape, (1600,))
        self.assertTrue(np.all(summands >= 0))

    def test_order_doubling(self):
        """Test that doubling the node count moves the moment by less than the tolerance"""
        for alpha, x in itertools.product(ALPHAS, POINTS):
            for n in range(4):
                coarse = moment_integral(MultiIndex.of(n), [alpha], x, 40)
                fine = moment_integral(MultiIndex.of(n), [alpha], x, 80)
                self.assertLessEqual(relative_error(coarse, fine), 1e-8, (n, alpha, x))

    def test_directional_moments(self):
        """Test moments along k against L_(jk)"""
        k = MultiIndex.of(1, 1)
        values = directional_moments(k, [0.0, 0.5], 1.0, 3, 40)
        for j, value in enumerate(values):
            exact = float(eval_exact(explicit_laguerre(k.scaled(j)), [1, 1, Fraction(3, 2)]))
            self.assertLessEqual(relative_error(value, exact), 1e-8)

    def test_invalid_moment_parameters(self):
        """Test rejection of alpha <= -1, negative x and wrong alpha count"""
        with self.assertRaises(ParameterError):
            moment_integral(MultiIndex.of(1), [-1.0], 1.0, 10)
        with self.assertRaises(ParameterError):
            moment_integral(MultiIndex.of(1), [0.0], -0.5, 10)
        with self.assertRaises(ParameterError):
            moment_integral(MultiIndex.of(1, 1), [0.0], 1.0, 10)


class TestBoundaryAndBessel(unittest.TestCase):
    """Test cases for the alpha = -1 measure and the Bessel form"""

    def test_boundary_moments(self):
        """Test the alpha = -1 moments for n <= 4"""
        for x in (0.5, 1.0, 2.0):
            for n in range(5):
                exact = float(eval_exact(explicit_laguerre(MultiIndex.of(n)), [Fraction(x), 0]))
                approx = moment_integral_boundary_r1(n, x, 40)
                self.assertLessEqual(relative_error(approx, exact), 1e-8, (n, x))

    def test_boundary_value(self):
        """Test L_2(2; b = 0) = 8"""
        self.assertAlmostEqual(moment_integral_boundary_r1(2, 2.0, 40), 8.0, places=8)

    def test_limit_from_above(self):
        """Test that alpha = -1 + 1e-6 is close to the alpha = -1 measure"""
        alpha = -1.0 + 1e-6
        for x in (0.5, 1.0, 2.0):
            for n in range(5):
                near = moment_integral(MultiIndex.of(n), [alpha], x, 40)
                boundary = moment_integral_boundary_r1(n, x, 40)
                self.assertLessEqual(relative_error(near, boundary), 1e-4, (n, x))

    def test_atom_carries_missing_mass(self):
        """Test the n = 0 moment with and without the atom"""
        self.assertAlmostEqual(moment_integral_boundary_r1(0, 1.0, 40), 1.0, places=10)
        self.assertAlmostEqual(
            moment_integral_boundary_r1(0, 1.0, 40, include_atom=False), 1.0 - math.exp(-1.0), places=10
        )
        self.assertEqual(moment_integral_boundary_r1(0, 0.0, 40, include_atom=False), 0.0)

    def test_bessel_matches_hypergeometric(self):
        """Test the Bessel weight against the 0F1 weight"""
        for alpha in (-0.5, 0.5, 1.3):
            for x in (0.5, 2.0):
                for n in range(4):
                    bessel = bessel_moment_r1(n, alpha, x, 40)
                    hyper = moment_integral(MultiIndex.of(n), [alpha], x, 40)
                    self.assertLessEqual(relative_error(bessel, hyper), 1e-8)

    def test_bessel_needs_positive_x(self):
        """Test that x = 0 is rejected"""
        with self.assertRaises(ParameterError):
            bessel_moment_r1(1, 0.5, 0.0, 10)


class TestOrthogonality(unittest.TestCase):
    """Test cases for multiple orthogonality"""

    def setUp(self):
        """Set up test fixtures"""
        self.n = MultiIndex.of(2, 1)
        self.alpha = [Fraction(-3, 10), Fraction(2, 5)]

    def test_vanishing_integrals(self):
        """Test layer 1 with m in {0, 1} and layer 2 with m = 0"""
        for layer, m in ((1, 0), (1, 1), (2, 0)):
            value = check_orthogonality(self.n, self.alpha, layer, m, 40)
            scale = orthogonality_scale(self.n, self.alpha[layer - 1])
            self.assertLessEqual(abs(value) / scale, 1e-9, (layer, m))

    def test_single_layer_is_classical(self):
        """Test r = 1 orthogonality and the exponent range check"""
        n = MultiIndex.of(2)
        alpha = [Fraction(1, 2)]
        value = check_orthogonality(n, alpha, 1, 1, 40)
        self.assertLessEqual(abs(value) / orthogonality_scale(n, 0.5), 1e-9)
        with self.assertRaises(ParameterError):
            check_orthogonality(n, alpha, 1, 2, 40)

    def test_integer_spaced_alpha(self):
        """Test rejection of alpha_1 - alpha_2 in Z"""
        with self.assertRaises(ParameterError):
            check_orthogonality(self.n, [Fraction(1, 2), Fraction(3, 2)], 1, 0, 40)

    def test_invalid_layer(self):
        """Test rejection of a layer outside 1..r"""
        with self.assertRaises(ParameterError):
            check_orthogonality(self.n, self.alpha, 3, 0, 40)

    def test_scale(self):
        """Test scale = Gamma(|n| + alpha_i + 1)"""
        self.assertAlmostEqual(orthogonality_scale(self.n, 0.4), special.gamma(4.4))


if __name__ == '__main__':
    unittest.main()
