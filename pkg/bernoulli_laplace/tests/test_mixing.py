import math
from fractions import Fraction
from unittest import TestCase

import bernoulli_laplace.mixing as mixing
from bernoulli_laplace.core import (
    Backend,
    DistributionVector,
    build_kernel,
    canonical_params,
    new_model,
    stationary_distribution,
)
from bernoulli_laplace.errors import ModelError, NonConvergenceError
from bernoulli_laplace.oracle import dense_power
from bernoulli_laplace.symmetry import RadicalScalar, symmetric_system

F = Fraction

LARGE = new_model(100, 100, 100)

class TestDistributionAt(TestCase):
    def test_small_case(self):
        '''
        Tests rho_m(.; j) of (2, 2, 2).
        '''
        params = new_model(2, 2, 2)

        self.assertEqual(mixing.distribution_at(params, 0, 0).weights, (1, 0, 0))
        self.assertEqual(mixing.distribution_at(params, 0, 1).weights, (0, 1, 0))
        self.assertEqual(mixing.distribution_at(params, 0, 2).weights, (F(1, 4), F(1, 2), F(1, 4)))

        output = mixing.distribution_at(params, 1, 2, Backend.FLOAT)
        self.assertEqual(output.weights, (0.125, 0.75, 0.125))

    def test_dense_oracle(self):
        '''
        Tests that rho_m(.; j) is the j-th column of the dense power exactly.
        '''
        for params in canonical_params(8):
            kernel = build_kernel(params)
            for m in (0, 3, 11):
                power = dense_power(kernel, m)
                for j in range(params.states):
                    self.assertEqual(
                        mixing.distribution_at(params, j, m).weights, tuple(power[:, j]))

    def test_convergence(self):
        '''
        Tests that rho_m(.; 0) is within 1e-9 of pi after 10 n ln n steps.
        '''
        for params in (new_model(5, 5, 5), new_model(10, 10, 10), new_model(3, 7, 2)):
            m = math.ceil(10 * params.n * math.log(params.n))
            output = mixing.distribution_at(params, 0, m, Backend.FLOAT)
            pi = stationary_distribution(params).weights
            for value, weight in zip(output.weights, pi):
                self.assertAlmostEqual(value, float(weight), delta=1e-9)

    def test_invalid(self):
        '''
        Tests rejection of invalid start states and step counts.
        '''
        params = new_model(2, 2, 2)

        with self.assertRaises(ModelError):
            mixing.distribution_at(params, 3, 1)

        with self.assertRaises(ModelError):
            mixing.distribution_at(params, 0, -1)

class TestTvDistance(TestCase):
    def test_values(self):
        '''
        Tests symmetry, bounds and exactness of the total variation distance.
        '''
        a = DistributionVector((F(1), F(0)))
        b = DistributionVector((F(0), F(1)))
        c = DistributionVector((F(1, 3), F(2, 3)))

        self.assertEqual(mixing.tv_distance(a, b), 1)
        self.assertEqual(mixing.tv_distance(a, a), 0)
        self.assertEqual(mixing.tv_distance(a, c), F(2, 3))
        self.assertEqual(mixing.tv_distance(c, a), F(2, 3))
        self.assertIsInstance(mixing.tv_distance(a, c), Fraction)

        output = mixing.tv_distance(a.to_float(), c)
        self.assertIsInstance(output, float)
        self.assertAlmostEqual(output, 2 / 3)

        with self.assertRaises(ModelError):
            mixing.tv_distance(a, (F(1, 3), F(1, 3), F(1, 3)))

    def test_start_distance(self):
        '''
        Tests that the distance of the point mass at j is 1 - pi_j.
        '''
        params = new_model(5, 7, 4)
        pi = stationary_distribution(params)

        for j in range(params.states):
            curve = mixing.tv_curve(params, j, [0], Backend.EXACT)
            self.assertEqual(curve.values, [1 - pi[j]])

class TestTvCurve(TestCase):
    def test_backends_agree(self):
        '''
        Tests that the float curve agrees with the exact one, also with several workers.
        '''
        params = new_model(6, 6, 5)
        steps = [0, 1, 2, 5, 10, 30]

        exact = mixing.tv_curve(params, 0, steps, Backend.EXACT)
        threaded = mixing.tv_curve(params, 0, steps, Backend.FLOAT, workers=3)

        self.assertEqual(threaded.steps, steps)
        for expected_output, output in zip(exact.values, threaded.values):
            self.assertAlmostEqual(output, float(expected_output), places=14)

    def test_crossings(self):
        '''
        Tests detection of level crossings between consecutive points.
        '''
        curve = mixing.TvCurve(None, 0, ((0, 0.9), (1, 0.6), (2, 0.4), (3, 0.45), (4, 0.2)))
        self.assertEqual(curve.crossings(0.5), [2])
        self.assertEqual(curve.crossings(0.42), [2, 4])

    def test_large_case(self):
        '''
        Tests the shape of the curve of (100, 100, 100) started with no white ball in urn 1.
        '''
        # Every tenth step, and every step around the crossing of 1/2.
        steps = sorted(set(range(0, 1001, 10)) | set(range(100, 131)))
        curve = mixing.tv_curve(LARGE, 0, steps, Backend.FLOAT)
        values = dict(curve.points)

        pi_0 = float(stationary_distribution(LARGE)[0])
        self.assertAlmostEqual(values[0], 1 - pi_0)
        self.assertGreater(values[0], 0.9)
        self.assertGreater(values[50], 0.9)
        self.assertLess(values[700], 0.01)

        self.assertEqual(curve.crossings(0.5), [117])
        self.assertGreater(values[116], 0.5)
        self.assertLessEqual(values[117], 0.5)
        self.assertTrue(all(0 <= value <= 1 for value in curve.values))

    def test_invalid(self):
        '''
        Tests rejection of an empty or negative step list.
        '''
        params = new_model(2, 2, 2)

        with self.assertRaises(ModelError):
            mixing.tv_curve(params, 0, [])

        with self.assertRaises(ModelError):
            mixing.tv_curve(params, 0, [1, -2])

class TestCutoffScan(TestCase):
    def test_already_mixed(self):
        '''
        Tests that an epsilon above 1 - pi_j gives zero steps.
        '''
        self.assertEqual(mixing.cutoff_scan(new_model(2, 2, 2), 1, 0.5), 0)

    def test_small_case(self):
        '''
        Tests the bracket property of the scan result.
        '''
        params = new_model(5, 5, 5)
        m = mixing.cutoff_scan(params, 0, 0.05)

        curve = mixing.tv_curve(params, 0, [m - 1, m])
        self.assertGreater(curve.values[0], 0.05)
        self.assertLessEqual(curve.values[1], 0.05)

    def test_large_case(self):
        '''
        Tests the cutoff window of (100, 100, 100).
        '''
        self.assertEqual(mixing.cutoff_scan(LARGE, 0, 0.1), 200)
        self.assertEqual(mixing.cutoff_scan(LARGE, 0, 0.5), 117)

    def test_periodic(self):
        '''
        Tests that the period two chain never mixes.
        '''
        with self.assertRaises(NonConvergenceError):
            mixing.cutoff_scan(new_model(1, 1, 1), 0, 0.1)

    def test_invalid_epsilon(self):
        '''
        Tests rejection of epsilon outside (0, 1).
        '''
        for epsilon in (0, 1, 1.5):
            with self.assertRaises(ModelError):
                mixing.cutoff_scan(new_model(2, 2, 2), 0, epsilon)

class TestBounds(TestCase):
    def test_steps(self):
        '''
        Tests the step counts of the bounds at n = 200.
        '''
        self.assertEqual(mixing.bound_steps(LARGE, 'upper', 0), 248)
        self.assertEqual(mixing.bound_steps(LARGE, 'lower', -1), 232)
        self.assertEqual(mixing.bound_steps(LARGE, 'lower', 1), 32)

        # Clamped at zero.
        self.assertEqual(mixing.bound_steps(LARGE, 'lower', 10), 0)

    def test_values(self):
        '''
        Tests the bound values and their constants.
        '''
        output = mixing.mixing_bound(LARGE, 'upper', 1)
        self.assertEqual((output.kind, output.m), (mixing.BoundKind.UPPER, 348))
        self.assertAlmostEqual(output.bound_value, math.exp(-2))

        output = mixing.mixing_bound(LARGE, mixing.BoundKind.LOWER, -1, constant=0.5)
        self.assertAlmostEqual(output.bound_value, 1 - 0.5 * math.exp(-4))

        self.assertAlmostEqual(mixing.mixing_bound(LARGE, 'lower', 0).bound_value, 0)

    def test_invalid(self):
        '''
        Tests rejection of unbalanced models, unknown kinds and nonpositive constants.
        '''
        with self.assertRaises(ModelError):
            mixing.mixing_bound(new_model(3, 4, 2), 'upper', 0)

        with self.assertRaises(ModelError):
            mixing.mixing_bound(LARGE, 'middle', 0)

        with self.assertRaises(ModelError):
            mixing.mixing_bound(LARGE, 'upper', 0, constant=0)

    def test_upper_bound_at(self):
        '''
        Tests the upper bound as a function of the step count.
        '''
        self.assertAlmostEqual(mixing.upper_bound_at(LARGE, 0), 200 * 2 ** -0.25)
        self.assertAlmostEqual(
            mixing.upper_bound_at(LARGE, 300, constant=2), 2 * 200 * 2 ** -0.25 * math.exp(-6))

    def test_expected_tv_decreasing(self):
        '''
        Tests that the stationary average distance decreases along the upper bound step counts.
        '''
        averages = []
        for c in (0, 1, 2, 3):
            m = mixing.mixing_bound(LARGE, 'upper', c).m
            averages.append(mixing.expected_bound_check(LARGE, m).average)

        self.assertLess(averages[1], 1)
        self.assertTrue(all(a > b for a, b in zip(averages, averages[1:])))

    def test_lower_bound_steps(self):
        '''
        Tests that the chain is still far from stationary at the lower bound step count.
        '''
        m = mixing.mixing_bound(LARGE, 'lower', 1).m
        self.assertGreater(mixing.tv_curve(LARGE, 0, [m]).values[0], 0.5)

        # Past the cutoff the lower bound no longer holds the distance up.
        m = mixing.mixing_bound(LARGE, 'lower', -1).m
        self.assertEqual(m, 232)
        self.assertLess(mixing.tv_curve(LARGE, 0, [m], Backend.FLOAT).values[0], 0.1)

    def test_expected_tv_start(self):
        '''
        Tests that the stationary average distance starts at 1 - sum pi_j^2 and then decreases.
        '''
        params = new_model(10, 10, 10)
        pi = stationary_distribution(params).weights

        start = mixing.expected_bound_check(params, 0, Backend.EXACT).average
        self.assertEqual(start, 1 - sum(weight * weight for weight in pi))

        later = mixing.expected_bound_check(params, 60).average
        self.assertLess(later, float(start))
        self.assertLess(later, 0.01)

    def test_expected_tv_below_cauchy_schwarz(self):
        '''
        Tests the stationary average distance against the intermediate upper bound.
        '''
        m = mixing.mixing_bound(LARGE, 'upper', 0).m
        self.assertEqual(m, 248)
        self.assertLessEqual(
            mixing.expected_bound_check(LARGE, m).average, mixing.cauchy_schwarz_bound(LARGE, m))

    def test_expected_tv_exact(self):
        '''
        Tests the exact stationary average distance against the float one.
        '''
        params = new_model(4, 4, 3)

        exact = mixing.expected_bound_check(params, 5, Backend.EXACT)
        converted = mixing.expected_bound_check(params, 5, Backend.FLOAT)

        self.assertIsInstance(exact.average, Fraction)
        self.assertAlmostEqual(converted.average, float(exact.average), places=14)

    def test_cauchy_schwarz_bound(self):
        '''
        Tests the intermediate upper bound.
        '''
        self.assertEqual(mixing.cauchy_schwarz_bound(new_model(2, 2, 2), 1), 0.0)

        params = new_model(10, 10, 10)
        values = [mixing.cauchy_schwarz_bound(params, m) for m in (0, 10, 20)]
        self.assertTrue(all(a > b > 0 for a, b in zip(values, values[1:])))

class TestEigenMoments(TestCase):
    def test_small_case(self):
        '''
        Tests the hand evaluated moments of (2, 2, 2).
        '''
        params = new_model(2, 2, 2)

        self.assertEqual(mixing.eigen_moment(params, 0, 5, 0), RadicalScalar(F(1), F(1)))
        self.assertEqual(mixing.eigen_moment(params, 0, 2, 1).coefficient, 0)

        output = mixing.eigen_moment(params, 0, 3, 2)
        self.assertAlmostEqual(float(output), (-0.5) ** 3 * 6 / math.sqrt(18))

    def test_identity(self):
        '''
        Tests E_rho_m[v_k] = lambda_k^m v_k(j) exactly over small models.
        '''
        for params in canonical_params(12):
            system = symmetric_system(params)
            for k in range(params.states):
                for j in range(params.states):
                    for m in (0, 1, 4, 20):
                        mixing.eigen_moment(params, j, m, k, system=system)

    def test_float(self):
        '''
        Tests the float moments against the exact ones.
        '''
        params = new_model(10, 10, 10)
        for k in (1, 2, 5):
            exact = mixing.eigen_moment(params, 0, 40, k)
            output = mixing.eigen_moment(params, 0, 40, k, Backend.FLOAT)
            self.assertAlmostEqual(output, float(exact), places=9)

class TestVariance(TestCase):
    def test_exact(self):
        '''
        Tests Var_pi(v_1) = 1 and the zero variance of point masses.
        '''
        for params in (new_model(2, 2, 2), new_model(6, 6, 4), new_model(3, 7, 3)):
            v_1 = symmetric_system(params).v[1]

            self.assertEqual(mixing.variance_under(stationary_distribution(params), v_1), 1)

            point_mass = DistributionVector.point_mass(params.states, 1)
            self.assertEqual(mixing.variance_under(point_mass, v_1), 0)

        uniform = DistributionVector((F(1, 2), F(1, 2)))
        self.assertEqual(mixing.variance_under(uniform, (F(0), F(2))), 1)

        with self.assertRaises(ModelError):
            mixing.variance_under(uniform, (1, 2, 3))

    def test_bounded(self):
        '''
        Tests that Var_rho_m(v_1) stays bounded along the curve of (100, 100, 100).
        '''
        v_1 = symmetric_system(LARGE).v[1]
        for m in range(0, 1001, 50):
            distribution = mixing.distribution_at(LARGE, 0, m, Backend.FLOAT)
            output = mixing.variance_under(distribution, v_1)
            self.assertTrue(-1e-9 <= output <= 2)

class TestFirstEigenvector(TestCase):
    def test_profile(self):
        '''
        Tests that v_1 is affine with its zero at the stationary mean n1 nw / n.
        '''
        self.assertEqual(mixing.first_eigenvector_profile(new_model(2, 2, 2)), (3, 1))
        self.assertEqual(
            mixing.first_eigenvector_profile(new_model(6, 6, 4)), (F(11, 8), 2))
        self.assertEqual(
            mixing.first_eigenvector_profile(LARGE), (F(199, 2500), 50))

        for params in canonical_params(10):
            _, center = mixing.first_eigenvector_profile(params)
            self.assertEqual(center, F(params.n1 * params.nw, params.n))

    def test_square_decomposition(self):
        '''
        Tests v_1^2 = A v_2 + B in the balanced case.
        '''
        a, b = mixing.square_decomposition(new_model(2, 2, 2))
        self.assertEqual(b, 1)
        self.assertEqual(a.squared(), 2)

        for n1 in range(2, 8):
            for nw in range(2, n1 + 1):
                _, b = mixing.square_decomposition(new_model(n1, n1, nw))
                self.assertEqual(b, 1)

        with self.assertRaises(ModelError):
            mixing.square_decomposition(new_model(3, 4, 2))

        with self.assertRaises(ModelError):
            mixing.square_decomposition(new_model(3, 3, 1))

class TestChebyshevLowerBound(TestCase):
    def test_bound(self):
        '''
        Tests that the Chebyshev bound is a valid lower bound on the distance.
        '''
        for m in (0, 16, 32, 64):
            bound = mixing.chebyshev_lower_bound(LARGE, m, 2)
            tv = mixing.tv_curve(LARGE, 0, [m]).values[0]
            self.assertLessEqual(bound, tv + 1e-12)

        self.assertGreater(mixing.chebyshev_lower_bound(LARGE, 32, 2), 0.5)

        # Vacuous once the mean of v_1 drops below the threshold.
        self.assertEqual(mixing.chebyshev_lower_bound(LARGE, 1000, 2), 0.0)

        with self.assertRaises(ModelError):
            mixing.chebyshev_lower_bound(LARGE, 10, 0)
