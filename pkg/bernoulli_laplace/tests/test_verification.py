from unittest import TestCase

import bernoulli_laplace.verification as verification
from bernoulli_laplace.core import canonical_params
from bernoulli_laplace.errors import VerificationError

class TestRunSuite(TestCase):
    def test_full_suite(self):
        '''
        Tests that every check passes over every canonical model with n <= 12.
        '''
        cases = len(list(canonical_params(12)))
        self.assertEqual(cases, 161)

        results = list(verification.run_suite(12))

        names = [name for name, _ in verification.CHECKS]
        self.assertEqual([result.name for result in results], names)
        for result in results:
            self.assertTrue(result.passed, f'{result.name}: {result.detail}')
            self.assertEqual(result.cases, cases)
            self.assertEqual(result.detail, '')

    def test_first_failure(self):
        '''
        Tests that a check stops at its first failing model and reports it.
        '''
        def fails_on_three(params, max_m):
            if params.n == 3:
                raise VerificationError('Three balls.')

        results = list(verification.run_suite(4, checks=(('three', fails_on_three),)))

        self.assertEqual(len(results), 1)
        self.assertFalse(results[0].passed)
        # (1, 1, 1) passes, (1, 2, 1) fails.
        self.assertEqual(results[0].cases, 1)
        self.assertEqual(results[0].detail, 'VerificationError: Three balls.')
