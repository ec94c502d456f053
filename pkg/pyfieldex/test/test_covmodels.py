# Copyright 2026 Fieldex Developers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Test the covariance models and their diagnostics.
"""

import unittest
from pyfieldex.covmodels import CovarianceModel, CovarianceKind, MixtureFieldSpec, \
    evaluate, covariance_matrix, is_positive_semidefinite, check_a1_envelope, \
    check_a3_limit, mixture_covariance, model_from_dict
from pyfieldex.errors import ConfigurationError
from pyfieldex.grids import DomainSpec
import math
import numpy as np


def _exp1():
    return CovarianceModel(1, [1.0])


class TestCovarianceModel(unittest.TestCase):

    def test_exponential_values(self):
        m = _exp1()
        self.assertEqual(1.0, evaluate(m, [0.0]))
        self.assertAlmostEqual(0.367879441171, evaluate(m, [1.0]), places=10)
        self.assertAlmostEqual(0.367879441171, evaluate(m, [-1.0]), places=10)
        m2 = CovarianceModel(2, [2.0, 2.0])
        self.assertAlmostEqual(0.778800783071, m2.evaluate([0.3, 0.4]), places=10)

    def test_array_lags(self):
        m = CovarianceModel(2, [1.0])
        r = m.evaluate(np.zeros((3, 4, 2)))
        self.assertEqual((3, 4), r.shape)
        np.testing.assert_array_equal(1.0, r)

    def test_dimension_mismatch(self):
        with self.assertRaises(ValueError):
            CovarianceModel(2, [1.0]).evaluate([0.1, 0.2, 0.3])

    def test_invalid(self):
        with self.assertRaises(ConfigurationError):
            CovarianceModel(1, [2.5])
        with self.assertRaises(ConfigurationError):
            CovarianceModel(1, [0.0])
        with self.assertRaises(ConfigurationError):
            CovarianceModel(2, [1.0, 1.0, 1.0])
        with self.assertRaises(ConfigurationError):
            CovarianceModel(1, [1.0], 'unknown')
        with self.assertRaises(ConfigurationError):
            CovarianceModel(1, [1.0], 'gneiting', {'beta': -1.0})

    def test_gneiting(self):
        m = CovarianceModel(1, [1.0], CovarianceKind.GNEITING, {'beta': 2.0})
        self.assertEqual(1.0, m.evaluate([0.0]))
        self.assertAlmostEqual((1.0 + 0.5) ** -2.0, m.evaluate([1.0]), places=12)

    def test_table(self):
        m = CovarianceModel(1, [1.0], 'table', {'lags': [0.0, 1.0, 2.0], 'values': [1.0, 0.5, 0.0]})
        self.assertAlmostEqual(0.75, m.evaluate([0.5]), places=12)
        self.assertEqual(0.0, m.evaluate([5.0]))
        with self.assertRaises(ConfigurationError):
            CovarianceModel(1, [1.0], 'table', {'lags': [0.0, 1.0], 'values': [0.9, 0.5]})

    def test_dict(self):
        m = CovarianceModel(2, [1.0, 2.0], 'gneiting', {'beta': 1.5})
        self.assertEqual(m, CovarianceModel.from_dict(m.to_dict()))
        with self.assertRaises(ConfigurationError):
            CovarianceModel.from_dict({'dim': 1})

    def test_covariance_matrix(self):
        points = np.array([[0.0], [0.5], [2.0]])
        c = covariance_matrix(_exp1(), points)
        self.assertEqual((3, 3), c.shape)
        np.testing.assert_allclose(np.diag(c), 1.0)
        self.assertAlmostEqual(math.exp(-1.5), c[1, 2], places=12)
        self.assertTrue(is_positive_semidefinite(_exp1(), np.linspace(0, 5, 50)))

    def test_not_positive_semidefinite(self):
        m = CovarianceModel(1, [1.0], 'table', {'lags': [0.0, 1.0, 2.0], 'values': [1.0, -0.9, -0.9]})
        self.assertFalse(is_positive_semidefinite(m, [[0.0], [1.0], [2.0]]))


class TestEnvelope(unittest.TestCase):

    def test_exponential(self):
        report = check_a1_envelope(_exp1(), [0.01, 0.5])
        self.assertTrue(report.passed)
        self.assertAlmostEqual(0.995017, report.ratios[0], places=5)
        self.assertAlmostEqual(0.786939, report.ratios[1], places=5)

    def test_two_dim_checks_diagonal(self):
        report = check_a1_envelope(CovarianceModel(2, [1.0, 2.0]), [0.1])
        self.assertEqual(3, len(report.points))
        self.assertTrue(report.passed)

    def test_radius_range(self):
        with self.assertRaises(ValueError):
            check_a1_envelope(_exp1(), [0.0])
        with self.assertRaises(ValueError):
            check_a1_envelope(_exp1(), [0.6])

    def test_violation(self):
        m = CovarianceModel(1, [1.0], 'table', {'lags': [0.0, 1.0], 'values': [1.0, 0.99]})
        self.assertFalse(check_a1_envelope(m, [0.1]).passed)


class TestLongRange(unittest.TestCase):

    def test_weak_dependence(self):
        report = check_a3_limit(_exp1(), [100.0])
        self.assertLess(report.last, 1e-40)

    def test_mixture_limit(self):
        spec = MixtureFieldSpec(_exp1(), 2.0, DomainSpec([math.exp(8.0)]))
        report = check_a3_limit(spec, [math.exp(6.0), math.exp(8.0), math.exp(10.0)])
        self.assertAlmostEqual(2.0, report.last, places=9)
        self.assertTrue(report.cauchy)

    def test_zero_table(self):
        m = CovarianceModel(1, [1.0], 'table', {'lags': [0.0, 1.0], 'values': [1.0, 0.0]})
        report = check_a3_limit(m, [10.0, 100.0, 1000.0])
        self.assertEqual((0.0, 0.0, 0.0), report.values)


class TestMixture(unittest.TestCase):

    def test_linear_mixture(self):
        spec = MixtureFieldSpec(_exp1(), 2.0, DomainSpec([math.exp(8.0)]))
        self.assertAlmostEqual(0.25, spec.rho, places=12)
        self.assertAlmostEqual(1.0, mixture_covariance(spec, [0.0]), places=12)
        t = -math.log(0.4)
        self.assertAlmostEqual(0.55, mixture_covariance(spec, [t]), places=12)
        self.assertEqual(2.0, spec.long_range)

    def test_zero_target(self):
        spec = MixtureFieldSpec(_exp1(), 0.0, DomainSpec([100.0]))
        self.assertEqual(_exp1().evaluate([0.7]), mixture_covariance(spec, [0.7]))

    def test_rho_range(self):
        with self.assertRaises(ConfigurationError):
            MixtureFieldSpec(_exp1(), 2.0, DomainSpec([math.exp(1.5)]))
        with self.assertRaises(ConfigurationError):
            MixtureFieldSpec(_exp1(), -1.0, DomainSpec([100.0]))

    def test_model_from_dict(self):
        d = {'kind': 'exponential', 'dim': 1, 'alphas': [1.0], 'rTarget': 2.0}
        spec = model_from_dict(d, DomainSpec([2000.0]))
        self.assertIsInstance(spec, MixtureFieldSpec)
        self.assertAlmostEqual(2.0 / math.log(2000.0), spec.rho, places=12)
        with self.assertRaises(ConfigurationError):
            model_from_dict(d)
        self.assertIsInstance(model_from_dict({'dim': 1, 'alphas': [1.0]}), CovarianceModel)
