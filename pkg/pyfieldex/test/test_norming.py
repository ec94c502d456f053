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
Test the normalizing constants.
"""

import unittest
from pyfieldex.errors import ConfigurationError
from pyfieldex.grids import DomainSpec, GridSpec, GridRegime
from pyfieldex.norming import H_1, H_2, PickandsValues, NormingConstants, brownian_grid_constant, \
    literature_values, compute_norming, to_levels, normalize_extremes
import math
import numpy as np


E8 = DomainSpec([math.exp(8.0)])


class TestPickandsValues(unittest.TestCase):

    def test_literature(self):
        v = literature_values([1.0, 2.0])
        self.assertEqual((1.0, 1.0 / math.sqrt(math.pi)), v.h_alpha)
        self.assertIsNone(v.h_a_alpha)
        self.assertEqual('literature', v.provenance)
        self.assertAlmostEqual(H_2, v.product(2), places=15)

    def test_literature_unknown(self):
        with self.assertRaises(ConfigurationError):
            literature_values([1.5])
        with self.assertRaises(ConfigurationError):
            literature_values([2.0], a=[1.0])

    def test_broadcast(self):
        v = PickandsValues([0.5])
        self.assertAlmostEqual(0.25, v.product(2), places=15)
        with self.assertRaises(ConfigurationError):
            PickandsValues([0.5, 0.6, 0.7]).product(2)
        with self.assertRaises(ConfigurationError):
            v.grid_product(1)

    def test_invalid(self):
        with self.assertRaises(ConfigurationError):
            PickandsValues([0.0])
        with self.assertRaises(ConfigurationError):
            PickandsValues([1.0], [-1.0])

    def test_brownian_grid_constant(self):
        h1 = brownian_grid_constant(1.0)
        self.assertTrue(0.43 < h1 < 0.46, h1)
        h_small = brownian_grid_constant(0.01)
        self.assertTrue(0.85 < h_small < 1.0, h_small)
        self.assertAlmostEqual(1.0 / 20.0, brownian_grid_constant(20.0), delta=0.001)
        values = [brownian_grid_constant(a) for a in [2.0, 1.0, 0.5, 0.1, 0.05]]
        self.assertTrue(all(b > a for a, b in zip(values[:-1], values[1:])))
        with self.assertRaises(ValueError):
            brownian_grid_constant(0.0)


class TestNorming(unittest.TestCase):

    def test_a_t(self):
        n = compute_norming(E8, [2.0], GridSpec.dense(0.1), literature_values([2.0]))
        self.assertAlmostEqual(4.0, n.a_t, places=12)

    def test_b_t_gaussian(self):
        n = compute_norming(E8, [2.0], GridSpec.dense(0.1), literature_values([2.0]))
        self.assertAlmostEqual(4.0 + 0.25 * math.log(0.225079079), n.b_t, places=7)
        self.assertAlmostEqual(3.62716, n.b_t, places=4)
        self.assertEqual(n.b_t, n.b_star)
        self.assertEqual(GridRegime.DENSE, n.regime)

    def test_b_t_brownian(self):
        n = compute_norming(E8, [1.0], GridSpec.dense(0.1), literature_values([1.0]))
        expect = 4.0 + (-0.5 * math.log(2 * math.pi) + math.log(4.0)) / 4.0
        self.assertAlmostEqual(expect, n.b_t, places=12)

    def test_sparse(self):
        n = compute_norming(E8, [1.0], GridSpec.sparse(2.0), literature_values([1.0]))
        self.assertAlmostEqual(4.0 + 0.25 * math.log(0.125 / math.sqrt(2 * math.pi)), n.b_t_delta, places=10)
        self.assertAlmostEqual(3.2504, n.b_t_delta, places=3)
        self.assertEqual(n.b_t_delta, n.b_star)
        self.assertIsNone(n.b_a_t)

    def test_pickands(self):
        values = PickandsValues([1.0], [0.5])
        n = compute_norming(E8, [1.0], GridSpec.pickands(1.0), values)
        self.assertAlmostEqual(n.b_t + math.log(0.5) / 4.0, n.b_a_t, places=12)
        self.assertEqual(n.b_a_t, n.b_star)
        with self.assertRaises(ConfigurationError):
            compute_norming(E8, [1.0], GridSpec.pickands(1.0), PickandsValues([1.0]))

    def test_location_gap(self):
        for t in [1e3, 1e6, 1e12]:
            n = compute_norming(DomainSpec([t]), [1.0], GridSpec.dense(0.1), literature_values([1.0]))
            self.assertLessEqual(abs(n.b_t - n.a_t), 2.0 * math.log(n.a_t) / n.a_t + 1.0 / n.a_t)

    def test_offset(self):
        base = compute_norming(E8, [1.0], GridSpec.sparse(2.0), literature_values([1.0]))
        shifted = compute_norming(E8, [1.0], GridSpec.sparse(2.0), literature_values([1.0]), offset=1.0)
        self.assertAlmostEqual(base.b_t + 1.0, shifted.b_t, places=12)
        self.assertAlmostEqual(base.b_star + 1.0, shifted.b_star, places=12)
        self.assertEqual(1.0, shifted.to_dict()['offset'])

    def test_to_dict(self):
        n = compute_norming(E8, [1.0], GridSpec.sparse(2.0), literature_values([1.0]))
        d = n.to_dict()
        self.assertEqual({'aT', 'bT', 'bTdelta', 'bAT', 'bStar', 'regime', 'offset'}, set(d.keys()))
        self.assertEqual('sparse', d['regime'])


class TestLevels(unittest.TestCase):

    def setUp(self):
        self.n = NormingConstants(4.0, 3.62716, b_star=3.5, regime=GridRegime.DENSE)

    def test_to_levels(self):
        q = to_levels(self.n, 0.0, 0.0, 0.0, 0.0)
        self.assertEqual(3.62716, q.u_x2)
        self.assertEqual(-3.62716, q.v_x1)
        self.assertEqual(3.5, q.u_y2)
        self.assertEqual(-3.5, q.v_y1)
        q = to_levels(self.n, 0.0, 0.0, 1.0, 0.0)
        self.assertAlmostEqual(3.87716, q.u_x2, places=12)

    def test_normalize(self):
        x = normalize_extremes(np.array([3.62716, 3.5, -3.62716, -3.5]), self.n)
        np.testing.assert_allclose(0.0, x, atol=1e-12)
        x = normalize_extremes(np.array([[3.62716 + 0.5, 3.5, -3.62716, -3.5]]), self.n)
        np.testing.assert_allclose([[2.0, 0.0, 0.0, 0.0]], x, atol=1e-12)

    def test_normalize_attributes(self):
        class Extremes:
            m_cont = np.array([3.62716])
            m_grid = np.array([3.5])
            min_cont = np.array([-3.62716 - 0.25])
            min_grid = np.array([-3.5])
        x = normalize_extremes(Extremes(), self.n)
        np.testing.assert_allclose([[0.0, 0.0, -1.0, 0.0]], x, atol=1e-12)

    def test_normalize_shape(self):
        with self.assertRaises(ValueError):
            normalize_extremes(np.zeros(3), self.n)
