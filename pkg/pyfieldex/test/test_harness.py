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
Test the Monte Carlo experiment harness.

Set FIELDEX_SLOW_TESTS=1 to run the bundled acceptance experiments.
"""

import unittest
from pyfieldex.config import load_experiment
from pyfieldex.covmodels import CovarianceModel, MixtureFieldSpec
from pyfieldex.errors import ConfigurationError
from pyfieldex.harness import ExperimentConfig, ExtremesRecord, ComparisonReport, PickandsSource, \
    lattice_step_limit, lattice_steps, build_lattice, simulate_extremes, empirical_joint_cdf, empirical_band, \
    run_experiment, check_acceptance, tail_validation, convergence_study, resolve_pickands
from pyfieldex.limitlaws import Theorem
import copy
import math
import numpy as np
import os


SLOW = bool(os.environ.get('FIELDEX_SLOW_TESTS'))

SMALL = {
    'name': 'small',
    'model': {'kind': 'exponential', 'dim': 1, 'alphas': [1.0]},
    'domain': {'T': [50.0]},
    'grid': {'regime': 'sparse', 'delta': [2.0]},
    'lattice': {'rule': 0.5},
    'reps': 100,
    'masterSeed': 3,
    'evalGrid': {'values': [-1.0, 0.0, 1.0]},
}


def _config(**kwargs):
    d = copy.deepcopy(SMALL)
    d.update(kwargs)
    return ExperimentConfig.from_dict(d)


def _report(**kwargs):
    d = dict(theorem=Theorem.SPARSE_T1, r=0.0, reps=400, eval_points=((0.0, 0.0, 0.0, 0.0),),
             empirical=np.array([0.05]), theoretical=np.array([0.054]), sup_defect=0.004,
             ks={'maxCont': 0.02, 'maxGrid': 0.03, 'minCont': 0.02, 'minGrid': 0.03},
             max_min_corr=0.01, band_empirical=np.array([0.1]), band_theoretical=np.array([0.1]),
             gap_quantile95=0.5, swap_defect=0.01)
    d.update(kwargs)
    return ComparisonReport(**d)


class TestExperimentConfig(unittest.TestCase):

    def test_from_dict(self):
        cfg = _config()
        self.assertEqual(81, len(cfg.eval_points))
        self.assertEqual(Theorem.SPARSE_T1, cfg.theorem)
        self.assertEqual(0.0, cfg.r)
        self.assertEqual((1.0,), cfg.alphas)
        self.assertEqual(PickandsSource.LITERATURE, cfg.pickands_source)

    def test_round_trip(self):
        cfg = _config()
        again = ExperimentConfig.from_dict(cfg.to_dict())
        self.assertEqual(cfg.eval_points, again.eval_points)
        self.assertEqual(cfg.model, again.model)
        self.assertEqual(cfg.domain, again.domain)
        self.assertEqual(cfg.grid, again.grid)

    def test_mixture(self):
        cfg = _config(model={'kind': 'exponential', 'dim': 1, 'alphas': [1.0], 'rTarget': 1.0})
        self.assertIsInstance(cfg.model, MixtureFieldSpec)
        self.assertEqual(1.0, cfg.r)
        bigger = cfg.with_domain(cfg.domain.with_extent(500.0))
        self.assertAlmostEqual(1.0 / math.log(500.0), bigger.model.rho, places=12)

    def test_invalid(self):
        with self.assertRaises(ConfigurationError):
            _config(reps=10)
        with self.assertRaises(ConfigurationError):
            _config(evalPoints=[[0.0, 0.0]])
        with self.assertRaises(ConfigurationError):
            _config(pickands={'source': 'guess'})
        with self.assertRaises(ConfigurationError):
            _config(pickands={'source': 'values'})
        with self.assertRaises(ConfigurationError):
            _config(model={'kind': 'exponential', 'dim': 3, 'alphas': [1.0]},
                    domain={'T': [5.0, 5.0, 5.0]}, grid={'regime': 'sparse', 'delta': [1.0]})
        d = copy.deepcopy(SMALL)
        del d['grid']
        with self.assertRaises(ConfigurationError):
            ExperimentConfig.from_dict(d)

    def test_bundled(self):
        cfg = load_experiment('r0_sparse_d1')
        self.assertEqual(4000, cfg.reps)
        self.assertEqual((2000.0,), cfg.domain.extent)
        self.assertEqual(0.1, cfg.acceptance['supDefectMax'])
        for name in ['mixture_r2_d1', 'pickands_d1', 'dense_d1', 'dense_smooth_d1', 'r0_sparse_d2']:
            load_experiment(name)
        with self.assertRaises(ConfigurationError):
            load_experiment('no_such_config.json')


class TestLattice(unittest.TestCase):

    def test_steps_divide_extent(self):
        cfg = _config()
        h = lattice_steps(cfg)
        n = 50.0 / h[0]
        self.assertAlmostEqual(round(n), n, places=6)
        self.assertLessEqual(h[0], 0.5 / (2 * math.log(50.0)) * (1 + 1e-12))

    def test_explicit_step(self):
        cfg = _config(lattice={'step': 0.05})
        np.testing.assert_allclose([0.05], lattice_steps(cfg))

    def test_lattice_too_coarse(self):
        with self.assertRaises(ConfigurationError):
            _config(domain={'T': [500.0]}, lattice={'step': 1.0})
        with self.assertRaises(ConfigurationError):
            _config(lattice={'step': 0.1})
        with self.assertRaises(ConfigurationError):
            _config(lattice={'step': 0.0})
        with self.assertRaises(ConfigurationError):
            _config(lattice={'rule': 2.0})
        with self.assertRaises(ConfigurationError):
            _config(lattice={'rule': 0.0})
        limit = lattice_step_limit(_config().domain, [1.0])
        self.assertAlmostEqual(0.5 / (2 * math.log(50.0)), limit[0], places=12)
        _config(lattice={'step': float(limit[0])})

    def test_build(self):
        lattice, grid_idx, delta = build_lattice(_config())
        np.testing.assert_allclose([2.0], delta)
        self.assertEqual(26, len(grid_idx[0]))
        self.assertEqual(0, grid_idx[0][0])
        self.assertEqual(lattice.shape[0] - 1, grid_idx[0][-1])

    def test_grid_finer_than_lattice(self):
        cfg = _config(grid={'regime': 'dense', 'c': 0.05}, lattice={'rule': 0.5})
        with self.assertRaises(ConfigurationError):
            build_lattice(cfg)


class TestExtremes(unittest.TestCase):

    def test_record_invariant(self):
        ExtremesRecord(0, 1, 3.0, 2.5, -3.0, -2.0)
        with self.assertRaises(AssertionError):
            ExtremesRecord(0, 1, 3.0, 3.5, -3.0, -2.0)
        with self.assertRaises(AssertionError):
            ExtremesRecord(0, 1, 3.0, 2.5, -3.0, -3.5)

    def test_threads_do_not_change_records(self):
        cfg = _config()
        a, _, _, _ = simulate_extremes(cfg, threads=1)
        b, _, _, _ = simulate_extremes(cfg, threads=3)
        self.assertEqual(a, b)
        self.assertEqual(list(range(100)), [x.rep for x in a])

    def test_replication_range(self):
        cfg = _config()
        full, _, _, _ = simulate_extremes(cfg, threads=1)
        seen = []
        part, lattice, _, _ = simulate_extremes(cfg, threads=2, first=10, count=5,
                                                on_sample=lambda k, s: seen.append((k, s.values.shape)))
        self.assertEqual(full[10:15], part)
        self.assertEqual([(k, lattice.shape) for k in range(10, 15)], sorted(seen))
        with self.assertRaises(ConfigurationError):
            simulate_extremes(cfg, first=-1)
        with self.assertRaises(ConfigurationError):
            simulate_extremes(cfg, first=100)

    def test_empirical(self):
        n = np.array([[0.0, 0.0, 0.0, 0.0],
                      [1.0, 0.5, -1.0, -0.5],
                      [2.0, 2.0, 1.0, 1.0],
                      [-1.0, -1.0, -2.0, -2.0]])
        self.assertEqual(0.75, empirical_joint_cdf(n, 0.0, 0.0, 1.0, 1.0))
        self.assertEqual(0.5, empirical_band(n, -1.5, -1.5, 1.0, 1.0))
        self.assertEqual(0.0, empirical_band(n, 3.0, 3.0, 5.0, 5.0))


class TestRunExperiment(unittest.TestCase):

    def test_sparse(self):
        result = run_experiment(_config(), threads=2)
        report = result.report
        self.assertEqual(100, report.reps)
        self.assertEqual(81, len(report.empirical))
        self.assertTrue(0.0 <= report.sup_defect <= 1.0)
        self.assertEqual({'maxCont', 'maxGrid', 'minCont', 'minGrid'}, set(report.ks.keys()))
        self.assertEqual((100, 4), result.normalized.shape)
        self.assertTrue(np.all(result.extremes[:, 1] <= result.extremes[:, 0]))
        self.assertEqual('sparse', result.meta['theorem'])
        self.assertEqual('literature', result.meta['pickands']['provenance'])
        d = report.to_dict()
        self.assertEqual(81, len(d['points']))
        self.assertIn('bandTheoretical', d['points'][0])

    def test_report_does_not_depend_on_threads(self):
        a = run_experiment(_config(), threads=1).report.to_dict()
        b = run_experiment(_config(), threads=4).report.to_dict()
        self.assertEqual(a, b)

    def test_offset_breaks_norming(self):
        good = run_experiment(_config(), threads=1).report
        bad = run_experiment(_config(normingOffset=1.0), threads=1).report
        self.assertGreater(bad.sup_defect, good.sup_defect)
        self.assertGreater(bad.sup_defect, 0.2)

    def test_mixture(self):
        cfg = _config(model={'kind': 'exponential', 'dim': 1, 'alphas': [1.0], 'rTarget': 1.0})
        result = run_experiment(cfg, threads=1)
        self.assertEqual(1.0, result.report.r)
        self.assertEqual('circulant', result.meta['sampler'])

    def test_dense(self):
        cfg = _config(model={'kind': 'exponential', 'dim': 1, 'alphas': [2.0]}, domain={'T': [20.0]},
                      grid={'regime': 'dense', 'c': 0.05}, lattice={'rule': 0.01})
        report = run_experiment(cfg, threads=1).report
        self.assertEqual(Theorem.DENSE_T3, report.theorem)
        self.assertGreaterEqual(report.gap_quantile95, 0.0)
        self.assertLess(report.gap_quantile95, 0.1)
        self.assertLess(report.swap_defect, 0.2)

    def test_dense_brownian(self):
        smooth = _config(model={'kind': 'exponential', 'dim': 1, 'alphas': [2.0]}, domain={'T': [20.0]},
                         grid={'regime': 'dense', 'c': 0.05}, lattice={'rule': 0.01})
        rough = _config(domain={'T': [20.0]}, grid={'regime': 'dense', 'c': 0.05}, lattice={'rule': 0.01})
        a = run_experiment(smooth, threads=1).report
        b = run_experiment(rough, threads=1).report
        self.assertEqual(Theorem.DENSE_T3, b.theorem)
        # alpha = 1 grid discretization gap is of order sqrt(c), alpha = 2 of order c^2
        self.assertGreater(b.gap_quantile95, a.gap_quantile95)
        self.assertGreater(b.gap_quantile95, 0.0)
        self.assertLess(b.gap_quantile95, 1.0)
        self.assertLess(b.swap_defect, 0.3)
        self.assertTrue(0.0 <= b.sup_defect <= 1.0)

    def test_pickands_grid(self):
        cfg = _config(grid={'regime': 'pickands', 'a': [1.0]},
                      pickands={'source': 'literature', 'lambda': 4.0, 'step': 0.05, 'reps': 200})
        values, h_bivariate = resolve_pickands(cfg, threads=1)
        self.assertIsNotNone(values.h_a_alpha)
        self.assertIsNotNone(h_bivariate)
        result = run_experiment(cfg, threads=1)
        self.assertEqual(Theorem.PICKANDS_T2, result.report.theorem)
        self.assertTrue(np.all(np.isfinite(result.report.theoretical)))

    def test_estimated_constants(self):
        cfg = _config(model={'kind': 'exponential', 'dim': 1, 'alphas': [2.0]},
                      lattice={'rule': 0.5},
                      pickands={'source': 'estimated', 'lambda': 4.0, 'step': 0.05, 'reps': 200})
        values, h_bivariate = resolve_pickands(cfg, threads=1)
        self.assertEqual('estimated', values.provenance)
        self.assertIsNone(h_bivariate)
        self.assertTrue(0.4 < values.h_alpha[0] < 1.2, values.h_alpha)


class TestAcceptance(unittest.TestCase):

    def test_pass(self):
        acceptance = {'supDefectMax': 0.1, 'ksMax': 0.08, 'maxMinCorrAbsMax': 0.1}
        self.assertEqual([], check_acceptance(_report(), acceptance))

    def test_failures(self):
        failures = check_acceptance(_report(sup_defect=0.3, max_min_corr=-0.2),
                                    {'supDefectMax': 0.1, 'maxMinCorrAbsMax': 0.1})
        self.assertEqual(2, len(failures))

    def test_min_corr(self):
        self.assertEqual(1, len(check_acceptance(_report(), {'maxMinCorrMin': 0.2})))
        self.assertEqual([], check_acceptance(_report(max_min_corr=0.3), {'maxMinCorrMin': 0.2}))

    def test_auto(self):
        self.assertEqual([], check_acceptance(_report(swap_defect=0.09), {'swapDefectMax': 'auto'}))
        self.assertEqual(1, len(check_acceptance(_report(swap_defect=0.11), {'swapDefectMax': 'auto'})))

    def test_grid_ks(self):
        report = _report(ks={'maxCont': 0.02, 'maxGrid': 0.2, 'minCont': 0.02, 'minGrid': 0.03})
        self.assertEqual([], check_acceptance(report, {'ksMax': 0.08}))
        self.assertEqual(1, len(check_acceptance(report, {'ksGridMax': 0.08})))


class TestTailValidation(unittest.TestCase):

    def test_four_points(self):
        result = tail_validation(CovarianceModel(1, [1.0]), 12.0, 4.0, 4.5)
        self.assertEqual(4, result.points)
        self.assertTrue(0.95 <= result.ratio_count <= 1.05, result.ratio_count)
        self.assertAlmostEqual(result.ratio_count * 4.0 / 3.0, result.ratio_length, places=12)

    def test_correlated_points(self):
        result = tail_validation(CovarianceModel(1, [1.0]), 0.3, 0.1, 4.0)
        self.assertEqual(4, result.points)
        self.assertLess(result.ratio_count, 1.0)
        self.assertGreater(result.exact, result.psi)

    def test_two_dim(self):
        result = tail_validation(CovarianceModel(2, [1.0]), [4.0, 4.0], [4.0, 4.0], 4.5)
        self.assertEqual(4, result.points)
        self.assertTrue(0.95 <= result.ratio_count <= 1.05, result.ratio_count)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            tail_validation(CovarianceModel(1, [1.0]), 12.0, 4.0, 2.0)
        with self.assertRaises(ValueError):
            tail_validation(CovarianceModel(1, [1.0]), 28.0, 4.0, 4.5)


class TestConvergence(unittest.TestCase):

    def test_ladder(self):
        study = convergence_study(_config(), [20.0, 40.0, 80.0], threads=1)
        self.assertEqual(3, len(study.rows))
        self.assertEqual((80.0,), study.rows[-1].extent)
        self.assertTrue(-1.0 <= study.kendall_tau <= 1.0)
        self.assertEqual(3, len(study.to_dict()['rows']))
        self.assertTrue(0 <= study.ks_nonincreasing() <= 2)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            convergence_study(_config(), [20.0, 40.0])
        with self.assertRaises(ValueError):
            convergence_study(_config(), [20.0, 80.0, 40.0])


@unittest.skipUnless(SLOW, 'set FIELDEX_SLOW_TESTS=1')
class TestAcceptanceRuns(unittest.TestCase):

    def _run(self, name):
        cfg = load_experiment(name)
        result = run_experiment(cfg)
        failures = check_acceptance(result.report, cfg.acceptance)
        self.assertEqual([], failures)
        return result

    def test_r0_sparse(self):
        self._run('r0_sparse_d1')

    def test_mixture_r2(self):
        self._run('mixture_r2_d1')

    def test_dense(self):
        self._run('dense_d1')

    def test_dense_smooth(self):
        self._run('dense_smooth_d1')

    def test_pickands(self):
        self._run('pickands_d1')

    def test_convergence(self):
        cfg = ExperimentConfig.from_dict(dict(SMALL, reps=2000))
        study = convergence_study(cfg, [250.0, 1000.0, 4000.0])
        self.assertGreaterEqual(study.ks_nonincreasing('maxCont'), 1)
