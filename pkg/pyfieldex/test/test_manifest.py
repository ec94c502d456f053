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
Test the run manifest and artifact writers.
"""

import unittest
from pyfieldex.harness import ExperimentConfig, run_experiment
from pyfieldex.manifest import fmt, git_blob_sha1, file_sha256, RunManifest, write_outputs, \
    write_rows_csv, EXTREMES_HEADER
import csv
import io
import json
import os
import shutil
import tempfile


class TestHashes(unittest.TestCase):

    def setUp(self):
        self._tempdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self._tempdir)

    def test_fmt(self):
        self.assertEqual('0.10000000000000001', fmt(0.1))
        self.assertEqual(0.1, float(fmt(0.1)))
        self.assertEqual('-3', fmt(-3.0))

    def test_git_blob_sha1(self):
        self.assertEqual('e69de29bb2d1d6434b8b29ae775ad8c2e48c5391', git_blob_sha1(b''))
        self.assertEqual('ce013625030ba8dba906f756967f9e9ca394464a', git_blob_sha1(b'hello\n'))

    def test_file_sha256(self):
        path = os.path.join(self._tempdir, 'empty.bin')
        with open(path, 'wb'):
            pass
        self.assertEqual('e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855',
                         file_sha256(path))


class TestRunManifest(unittest.TestCase):

    def setUp(self):
        self._tempdir = tempfile.mkdtemp()
        self._out = os.path.join(self._tempdir, 'out')

    def tearDown(self):
        shutil.rmtree(self._tempdir)

    def _load(self, path):
        with open(path, 'rt') as f:
            return json.load(f)

    def test_start_and_finalize(self):
        config_path = os.path.join(self._tempdir, 'c.json')
        with open(config_path, 'wb') as f:
            f.write(b'hello\n')
        m = RunManifest('verify', self._out, config_path=config_path, master_seed=5, threads=2).start()
        d = self._load(m.path)
        self.assertEqual('running', d['status'])
        self.assertEqual('ce013625030ba8dba906f756967f9e9ca394464a', d['config_sha1'])
        self.assertEqual(5, d['master_seed'])
        self.assertIn('cpu_logical', d['system'])

        output = os.path.join(self._out, 'x.txt')
        with open(output, 'wb'):
            pass
        m.finalize([output], status='failed')
        d = self._load(m.path)
        self.assertEqual('failed', d['status'])
        self.assertEqual({'x.txt': 'e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855'},
                         d['outputs'])
        self.assertGreaterEqual(d['wall_clock_s'], 0.0)

    def test_missing_config(self):
        m = RunManifest('simulate', self._out, config_path='r0_sparse_d1.json')
        self.assertIsNone(m.config_hash)


class TestWriters(unittest.TestCase):

    def setUp(self):
        self._tempdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self._tempdir)

    def test_rows_to_file(self):
        f = io.StringIO()
        write_rows_csv(f, ['T', 'seed', 'value'], [[10.0, 3, 0.25], [20.0, 4, 1.0 / 3.0]])
        lines = f.getvalue().splitlines()
        self.assertEqual('T,seed,value', lines[0])
        self.assertEqual('10,3,0.25', lines[1])
        self.assertEqual(1.0 / 3.0, float(lines[2].split(',')[2]))

    def test_rows_to_path(self):
        path = os.path.join(self._tempdir, 'rows.csv')
        write_rows_csv(path, ['a'], [[1.5]])
        with open(path, 'rt') as f:
            self.assertEqual(['a', '1.5'], f.read().splitlines())

    def test_outputs(self):
        cfg = ExperimentConfig.from_dict({
            'model': {'kind': 'exponential', 'dim': 1, 'alphas': [1.0]},
            'domain': {'T': [30.0]},
            'grid': {'regime': 'sparse', 'delta': [3.0]},
            'lattice': {'rule': 0.5},
            'reps': 100,
            'masterSeed': 1,
            'evalPoints': [[0.0, 0.0, 0.0, 0.0]],
        })
        result = run_experiment(cfg, threads=1)
        paths = write_outputs(result, self._tempdir)
        self.assertEqual(['extremes.csv', 'report.json', 'meta.json'], [os.path.basename(p) for p in paths])
        self.assertEqual([], [p for p in os.listdir(self._tempdir) if p.endswith('.tmp')])
        with open(paths[0], 'rt', newline='') as f:
            rows = list(csv.reader(f))
        self.assertEqual(EXTREMES_HEADER, rows[0])
        self.assertEqual(101, len(rows))
        self.assertEqual(result.records[7].m_cont, float(rows[8][2]))
        with open(paths[1], 'rt') as f:
            report = json.load(f)
        self.assertEqual(result.report.sup_defect, report['supDefect'])
        self.assertEqual(1, len(report['points']))
        with open(paths[2], 'rt') as f:
            meta = json.load(f)
        self.assertEqual('sparse', meta['grid']['regime'])
        self.assertEqual([3.0], meta['grid']['delta'])
