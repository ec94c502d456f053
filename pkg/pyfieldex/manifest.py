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

"""Run manifests and the experiment artifact writers."""

import csv
import datetime
import hashlib
import json
import logging
import os
import platform
import time
import psutil
from .version import __version__


_log = logging.getLogger(__name__)
MANIFEST_FILENAME = 'manifest.json'
EXTREMES_FILENAME = 'extremes.csv'
REPORT_FILENAME = 'report.json'
META_FILENAME = 'meta.json'
EXTREMES_HEADER = ['rep', 'seed', 'mCont', 'mGrid', 'minCont', 'minGrid',
                   'mContNorm', 'mGridNorm', 'minContNorm', 'minGridNorm']


def fmt(x):
    """Format a number with 17 significant digits for exact round trips."""
    return f'{x:.17g}'


def git_blob_sha1(data: bytes):
    """The git object hash of a blob with this content."""
    h = hashlib.sha1()
    h.update(b'blob %d\0' % len(data))
    h.update(data)
    return h.hexdigest()


def file_sha256(path):
    h = hashlib.sha256()
    with open(path, 'rb') as f:
        for block in iter(lambda: f.read(1 << 16), b''):
            h.update(block)
    return h.hexdigest()


def system_info():
    return {
        'python': platform.python_version(),
        'platform': platform.platform(),
        'cpu_physical': psutil.cpu_count(logical=False),
        'cpu_logical': psutil.cpu_count(logical=True),
        'memory_total': psutil.virtual_memory().total,
    }


def _write_json(path, obj):
    with open(path, 'wt', encoding='utf-8') as f:
        json.dump(obj, f, indent=2, allow_nan=True)
        f.write('\n')


class RunManifest:
    """The record of one command run.

    The manifest is written when the run starts (status "running") and
    rewritten by :meth:`finalize` with the output hashes.

    :param command: The subcommand name.
    :param out_dir: The output directory.
    :param config_path: The configuration file, if any.
    :param master_seed: The master seed, if any.
    :param threads: The worker count.
    """

    def __init__(self, command, out_dir, config_path=None, master_seed=None, threads=None):
        self.command = command
        self.out_dir = out_dir
        self.config_path = config_path
        self.master_seed = master_seed
        self.threads = threads
        self.config_hash = None
        if config_path is not None and os.path.isfile(config_path):
            with open(config_path, 'rb') as f:
                self.config_hash = git_blob_sha1(f.read())
        self._t_start = None
        self.started = None
        self.wall_clock = None
        self.status = 'created'
        self.outputs = {}

    @property
    def path(self):
        return os.path.join(self.out_dir, MANIFEST_FILENAME)

    def to_dict(self):
        return {
            'command': self.command,
            'config_path': self.config_path,
            'config_sha1': self.config_hash,
            'out_dir': self.out_dir,
            'master_seed': self.master_seed,
            'threads': self.threads,
            'version': __version__,
            'started': self.started,
            'wall_clock_s': self.wall_clock,
            'status': self.status,
            'outputs': self.outputs,
            'system': system_info(),
        }

    def start(self):
        os.makedirs(self.out_dir, exist_ok=True)
        self._t_start = time.monotonic()
        self.started = datetime.datetime.now(datetime.timezone.utc).isoformat()
        self.status = 'running'
        _write_json(self.path, self.to_dict())
        return self

    def finalize(self, outputs, status='ok'):
        """Record the output hashes and the final status.

        :param outputs: The list of output file paths.
        :param status: The final status string.
        """
        self.outputs = {os.path.basename(p): file_sha256(p) for p in outputs}
        self.status = status
        if self._t_start is not None:
            self.wall_clock = time.monotonic() - self._t_start
        _write_json(self.path, self.to_dict())
        _log.info('manifest %s: %s', self.path, status)


def write_outputs(result, out_dir):
    """Write extremes.csv, report.json and meta.json.

    Files are written under temporary names and renamed once all are
    complete, so a failed run never leaves partial artifacts.

    :param result: The :class:`pyfieldex.harness.ExperimentResult`.
    :param out_dir: The output directory.
    :return: The list of written paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    targets = [os.path.join(out_dir, f) for f in (EXTREMES_FILENAME, REPORT_FILENAME, META_FILENAME)]
    tmp = [p + '.tmp' for p in targets]
    try:
        with open(tmp[0], 'wt', newline='', encoding='utf-8') as f:
            w = csv.writer(f)
            w.writerow(EXTREMES_HEADER)
            for record, norm in zip(result.records, result.normalized):
                w.writerow([record.rep, record.seed]
                           + [fmt(v) for v in (record.m_cont, record.m_grid, record.min_cont, record.min_grid)]
                           + [fmt(v) for v in norm])
        _write_json(tmp[1], result.report.to_dict())
        _write_json(tmp[2], result.meta)
        for src, dst in zip(tmp, targets):
            os.replace(src, dst)
    finally:
        for p in tmp:
            if os.path.exists(p):
                os.remove(p)
    return targets


def write_rows_csv(path_or_file, header, rows):
    """Write numeric rows as CSV with round-trip formatting."""
    def cell(v):
        return fmt(v) if isinstance(v, float) else v

    if hasattr(path_or_file, 'write'):
        w = csv.writer(path_or_file, lineterminator='\n')
        w.writerow(header)
        for row in rows:
            w.writerow([cell(v) for v in row])
        return
    with open(path_or_file, 'wt', newline='', encoding='utf-8') as f:
        write_rows_csv(f, header, rows)
