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

from pyfieldex.config import load_experiment, resolve_threads
from pyfieldex.harness import run_experiment, check_acceptance
from pyfieldex.manifest import RunManifest, write_outputs
import logging
import os


_log = logging.getLogger(__name__)


def parser_config(p):
    """Run an experiment and check it against the limit law.

    Writes manifest.json, extremes.csv, report.json and meta.json.
    Exits 1 when an acceptance threshold fails.  For example:
        python -m pyfieldex verify r0_sparse_d1.json --out ./fieldex_out
    """
    p.add_argument('config',
                   help='The experiment JSON file or the name of a bundled configuration.')
    p.add_argument('--out', '-o',
                   default=os.path.join('.', 'fieldex_out'),
                   help='The output directory.')
    p.add_argument('--threads',
                   type=int,
                   help='The worker count.  Defaults to FIELDEX_THREADS, then the physical core count.')
    return on_cmd


def on_cmd(args):
    cfg = load_experiment(args.config)
    threads = resolve_threads(args.threads if args.threads is not None else cfg.threads)
    manifest = RunManifest('verify', args.out, config_path=args.config,
                           master_seed=cfg.master_seed, threads=threads).start()
    try:
        result = run_experiment(cfg, threads)
        outputs = write_outputs(result, args.out)
    except Exception:
        manifest.finalize([], status='error')
        raise
    failures = check_acceptance(result.report, cfg.acceptance)
    for failure in failures:
        print(f'FAIL {failure}')
    report = result.report
    print(f'supDefect={report.sup_defect:.6f} maxMinCorr={report.max_min_corr:.6f} '
          f'KS={", ".join(f"{k}:{v:.4f}" for k, v in report.ks.items())}')
    manifest.finalize(outputs, status='failed' if failures else 'ok')
    return 1 if failures else 0
