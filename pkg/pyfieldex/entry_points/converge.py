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
from pyfieldex.harness import convergence_study, KS_NAMES
from pyfieldex.manifest import write_rows_csv
import sys


def parser_config(p):
    """Run an experiment over a ladder of domain sizes.

    For example:
        python -m pyfieldex converge r0_sparse_d1.json --ladder 250 1000 4000
    """
    p.add_argument('config',
                   help='The experiment JSON file or the name of a bundled configuration.')
    p.add_argument('--ladder',
                   type=float,
                   nargs='+',
                   required=True,
                   help='The non-decreasing domain sizes T (applied to every axis).')
    p.add_argument('--threads',
                   type=int,
                   help='The worker count.')
    p.add_argument('--out', '-o',
                   help='The output CSV file.  Defaults to stdout.')
    return on_cmd


def on_cmd(args):
    cfg = load_experiment(args.config)
    study = convergence_study(cfg, args.ladder, resolve_threads(args.threads))
    header = ['T', 'seed', 'supDefect'] + list(KS_NAMES)
    rows = [[row.extent[0], row.seed, row.sup_defect] + [row.ks[k] for k in KS_NAMES]
            for row in study.rows]
    write_rows_csv(args.out if args.out else sys.stdout, header, rows)
    print(f'# kendallTau={study.kendall_tau:.6g} p={study.kendall_p:.6g}', file=sys.stderr)
    return 0
