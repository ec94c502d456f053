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

from pyfieldex.config import load_experiment
from pyfieldex.errors import ConfigurationError
from pyfieldex.fieldsim import dump_sample, load_sample
from pyfieldex.harness import build_lattice, extremes_record, grid_selector, simulate_extremes
from pyfieldex.manifest import write_rows_csv
import os
import sys


HEADER = ['rep', 'seed', 'mCont', 'mGrid', 'minCont', 'minGrid']


def parser_config(p):
    """Simulate field replications of an experiment.

    Prints the extremes of each replication as CSV and optionally saves
    each field in the binary sample format.  With --load, prints the
    extremes of previously saved samples instead.
    """
    p.add_argument('config',
                   help='The experiment JSON file or the name of a bundled configuration.')
    p.add_argument('--first',
                   type=int,
                   default=0,
                   help='The first replication index.')
    p.add_argument('--count', '-n',
                   type=int,
                   default=1,
                   help='The number of replications.')
    p.add_argument('--threads',
                   type=int,
                   help='The number of worker threads.')
    p.add_argument('--dump',
                   help='The directory for binary field samples rep_<k>.fexs.')
    p.add_argument('--load',
                   nargs='+',
                   metavar='FILE',
                   help='Binary field samples to read instead of simulating.  '
                        'The rep column is the position in this list.')
    return on_cmd


def _loaded(cfg, paths):
    lattice, grid_idx, _ = build_lattice(cfg)
    selector = grid_selector(grid_idx)
    records = []
    for k, path in enumerate(paths):
        sample = load_sample(path, step=lattice.step)
        if sample.values.shape != lattice.shape:
            raise ConfigurationError(f'{path}: sample shape {sample.values.shape} '
                                     f'does not match lattice {lattice.shape}')
        records.append(extremes_record(k, sample, selector))
    return records


def on_cmd(args):
    if args.count < 1 or args.first < 0:
        raise ValueError('--count must be positive and --first nonnegative')
    cfg = load_experiment(args.config)
    if args.load:
        records = _loaded(cfg, args.load)
    else:
        on_sample = None
        if args.dump:
            os.makedirs(args.dump, exist_ok=True)

            def on_sample(k, sample):
                dump_sample(sample, os.path.join(args.dump, f'rep_{k}.fexs'))

        records, _, _, _ = simulate_extremes(cfg, args.threads, first=args.first, count=args.count,
                                             on_sample=on_sample)
    rows = [[x.rep, x.seed, x.m_cont, x.m_grid, x.min_cont, x.min_grid] for x in records]
    write_rows_csv(sys.stdout, HEADER, rows)
    return 0
