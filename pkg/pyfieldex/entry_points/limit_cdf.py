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

from pyfieldex.config import load_json, resolve_threads
from pyfieldex.errors import ConfigurationError
from pyfieldex.limitlaws import Theorem, LimitParams, BivariateCache, bivariate_from_sample, joint_cdf
from pyfieldex.manifest import write_rows_csv
from pyfieldex.norming import PickandsValues
from pyfieldex.pickands import PickandsConfig, sample_bivariate
import itertools
import sys


NAME = 'limit-cdf'
HEADER = ['theorem', 'r', 'x1', 'y1', 'x2', 'y2', 'value']


def parser_config(p):
    """Evaluate the joint limit law of maxima and minima.

    The argument lists form a Cartesian product.  For example:
        python -m pyfieldex limit-cdf --theorem 1 --r 0 --x1 0 --y1 0 --x2 0 --y2 0
    """
    p.add_argument('--theorem',
                   required=True,
                   choices=['1', '2', '3'],
                   help='1 sparse, 2 Pickands or 3 dense grids.')
    p.add_argument('--r',
                   type=float,
                   default=0.0,
                   help='The long range dependence limit r >= 0.')
    for name, label in [('x1', 'continuous minimum'), ('y1', 'grid minimum'),
                        ('x2', 'continuous maximum'), ('y2', 'grid maximum')]:
        p.add_argument(f'--{name}',
                       type=float,
                       nargs='+',
                       default=[0.0],
                       help=f'The {label} arguments.')
    p.add_argument('--constants',
                   help='The JSON constants file with h_alpha, h_a_alpha and the bivariate '
                        'Monte Carlo settings {a, lambda, step, reps, seed}.  Required for theorem 2.')
    p.add_argument('--threads',
                   type=int,
                   help='The worker count for bivariate constant estimation.')
    p.add_argument('--out', '-o',
                   help='The output CSV file.  Defaults to stdout.')
    return on_cmd


def _params(args):
    theorem = Theorem.parse(args.theorem)
    if args.constants is None:
        if theorem == Theorem.PICKANDS_T2:
            raise ConfigurationError('theorem 2 requires --constants')
        return LimitParams(theorem, r=args.r)
    d = load_json(args.constants)
    values = PickandsValues(d.get('h_alpha', [1.0]), d.get('h_a_alpha'), 'values')
    dim = max(len(values.h_alpha), len(values.h_a_alpha or []), len(d.get('alphas', [1.0])))
    h_bivariate = None
    h_grid = None
    if theorem == Theorem.PICKANDS_T2:
        h_grid = values.grid_product(dim)
        b = d.get('bivariate')
        if b is None:
            raise ConfigurationError('theorem 2 constants require "bivariate"')
        cfg = PickandsConfig(
            alphas=d.get('alphas', [1.0]),
            lambdas=[float(b.get('lambda', 16.0))],
            fine_step=float(b.get('step', 0.01)),
            grid_a=b['a'],
            reps=int(b.get('reps', 4000)),
            seed=int(b.get('seed', 0)),
        )
        sample = sample_bivariate(cfg, resolve_threads(args.threads))
        h_bivariate = BivariateCache(bivariate_from_sample(sample))
    return LimitParams(theorem, r=args.r, h_const=values.product(dim),
                       h_grid_const=h_grid, h_bivariate=h_bivariate)


def on_cmd(args):
    params = _params(args)
    rows = []
    for x1, y1, x2, y2 in itertools.product(args.x1, args.y1, args.x2, args.y2):
        value = joint_cdf(params, x1, y1, x2, y2)
        rows.append([args.theorem, params.r, x1, y1, x2, y2, value])
    if args.out:
        write_rows_csv(args.out, HEADER, rows)
    else:
        write_rows_csv(sys.stdout, HEADER, rows)
    return 0
