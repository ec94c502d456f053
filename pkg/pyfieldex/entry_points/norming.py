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

from pyfieldex.grids import DomainSpec, GridSpec
from pyfieldex.norming import PickandsValues, literature_values, compute_norming, to_levels
from dataclasses import asdict
import json


def parser_config(p):
    """Compute the normalizing constants and the levels.

    For example:
        python -m pyfieldex norming --T 2000 --alpha 1 --delta 2 --x2 0
    """
    p.add_argument('--T',
                   dest='extent',
                   type=float,
                   nargs='+',
                   required=True,
                   help='The per-axis domain lengths.')
    p.add_argument('--alpha',
                   type=float,
                   nargs='+',
                   default=[1.0],
                   help='The per-axis exponents.')
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument('--delta',
                   type=float,
                   nargs='+',
                   help='Sparse grid spacings.')
    g.add_argument('--a',
                   type=float,
                   nargs='+',
                   help='Pickands grid parameters.')
    g.add_argument('--c',
                   type=float,
                   help='The dense grid factor.')
    p.add_argument('--h_alpha',
                   type=float,
                   nargs='+',
                   help='The continuous constants.  Defaults to the literature values.')
    p.add_argument('--h_a_alpha',
                   type=float,
                   nargs='+',
                   help='The discrete constants.  Defaults to the literature values.')
    for name in ['x1', 'y1', 'x2', 'y2']:
        p.add_argument(f'--{name}',
                       type=float,
                       default=0.0,
                       help=f'The limit-law argument {name}.')
    return on_cmd


def _grid(args):
    if args.delta is not None:
        return GridSpec.sparse(args.delta)
    if args.a is not None:
        return GridSpec.pickands(args.a)
    return GridSpec.dense(args.c)


def on_cmd(args):
    domain = DomainSpec(args.extent)
    grid = _grid(args)
    a = args.a
    if args.h_alpha is None:
        values = literature_values(args.alpha, a)
        if args.h_a_alpha is not None:
            values = PickandsValues(values.h_alpha, args.h_a_alpha, 'values')
    else:
        h_a_alpha = args.h_a_alpha
        if h_a_alpha is None and a is not None:
            h_a_alpha = literature_values(args.alpha, a).h_a_alpha
        values = PickandsValues(args.h_alpha, h_a_alpha, 'values')
    n = compute_norming(domain, args.alpha, grid, values)
    levels = to_levels(n, args.x1, args.y1, args.x2, args.y2)
    result = {
        'norming': n.to_dict(),
        'pickands': values.to_dict(),
        'levels': asdict(levels),
    }
    print(json.dumps(result, indent=2))
    return 0
