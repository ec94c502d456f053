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

from pyfieldex.config import resolve_threads
from pyfieldex.pickands import PickandsConfig, estimate_h_alpha, estimate_h_a_alpha, \
    estimate_h_bivariate, estimate_extrapolated
import json
import sys


def parser_config(p):
    """Estimate a Pickands constant by Monte Carlo.

    For example:
        python -m pyfieldex pickands --alpha 2 --lambda 64 --step 0.01 --reps 20000 --seed 7
    """
    p.add_argument('--alpha',
                   type=float,
                   required=True,
                   help='The exponent alpha in (0, 2].')
    p.add_argument('--lambda',
                   dest='lam',
                   type=float,
                   default=128.0,
                   help='The window length lambda.')
    p.add_argument('--step',
                   type=float,
                   default=0.01,
                   help='The fine lattice step.')
    p.add_argument('--reps',
                   type=int,
                   default=20000,
                   help='The number of Monte Carlo paths.')
    p.add_argument('--seed',
                   type=int,
                   default=0,
                   help='The 64-bit seed.')
    p.add_argument('--a',
                   type=float,
                   default=0.0,
                   help='The grid spacing a.  0 (default) selects the continuous constant.')
    p.add_argument('--x',
                   type=float,
                   help='The grid offset x of the bivariate constant.')
    p.add_argument('--y',
                   type=float,
                   help='The continuous offset y of the bivariate constant.')
    p.add_argument('--estimator',
                   choices=['shift', 'plain'],
                   default='shift',
                   help='The Monte Carlo estimator.')
    p.add_argument('--shifts',
                   type=int,
                   default=4,
                   help='The shift draws per path for the shift estimator.')
    p.add_argument('--extrapolate',
                   type=float,
                   nargs='+',
                   help='Estimate at these lattice steps and extrapolate to step 0.')
    p.add_argument('--threads',
                   type=int,
                   help='The worker count.  Defaults to FIELDEX_THREADS, then the physical core count.')
    p.add_argument('--out', '-o',
                   help='The output JSON file.  Defaults to stdout.')
    return on_cmd


def on_cmd(args):
    threads = resolve_threads(args.threads)
    cfg = PickandsConfig(
        alphas=[args.alpha],
        lambdas=[args.lam],
        fine_step=args.step,
        grid_a=[args.a],
        reps=args.reps,
        seed=args.seed,
        estimator=args.estimator,
        shifts_per_path=args.shifts,
    )
    bivariate = args.x is not None or args.y is not None
    if bivariate and args.a <= 0:
        raise ValueError('--x and --y require --a > 0')
    if args.extrapolate:
        fit, estimates = estimate_extrapolated(cfg, args.extrapolate, threads)
        result = {'extrapolation': fit.to_dict(), 'estimates': [e.to_dict() for e in estimates]}
    elif bivariate:
        x = 0.0 if args.x is None else args.x
        y = 0.0 if args.y is None else args.y
        result = estimate_h_bivariate(cfg, x, y, threads).to_dict()
    elif args.a > 0:
        result = estimate_h_a_alpha(cfg, threads).to_dict()
    else:
        result = estimate_h_alpha(cfg, threads).to_dict()
    txt = json.dumps(result, indent=2)
    if args.out:
        with open(args.out, 'wt', encoding='utf-8') as f:
            f.write(txt + '\n')
    else:
        print(txt, file=sys.stdout)
    return 0
