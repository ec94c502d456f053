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

from pyfieldex.covmodels import CovarianceModel
from pyfieldex.harness import tail_validation
import json


NAME = 'tail-check'


def parser_config(p):
    """Compare the exact grid-maximum tail with the count times Psi(u).

    For example:
        python -m pyfieldex tail-check --alpha 1 --S 12 --delta 4 --u 4.5
    """
    p.add_argument('--alpha',
                   type=float,
                   default=1.0,
                   help='The exponent of the exponential-power covariance.')
    p.add_argument('--kind',
                   default='exponential',
                   choices=['exponential', 'gneiting'],
                   help='The covariance family.')
    p.add_argument('--beta',
                   type=float,
                   default=1.0,
                   help='The Gneiting tail parameter.')
    p.add_argument('--S',
                   dest='S',
                   type=float,
                   required=True,
                   help='The window length.')
    p.add_argument('--delta',
                   type=float,
                   required=True,
                   help='The grid spacing.')
    p.add_argument('--u',
                   type=float,
                   default=4.5,
                   help='The level u >= 3.')
    return on_cmd


def on_cmd(args):
    params = {'beta': args.beta} if args.kind == 'gneiting' else {}
    model = CovarianceModel(1, [args.alpha], args.kind, params)
    result = tail_validation(model, args.S, args.delta, args.u)
    print(json.dumps(result.to_dict(), indent=2))
    return 0
