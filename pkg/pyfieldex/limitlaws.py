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
Joint limit laws of continuous and grid maxima and minima.

Each law is the normal mixture

    P = integral bracket(z) * factor(z) dPhi(z)

where, with s = r + sqrt(2 r) z and m = -r + sqrt(2 r) z, the bracket
1 - exp(-e^(x1+s)) - exp(-e^(y1+s)) + exp(-U_min) holds the minima and
the factor exp(-U_max) holds the maxima.  U is the intensity of the union
of the continuous and grid exceedances:

* sparse grids: the two exceedances are asymptotically disjoint.
* Pickands grids: the joint exceedance intensity H^{.,.} is subtracted.
* dense grids: the exceedances coincide.

For r = 0 the integrand does not depend on z and the law factorizes.
"""

from dataclasses import dataclass
import enum
import logging
import math
import threading
import numpy as np
import scipy.integrate
import scipy.stats
from .errors import ConfigurationError
from .grids import GridRegime
from .rng import generator, Stream


_log = logging.getLogger(__name__)
EXP_CLAMP = 700.0
HERMITE_NODES = 200
HERMITE_CHECK_NODES = 150
HERMITE_TOLERANCE = 1e-9
QUAD_LIMIT = 12.0
CACHE_RESOLUTION = 0.05


class Theorem(enum.Enum):
    SPARSE_T1 = 'sparse'
    PICKANDS_T2 = 'pickands'
    DENSE_T3 = 'dense'

    @staticmethod
    def for_regime(regime: GridRegime):
        return Theorem(GridRegime(regime).value)

    @staticmethod
    def parse(value):
        """Parse 1, 2, 3, 'sparse', 'pickands' or 'dense'."""
        if isinstance(value, Theorem):
            return value
        by_number = {'1': Theorem.SPARSE_T1, '2': Theorem.PICKANDS_T2, '3': Theorem.DENSE_T3}
        key = str(value).strip().lower()
        if key in by_number:
            return by_number[key]
        try:
            return Theorem(key)
        except ValueError:
            raise ConfigurationError(f'unknown theorem {value!r}')


@dataclass(frozen=True)
class LimitParams:
    """The parameters of one limit law.

    :param theorem: The :class:`Theorem` matching the grid regime.
    :param r: The long-range dependence limit r >= 0.
    :param h_const: prod(H_alpha_i).
    :param h_grid_const: prod(H_a_i,alpha_i), Pickands grids only.
    :param h_bivariate: Pickands grids only, the callable
        h(x, y) = H^{.,.}_a,alpha where x offsets the continuous maximum
        and y offsets the grid maximum.
    """
    theorem: Theorem
    r: float = 0.0
    h_const: float = 1.0
    h_grid_const: float = None
    h_bivariate: object = None

    def __post_init__(self):
        object.__setattr__(self, 'theorem', Theorem.parse(self.theorem))
        r = float(self.r)
        if not (math.isfinite(r) and r >= 0):
            raise ValueError(f'r must be >= 0, got {self.r}')
        object.__setattr__(self, 'r', r)
        if not self.h_const > 0:
            raise ConfigurationError(f'h_const must be positive, got {self.h_const}')
        if self.h_grid_const is not None:
            if not 0 < self.h_grid_const <= self.h_const * (1.0 + 1e-9):
                raise ConfigurationError(
                    f'h_grid_const must be in (0, h_const], got {self.h_grid_const}')

    def require(self):
        if self.theorem == Theorem.PICKANDS_T2:
            if self.h_bivariate is None:
                raise ConfigurationError('pickands grid limit requires the bivariate constant')
            if self.h_grid_const is None:
                raise ConfigurationError('pickands grid limit requires prod(H_a,alpha)')


def _exp(v):
    return np.exp(np.clip(v, -EXP_CLAMP, EXP_CLAMP))


def _correction(p, x, y):
    """H at (x + log prod H_alpha, y + log prod H_a,alpha), 0 when a threshold is infinite."""
    if not (math.isfinite(x) and math.isfinite(y)):
        return 0.0
    return float(p.h_bivariate(x + math.log(p.h_const), y + math.log(p.h_grid_const)))


class _Integrand:
    """bracket(z) * factor(z) with z-independent terms precomputed."""

    def __init__(self, p: LimitParams, x1, y1, x2, y2):
        p.require()
        self.p = p
        self.args = (float(x1), float(y1), float(x2), float(y2))
        self.sqrt_2r = math.sqrt(2.0 * p.r)
        x1, y1, x2, y2 = self.args
        self.h_min = 0.0
        self.h_max = 0.0
        if p.theorem == Theorem.PICKANDS_T2:
            self.h_min = _correction(p, -x1, -y1)
            self.h_max = _correction(p, x2, y2)

    def bracket(self, z):
        x1, y1, _, _ = self.args
        s = self.p.r + self.sqrt_2r * np.asarray(z, dtype=float)
        ex = _exp(x1 + s)
        ey = _exp(y1 + s)
        theorem = self.p.theorem
        if theorem == Theorem.SPARSE_T1:
            union = ex + ey
        elif theorem == Theorem.PICKANDS_T2:
            union = ex + ey - self.h_min * _exp(s)
        else:
            union = _exp(max(x1, y1) + s)
        return 1.0 - np.exp(-ex) - np.exp(-ey) + np.exp(-union)

    def factor(self, z):
        _, _, x2, y2 = self.args
        m = -self.p.r + self.sqrt_2r * np.asarray(z, dtype=float)
        theorem = self.p.theorem
        if theorem == Theorem.SPARSE_T1:
            union = _exp(-x2 + m) + _exp(-y2 + m)
        elif theorem == Theorem.PICKANDS_T2:
            union = _exp(-x2 + m) + _exp(-y2 + m) - self.h_max * _exp(m)
        else:
            union = _exp(-min(x2, y2) + m)
        return np.exp(-union)

    def __call__(self, z):
        return self.bracket(z) * self.factor(z)


_HERMITE = {}
_HERMITE_LOCK = threading.Lock()


def _hermite(count):
    with _HERMITE_LOCK:
        rule = _HERMITE.get(count)
        if rule is None:
            w, weights = np.polynomial.hermite.hermgauss(count)
            rule = (math.sqrt(2.0) * w, weights / math.sqrt(math.pi))
            _HERMITE[count] = rule
        return rule


def normal_expectation(fn, r, force_quadrature=False):
    """Compute E fn(Z) for a standard normal Z.

    :param fn: The vectorized integrand in z.
    :param r: The long-range limit.  When 0 the integrand is assumed
        constant in z and is evaluated at z = 0.
    :param force_quadrature: True to integrate even when r = 0.
    :return: The expectation.
    """
    if r == 0 and not force_quadrature:
        return float(fn(np.zeros(1))[0])
    z, w = _hermite(HERMITE_NODES)
    value = float(np.dot(w, fn(z)))
    z_check, w_check = _hermite(HERMITE_CHECK_NODES)
    check = float(np.dot(w_check, fn(z_check)))
    if abs(value - check) <= HERMITE_TOLERANCE:
        return value
    _log.debug('Gauss-Hermite disagreement %.3g, using adaptive quadrature', abs(value - check))
    value, _ = scipy.integrate.quad(lambda t: float(fn(np.array([t]))[0]) * scipy.stats.norm.pdf(t),
                                    -QUAD_LIMIT, QUAD_LIMIT, limit=400, epsabs=1e-11, epsrel=1e-10)
    return float(value)


def _probability(value, label):
    if value < -1e-12 or value > 1.0 + 1e-12:
        _log.warning('%s value %.6g clamped to [0, 1]', label, value)
    return min(1.0, max(0.0, value))


def joint_cdf(p: LimitParams, x1, y1, x2, y2):
    """The limit of P(M <= u, m <= v) for normalized arguments.

    :param p: The :class:`LimitParams`.
    :param x1: The continuous minimum argument.
    :param y1: The grid minimum argument.
    :param x2: The continuous maximum argument.
    :param y2: The grid maximum argument.
    :return: The probability in [0, 1].  Arguments may be infinite.
    :raise ConfigurationError: For Pickands grids without constants.
    """
    fn = _Integrand(p, x1, y1, x2, y2)
    return _probability(normal_expectation(fn, p.r), 'joint_cdf')


def marginal_max_cdf(p: LimitParams, x2, y2):
    """The limit of P(M_T <= u_T(x2), M_T^delta <= u_T^delta(y2))."""
    fn = _Integrand(p, -math.inf, -math.inf, x2, y2)
    return _probability(normal_expectation(fn.factor, p.r), 'marginal_max_cdf')


def marginal_min_cdf(p: LimitParams, x1, y1):
    """The limit of P(m_T <= v_T(x1), m_T^delta <= v_T^delta(y1))."""
    fn = _Integrand(p, x1, y1, math.inf, math.inf)
    return _probability(normal_expectation(fn.bracket, p.r), 'marginal_min_cdf')


def band_cdf(p: LimitParams, x1, y1, x2, y2):
    """The limit of P(m > v, M <= u) by inclusion-exclusion."""
    inf = math.inf
    value = (marginal_max_cdf(p, x2, y2)
             - joint_cdf(p, x1, inf, x2, y2)
             - joint_cdf(p, inf, y1, x2, y2)
             + joint_cdf(p, x1, y1, x2, y2))
    return _probability(value, 'band_cdf')


def check_factorization_r0(p: LimitParams, grid_of_args):
    """Measure the max-min factorization defect at r = 0.

    :param p: The :class:`LimitParams` with r = 0.
    :param grid_of_args: The iterable of (x1, y1, x2, y2).
    :return: max |joint - max part * min part| with the joint integrated
        by quadrature.
    :raise ValueError: If r != 0.
    """
    if p.r != 0:
        raise ValueError(f'factorization holds at r = 0, got r = {p.r}')
    defect = 0.0
    z0 = np.zeros(1)
    for x1, y1, x2, y2 in grid_of_args:
        fn = _Integrand(p, x1, y1, x2, y2)
        joint = normal_expectation(fn, 0.0, force_quadrature=True)
        product = float(fn.bracket(z0)[0]) * float(fn.factor(z0)[0])
        defect = max(defect, abs(joint - product))
    return defect


def gumbel_mixture_cdf(x, r=0.0):
    """The limit law of a normalized maximum: E exp(-e^(-x - r + sqrt(2r) Z))."""
    c = math.sqrt(2.0 * r)
    return normal_expectation(lambda z: np.exp(-_exp(-x - r + c * z)), r)


def reflected_gumbel_mixture_cdf(x, r=0.0):
    """The limit law of a normalized minimum: 1 - E exp(-e^(x + r + sqrt(2r) Z))."""
    c = math.sqrt(2.0 * r)
    return normal_expectation(lambda z: 1.0 - np.exp(-_exp(x + r + c * z)), r)


def continuous_two_sided_cdf(r, x1, x2):
    """The joint limit of the continuous maximum and minimum alone."""
    c = math.sqrt(2.0 * r)

    def fn(z):
        return (1.0 - np.exp(-_exp(x1 + r + c * z))) * np.exp(-_exp(-x2 - r + c * z))

    return _probability(normal_expectation(fn, r), 'continuous_two_sided_cdf')


def marginal_max_cdf_mc(p: LimitParams, x2, y2, draws, seed=0, batch=1_000_000):
    """Monte Carlo z-sampling oracle for :func:`marginal_max_cdf`.

    :return: (value, stderr).
    """
    draws = int(draws)
    if draws < 2:
        raise ValueError('draws must be at least 2')
    fn = _Integrand(p, -math.inf, -math.inf, x2, y2)
    rng = generator(seed, 0, Stream.ORACLE)
    total = 0.0
    total_sq = 0.0
    remaining = draws
    while remaining:
        n = min(batch, remaining)
        v = fn.factor(rng.standard_normal(n))
        total += float(np.sum(v))
        total_sq += float(np.sum(v * v))
        remaining -= n
    mean = total / draws
    var = max(total_sq / draws - mean * mean, 0.0) * draws / (draws - 1)
    return mean, math.sqrt(var / draws)


class BivariateCache:
    """Thread-safe cache of a bivariate constant keyed by rounded arguments.

    :param fn: The callable fn(x, y) to cache.
    :param resolution: The rounding grid.  The callable is always invoked
        at the rounded arguments, so values do not depend on fill order.
    """

    def __init__(self, fn, resolution=CACHE_RESOLUTION):
        self._fn = fn
        self._resolution = float(resolution)
        self._lock = threading.Lock()
        self._values = {}
        self.hits = 0
        self.misses = 0

    def _round(self, v):
        v = float(v)
        if not math.isfinite(v):
            return v
        return round(round(v / self._resolution) * self._resolution, 10)

    def __call__(self, x, y):
        key = (self._round(x), self._round(y))
        with self._lock:
            if key in self._values:
                self.hits += 1
                return self._values[key]
            self.misses += 1
            value = float(self._fn(*key))
            _log.debug('bivariate cache fill %s = %g', key, value)
            self._values[key] = value
            return value

    def __len__(self):
        with self._lock:
            return len(self._values)


def bivariate_from_sample(sample):
    """Adapt a pickands.BivariateSample to the :class:`LimitParams` convention.

    The sample evaluates with the grid offset first, while LimitParams
    passes the continuous offset first.
    """
    return lambda x_cont, y_grid: sample.evaluate(y_grid, x_cont)
