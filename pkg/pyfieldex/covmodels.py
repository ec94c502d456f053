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
Stationary covariance models and their numerical diagnostics.

A model r(t) has unit variance, r(t) < 1 away from the origin, the local
expansion 1 - r(t) ~ sum(|t_i|^alpha_i) and the long range limit
r(T) log(prod(T_i)) -> r.  The base families all have r = 0.  Strong
dependence (r > 0) is obtained with :class:`MixtureFieldSpec`, which mixes
a weakly dependent field with a single shared standard normal whose weight
rho(T) = r / log(prod(T_i)) depends on the domain.
"""

from dataclasses import dataclass, field
import enum
import logging
import math
import numpy as np
import scipy.linalg
from .errors import ConfigurationError
from .grids import DomainSpec


_log = logging.getLogger(__name__)
ENVELOPE_BOUNDS = (0.5, 2.0)
A3_TOLERANCE = 0.05


class CovarianceKind(enum.Enum):
    EXPONENTIAL = 'exponential'
    GNEITING = 'gneiting'
    USER_TABLE = 'table'


def _freeze(value):
    if isinstance(value, dict):
        return tuple(sorted((k, _freeze(v)) for k, v in value.items()))
    if isinstance(value, (list, tuple, np.ndarray)):
        return tuple(_freeze(v) for v in value)
    return value


@dataclass(frozen=True)
class CovarianceModel:
    """A stationary unit-variance covariance on R^d.

    :param dim: The dimension d >= 1.
    :param alphas: The local exponents alpha_i in (0, 2].
    :param kind: The :class:`CovarianceKind`.
    :param params: The family parameters.  GNEITING takes ``beta`` > 0.
        USER_TABLE takes ``lags`` and ``values`` (one shared table) or
        ``tables``, a list of per-axis {lags, values}.
    :param long_range: The declared limit r of r(T) log(prod(T_i)).

    Instances are immutable and safe to share between workers.
    """
    dim: int
    alphas: tuple
    kind: CovarianceKind = CovarianceKind.EXPONENTIAL
    params: dict = field(default_factory=dict, compare=False)
    long_range: float = 0.0
    _key: tuple = field(default=None, init=False, repr=False)
    _tables: tuple = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        kind = self.kind
        if isinstance(kind, str):
            try:
                kind = CovarianceKind(kind.lower())
            except ValueError:
                raise ConfigurationError(f'unknown covariance kind {self.kind!r}')
            object.__setattr__(self, 'kind', kind)
        dim = int(self.dim)
        if dim < 1:
            raise ConfigurationError(f'dim must be >= 1, got {self.dim}')
        object.__setattr__(self, 'dim', dim)
        alphas = np.atleast_1d(np.asarray(self.alphas, dtype=float))
        if len(alphas) == 1 and dim > 1:
            alphas = np.full(dim, alphas[0])
        if len(alphas) != dim:
            raise ConfigurationError(f'{len(alphas)} alphas given for dim {dim}')
        if np.any(alphas <= 0.0) or np.any(alphas > 2.0):
            raise ConfigurationError(f'alphas must be in (0, 2], got {alphas}')
        object.__setattr__(self, 'alphas', tuple(float(a) for a in alphas))
        if self.long_range < 0:
            raise ConfigurationError(f'long range r must be >= 0, got {self.long_range}')
        params = dict(self.params or {})
        object.__setattr__(self, 'params', params)
        if kind == CovarianceKind.GNEITING:
            beta = float(params.get('beta', 1.0))
            if beta <= 0:
                raise ConfigurationError(f'gneiting beta must be positive, got {beta}')
            params['beta'] = beta
        elif kind == CovarianceKind.USER_TABLE:
            object.__setattr__(self, '_tables', self._parse_tables(params))
        object.__setattr__(self, '_key', (kind, dim, self.alphas, _freeze(params), self.long_range))

    def _parse_tables(self, params):
        if 'tables' in params:
            tables = params['tables']
        elif 'lags' in params and 'values' in params:
            tables = [{'lags': params['lags'], 'values': params['values']}]
        else:
            raise ConfigurationError('table covariance requires "lags" and "values" or "tables"')
        if len(tables) == 1:
            tables = tables * self.dim
        if len(tables) != self.dim:
            raise ConfigurationError(f'{len(tables)} tables given for dim {self.dim}')
        result = []
        for table in tables:
            lags = np.asarray(table['lags'], dtype=float)
            values = np.asarray(table['values'], dtype=float)
            if lags.ndim != 1 or lags.shape != values.shape or len(lags) < 2:
                raise ConfigurationError('table lags and values must be matching 1-D lists')
            if lags[0] != 0.0 or values[0] != 1.0:
                raise ConfigurationError('table must start with r(0) = 1')
            if np.any(np.diff(lags) <= 0):
                raise ConfigurationError('table lags must be strictly increasing')
            if np.any(np.abs(values) > 1.0):
                raise ConfigurationError('table values must be in [-1, 1]')
            lags.setflags(write=False)
            values.setflags(write=False)
            result.append((lags, values))
        return tuple(result)

    def __eq__(self, other):
        if not isinstance(other, CovarianceModel):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @staticmethod
    def from_dict(d):
        """Construct from the JSON form, such as
        {"kind": "exponential", "dim": 1, "alphas": [1.0]}."""
        try:
            return CovarianceModel(
                dim=d['dim'],
                alphas=d['alphas'],
                kind=d.get('kind', 'exponential'),
                params=d.get('params', {}),
                long_range=float(d.get('longRange', 0.0)),
            )
        except KeyError as ex:
            raise ConfigurationError(f'covariance model missing {ex}')

    def to_dict(self):
        return {
            'kind': self.kind.value,
            'dim': self.dim,
            'alphas': list(self.alphas),
            'params': self.params,
            'longRange': self.long_range,
        }

    def evaluate(self, t):
        """Evaluate r(t).

        :param t: The lag vector of length d, or an array of lags with
            shape (..., d).
        :return: r(t) as a float for a single lag, else an array of
            shape (...).
        :raise ValueError: If the last axis of t does not match dim.
        """
        t = np.asarray(t, dtype=float)
        scalar = t.ndim <= 1
        if t.ndim == 0:
            t = t.reshape(1)
        if t.shape[-1] != self.dim:
            raise ValueError(f'lag has dimension {t.shape[-1]}, model has {self.dim}')
        a = np.abs(t)
        alphas = np.asarray(self.alphas)
        if self.kind == CovarianceKind.EXPONENTIAL:
            r = np.exp(-np.sum(a ** alphas, axis=-1))
        elif self.kind == CovarianceKind.GNEITING:
            beta = self.params['beta']
            r = np.prod((1.0 + (alphas / beta) * a ** alphas) ** (-beta / alphas), axis=-1)
        else:
            r = np.ones(a.shape[:-1])
            for i, (lags, values) in enumerate(self._tables):
                r = r * np.interp(a[..., i], lags, values, right=0.0)
        return float(r) if scalar else r


def evaluate(model: CovarianceModel, t):
    """Evaluate the model covariance r(t), see :meth:`CovarianceModel.evaluate`."""
    return model.evaluate(t)


def covariance_matrix(model, points):
    """Assemble the covariance matrix of the field at the given points.

    :param model: The :class:`CovarianceModel`.
    :param points: The (n, d) array of locations.
    :return: The symmetric (n, n) matrix.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    lags = points[:, None, :] - points[None, :, :]
    c = model.evaluate(lags)
    return 0.5 * (c + c.T)


def is_positive_semidefinite(model, points, jitter=1e-10):
    """Check the covariance matrix at points by a Cholesky attempt.

    :param model: The :class:`CovarianceModel`.
    :param points: The (n, d) array of locations.
    :param jitter: The relative diagonal loading that absorbs
        floating-point noise.
    :return: True when the factorization succeeds.
    """
    c = covariance_matrix(model, points)
    n = c.shape[0]
    try:
        scipy.linalg.cholesky(c + jitter * np.eye(n), lower=True)
        return True
    except np.linalg.LinAlgError:
        return False


@dataclass(frozen=True)
class EnvelopePoint:
    radius: float
    direction: tuple
    ratio: float
    passed: bool


@dataclass(frozen=True)
class EnvelopeReport:
    points: tuple
    bounds: tuple

    @property
    def passed(self):
        return all(p.passed for p in self.points)

    @property
    def ratios(self):
        return [p.ratio for p in self.points]


def _envelope_directions(dim):
    directions = [tuple(1.0 if j == i else 0.0 for j in range(dim)) for i in range(dim)]
    if dim >= 2:
        directions.append(tuple([1.0 / math.sqrt(dim)] * dim))
    return directions


def check_a1_envelope(model, radii, bounds=ENVELOPE_BOUNDS):
    """Compare 1 - r(t) with sum(|t_i|^alpha_i) near the origin.

    Checks each axis and, for d >= 2, the main diagonal.

    :param model: The :class:`CovarianceModel`.
    :param radii: The radii in (0, 0.5].
    :param bounds: The (low, high) acceptance envelope for the ratio.
    :return: The :class:`EnvelopeReport`.
    :raise ValueError: On a radius outside (0, 0.5].
    """
    radii = [float(r) for r in radii]
    for r in radii:
        if not 0.0 < r <= 0.5:
            raise ValueError(f'radius must be in (0, 0.5], got {r}')
    alphas = np.asarray(model.alphas)
    points = []
    for direction in _envelope_directions(model.dim):
        for radius in radii:
            t = radius * np.asarray(direction)
            denom = float(np.sum(np.abs(t) ** alphas))
            ratio = (1.0 - model.evaluate(t)) / denom
            passed = bounds[0] <= ratio <= bounds[1]
            if not passed:
                _log.info('A1 envelope violated at radius %g direction %s: ratio %g',
                          radius, direction, ratio)
            points.append(EnvelopePoint(radius, direction, ratio, passed))
    return EnvelopeReport(tuple(points), tuple(bounds))


@dataclass(frozen=True)
class MixtureFieldSpec:
    """The strongly dependent field sqrt(1 - rho) * Y + sqrt(rho) * U.

    :param base: The weakly dependent model of Y (long_range = 0).
    :param r_target: The long range limit r >= 0.
    :param domain: The :class:`DomainSpec` that sets rho(T).
    """
    base: CovarianceModel
    r_target: float
    domain: DomainSpec

    def __post_init__(self):
        if self.base.long_range != 0.0:
            raise ConfigurationError('mixture base must be weakly dependent (long range 0)')
        if self.base.dim != self.domain.dim:
            raise ConfigurationError(
                f'mixture base has dim {self.base.dim}, domain has {self.domain.dim}')
        if self.r_target < 0:
            raise ConfigurationError(f'r must be >= 0, got {self.r_target}')
        rho = self.rho
        if self.r_target > 0 and not 0.0 < rho < 1.0:
            raise ConfigurationError(
                f'mixing weight rho = {rho:g} not in (0, 1): enlarge the domain or reduce r')

    @property
    def rho(self):
        """rho(T) = r / log(prod(T_i))."""
        return self.r_target / self.domain.log_volume

    @property
    def dim(self):
        return self.base.dim

    @property
    def alphas(self):
        return self.base.alphas

    @property
    def long_range(self):
        return self.r_target

    def with_domain(self, domain):
        return MixtureFieldSpec(self.base, self.r_target, domain)

    def to_dict(self):
        d = self.base.to_dict()
        d['rTarget'] = self.r_target
        d['rho'] = self.rho
        return d

    def covariance(self, t):
        rho = self.rho
        r = self.base.evaluate(t)
        if rho == 0.0:
            return r
        return (1.0 - rho) * r + rho


def mixture_covariance(spec: MixtureFieldSpec, t):
    """Evaluate (1 - rho(T)) r_base(t) + rho(T).

    :param spec: The :class:`MixtureFieldSpec`.
    :param t: The lag vector or array of lags.
    :return: The mixture covariance.
    """
    return spec.covariance(t)


@dataclass(frozen=True)
class A3Report:
    domain_sizes: tuple
    values: tuple
    tolerance: float

    @property
    def last(self):
        return self.values[-1]

    @property
    def cauchy(self):
        tail = np.asarray(self.values[-3:])
        return bool(np.max(tail) - np.min(tail) <= self.tolerance)


def check_a3_limit(model, domain_sizes, tolerance=A3_TOLERANCE):
    """Evaluate r(T) log(prod(T_i)) along a sequence of domains.

    :param model: A :class:`CovarianceModel`, or a
        :class:`MixtureFieldSpec` which is re-instantiated at each domain.
    :param domain_sizes: The increasing list of T vectors (or scalars
        applied to every axis), all T_i > 1.
    :param tolerance: The Cauchy tolerance over the last three values.
    :return: The :class:`A3Report`.
    """
    sizes = []
    values = []
    for size in domain_sizes:
        t = np.atleast_1d(np.asarray(size, dtype=float))
        if len(t) == 1 and model.dim > 1:
            t = np.full(model.dim, t[0])
        domain = DomainSpec(tuple(t))
        if isinstance(model, MixtureFieldSpec):
            r = model.with_domain(domain).covariance(t)
        else:
            r = model.evaluate(t)
        sizes.append(tuple(t))
        values.append(float(r) * domain.log_volume)
    if not values:
        raise ValueError('domain_sizes must not be empty')
    return A3Report(tuple(sizes), tuple(values), float(tolerance))


def model_from_dict(d, domain=None):
    """Construct a model from the configuration JSON.

    :param d: The model dict.  A positive ``rTarget`` produces a
        :class:`MixtureFieldSpec`, which requires the domain.
    :param domain: The :class:`DomainSpec` for mixtures.
    :return: The :class:`CovarianceModel` or :class:`MixtureFieldSpec`.
    """
    model = CovarianceModel.from_dict(d)
    r_target = float(d.get('rTarget', 0.0))
    if r_target < 0:
        raise ConfigurationError(f'rTarget must be >= 0, got {r_target}')
    if r_target == 0.0:
        return model
    if domain is None:
        raise ConfigurationError('a mixture model requires a domain')
    return MixtureFieldSpec(model, r_target, domain)
