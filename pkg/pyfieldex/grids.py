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
Observation domains and the three uniform grid regimes.

The grid along axis i is {k * delta_i, k = 0, 1, ...}.  With
u = sqrt(2 log prod(T_i)), the regime is classified by the limit of
delta_i * u^(2 / alpha_i):

* sparse: the limit is infinite (fixed delta_i).
* pickands: the limit is a_i in (0, inf).
* dense: the limit is 0, realized here by delta_i = c * u^(-2 / alpha_i)
  with a fixed small c.

All axes share one regime.
"""

from dataclasses import dataclass
import enum
import math
import numpy as np
from .errors import ConfigurationError


DENSE_FACTOR_MAX = 0.2


def _vector(value, name):
    if value is None:
        return None
    if np.isscalar(value):
        value = [value]
    v = tuple(float(x) for x in value)
    if not len(v):
        raise ConfigurationError(f'{name} must not be empty')
    return v


def _broadcast(v, dim, name):
    if len(v) == dim:
        return np.array(v, dtype=float)
    if len(v) == 1:
        return np.full(dim, v[0], dtype=float)
    raise ConfigurationError(f'{name} has length {len(v)}, expected 1 or {dim}')


@dataclass(frozen=True)
class DomainSpec:
    """The observation domain prod([0, T_i]).

    :param extent: The per-axis lengths T_i > 1.
    """
    extent: tuple

    def __post_init__(self):
        extent = _vector(self.extent, 'extent')
        if extent is None:
            raise ConfigurationError('extent required')
        if any(not math.isfinite(t) or t <= 1.0 for t in extent):
            raise ConfigurationError(f'domain extent must be > 1, got {extent}')
        object.__setattr__(self, 'extent', extent)

    @property
    def dim(self):
        return len(self.extent)

    @property
    def log_volume(self):
        """log(prod(T_i))."""
        return float(sum(math.log(t) for t in self.extent))

    @property
    def a_t(self):
        """sqrt(2 log(prod(T_i)))."""
        return math.sqrt(2.0 * self.log_volume)

    def with_extent(self, extent):
        if np.isscalar(extent):
            extent = [extent] * self.dim
        return DomainSpec(tuple(extent))

    @staticmethod
    def from_dict(d, dim=None):
        t = d.get('T', d.get('extent'))
        if t is None:
            raise ConfigurationError('domain requires "T"')
        t = _vector(t, 'T')
        if dim is not None and len(t) == 1 and dim > 1:
            t = t * dim
        return DomainSpec(t)

    def to_dict(self):
        return {'T': list(self.extent)}


class GridRegime(enum.Enum):
    SPARSE = 'sparse'
    PICKANDS = 'pickands'
    DENSE = 'dense'


@dataclass(frozen=True)
class GridSpec:
    """A uniform grid regime with its parameters.

    Exactly the field that matches the regime must be provided:

    * SPARSE: ``sparse_spacings`` (fixed delta_i > 0).
    * PICKANDS: ``d_params`` (a_i > 0).
    * DENSE: ``dense_factor`` (c in (0, 0.2]).
    """
    regime: GridRegime
    d_params: tuple = None
    sparse_spacings: tuple = None
    dense_factor: float = None

    def __post_init__(self):
        regime = self.regime
        if isinstance(regime, str):
            try:
                regime = GridRegime(regime.lower())
            except ValueError:
                raise ConfigurationError(f'unknown grid regime {self.regime!r}')
            object.__setattr__(self, 'regime', regime)
        d_params = _vector(self.d_params, 'a')
        spacings = _vector(self.sparse_spacings, 'delta')
        object.__setattr__(self, 'd_params', d_params)
        object.__setattr__(self, 'sparse_spacings', spacings)
        present = {
            GridRegime.PICKANDS: d_params is not None,
            GridRegime.SPARSE: spacings is not None,
            GridRegime.DENSE: self.dense_factor is not None,
        }
        for r, is_present in present.items():
            if r == regime and not is_present:
                raise ConfigurationError(f'{regime.value} grid is missing its parameters')
            if r != regime and is_present:
                raise ConfigurationError(f'{regime.value} grid given {r.value} parameters')
        if regime == GridRegime.PICKANDS and any(a <= 0 or not math.isfinite(a) for a in d_params):
            raise ConfigurationError(f'pickands a must be positive, got {d_params}')
        if regime == GridRegime.SPARSE and any(s <= 0 or not math.isfinite(s) for s in spacings):
            raise ConfigurationError(f'sparse delta must be positive, got {spacings}')
        if regime == GridRegime.DENSE:
            c = float(self.dense_factor)
            if not 0.0 < c <= DENSE_FACTOR_MAX:
                raise ConfigurationError(f'dense factor must be in (0, {DENSE_FACTOR_MAX}], got {c}')
            object.__setattr__(self, 'dense_factor', c)

    @staticmethod
    def sparse(delta):
        return GridSpec(GridRegime.SPARSE, sparse_spacings=delta)

    @staticmethod
    def pickands(a):
        return GridSpec(GridRegime.PICKANDS, d_params=a)

    @staticmethod
    def dense(c):
        return GridSpec(GridRegime.DENSE, dense_factor=c)

    @staticmethod
    def from_dict(d):
        regime = d.get('regime')
        if regime is None:
            raise ConfigurationError('grid requires "regime"')
        return GridSpec(regime,
                        d_params=d.get('a'),
                        sparse_spacings=d.get('delta'),
                        dense_factor=d.get('c'))

    def to_dict(self):
        d = {'regime': self.regime.value}
        if self.d_params is not None:
            d['a'] = list(self.d_params)
        if self.sparse_spacings is not None:
            d['delta'] = list(self.sparse_spacings)
        if self.dense_factor is not None:
            d['c'] = self.dense_factor
        return d


def spacings(grid: GridSpec, domain: DomainSpec, alphas):
    """Compute the grid spacings delta_i.

    :param grid: The grid regime.
    :param domain: The observation domain.
    :param alphas: The local exponents alpha_i in (0, 2].
    :return: The array of delta_i.
    :raise ConfigurationError: On regime parameters that do not match
        the dimension.
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    if np.any(alphas <= 0) or np.any(alphas > 2):
        raise ValueError(f'alphas must be in (0, 2], got {alphas}')
    dim = domain.dim
    if len(alphas) == 1 and dim > 1:
        alphas = np.full(dim, alphas[0])
    if len(alphas) != dim:
        raise ConfigurationError(f'alphas has length {len(alphas)}, domain has dimension {dim}')
    u = domain.a_t
    if grid.regime == GridRegime.SPARSE:
        return _broadcast(grid.sparse_spacings, dim, 'delta')
    if grid.regime == GridRegime.PICKANDS:
        a = _broadcast(grid.d_params, dim, 'a')
        return a * u ** (-2.0 / alphas)
    return grid.dense_factor * u ** (-2.0 / alphas)


def grid_indices(delta, extent_axis, lattice_step):
    """Map the grid points {k delta <= T} onto the simulation lattice.

    :param delta: The grid spacing.
    :param extent_axis: The axis length T.
    :param lattice_step: The lattice spacing h.
    :return: The strictly increasing lattice indices, starting at 0.
    :raise ConfigurationError: If delta < h, which requires a finer lattice.
    """
    delta = float(delta)
    h = float(lattice_step)
    if h <= 0:
        raise ValueError(f'lattice step must be positive, got {h}')
    if delta < h * (1.0 - 1e-12):
        raise ConfigurationError(
            f'grid spacing {delta} is finer than the lattice step {h}: use a finer lattice')
    count = int(math.floor(extent_axis / delta + 1e-9)) + 1
    last = int(math.floor(extent_axis / h + 1e-9))
    k = np.arange(count, dtype=float)
    idx = np.floor(k * delta / h + 0.5).astype(np.int64)
    return np.minimum(idx, last)
