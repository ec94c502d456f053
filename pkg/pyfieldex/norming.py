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
Normalizing constants and the four-level transform.

With a_T = sqrt(2 log prod(T_i)) and s = sum(2 / alpha_i) - 1:

* b_T = a_T + log((2 pi)^(-1/2) prod(H_alpha_i) a_T^s) / a_T
* b_T^delta = a_T + log((2 pi)^(-1/2) prod(1 / delta_i) / a_T) / a_T
* b_aT = a_T + log((2 pi)^(-1/2) prod(H_a_i,alpha_i) a_T^s) / a_T

Minima are centered at -b_T and -b* by the symmetry X = -X in law.
"""

from dataclasses import dataclass
import logging
import math
import numpy as np
import scipy.special
from .errors import ConfigurationError
from .grids import DomainSpec, GridRegime, GridSpec, spacings


_log = logging.getLogger(__name__)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
H_1 = 1.0
H_2 = 1.0 / math.sqrt(math.pi)


def _tuple(v):
    if v is None:
        return None
    return tuple(float(x) for x in np.atleast_1d(v))


@dataclass(frozen=True)
class PickandsValues:
    """The injected Pickands constants, one entry per axis.

    :param h_alpha: The continuous constants H_alpha_i.
    :param h_a_alpha: The discrete constants H_a_i,alpha_i, or None when
        the grid regime does not need them.
    :param provenance: 'literature', 'estimated' or 'values'.
    """
    h_alpha: tuple
    h_a_alpha: tuple = None
    provenance: str = 'values'

    def __post_init__(self):
        h_alpha = _tuple(self.h_alpha)
        h_a_alpha = _tuple(self.h_a_alpha)
        if h_alpha is None or any(not (h > 0 and math.isfinite(h)) for h in h_alpha):
            raise ConfigurationError(f'H_alpha values must be positive, got {h_alpha}')
        if h_a_alpha is not None and any(not (h > 0 and math.isfinite(h)) for h in h_a_alpha):
            raise ConfigurationError(f'H_a,alpha values must be positive, got {h_a_alpha}')
        object.__setattr__(self, 'h_alpha', h_alpha)
        object.__setattr__(self, 'h_a_alpha', h_a_alpha)

    def product(self, dim):
        return float(np.prod(_per_axis(self.h_alpha, dim, 'H_alpha')))

    def grid_product(self, dim):
        if self.h_a_alpha is None:
            raise ConfigurationError('pickands grid requires the discrete constants H_a,alpha')
        return float(np.prod(_per_axis(self.h_a_alpha, dim, 'H_a,alpha')))

    def to_dict(self):
        return {
            'h_alpha': list(self.h_alpha),
            'h_a_alpha': None if self.h_a_alpha is None else list(self.h_a_alpha),
            'provenance': self.provenance,
        }


def _per_axis(v, dim, name):
    if len(v) == dim:
        return np.array(v)
    if len(v) == 1:
        return np.full(dim, v[0])
    raise ConfigurationError(f'{name} has length {len(v)}, expected 1 or {dim}')


def brownian_grid_constant(a):
    """The discrete Pickands constant H_a,1 of Brownian motion.

    :param a: The grid spacing a > 0.
    :return: a^-1 exp(-2 sum_k Phi(-sqrt(k a / 2)) / k), which tends to
        1 as a -> 0 and to 1 / a as a -> inf.
    """
    a = float(a)
    if not a > 0:
        raise ValueError(f'grid spacing must be positive, got {a}')
    # Phi(-sqrt(k a / 2)) < exp(-k a / 4), so k a / 4 > 40 is negligible
    count = int(math.ceil(160.0 / a)) + 16
    k = np.arange(1, count + 1, dtype=float)
    total = math.fsum(scipy.special.ndtr(-np.sqrt(k * a / 2.0)) / k)
    return math.exp(-2.0 * total) / a


def literature_values(alphas, a=None):
    """The exactly known constants.

    :param alphas: The per-axis exponents; each must be 1 or 2.
    :param a: The optional per-axis Pickands grid parameters.  Discrete
        constants are known only for alpha = 1.
    :return: The :class:`PickandsValues`.
    :raise ConfigurationError: When a value is not known in closed form.
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    h_alpha = []
    for alpha in alphas:
        if alpha == 1.0:
            h_alpha.append(H_1)
        elif alpha == 2.0:
            h_alpha.append(H_2)
        else:
            raise ConfigurationError(f'no literature value of H_alpha for alpha={alpha}: estimate it')
    h_a_alpha = None
    if a is not None:
        a = np.broadcast_to(np.atleast_1d(np.asarray(a, dtype=float)), alphas.shape)
        h_a_alpha = []
        for alpha, ai in zip(alphas, a):
            if alpha != 1.0:
                raise ConfigurationError(f'no literature value of H_a,alpha for alpha={alpha}: estimate it')
            h_a_alpha.append(brownian_grid_constant(ai))
    return PickandsValues(tuple(h_alpha), None if h_a_alpha is None else tuple(h_a_alpha), 'literature')


@dataclass(frozen=True)
class NormingConstants:
    a_t: float
    b_t: float
    b_t_delta: float = None
    b_a_t: float = None
    b_star: float = None
    regime: GridRegime = GridRegime.DENSE
    offset: float = 0.0

    def to_dict(self):
        return {
            'aT': self.a_t,
            'bT': self.b_t,
            'bTdelta': self.b_t_delta,
            'bAT': self.b_a_t,
            'bStar': self.b_star,
            'regime': self.regime.value,
            'offset': self.offset,
        }


@dataclass(frozen=True)
class LevelQuadruple:
    x1: float
    y1: float
    x2: float
    y2: float
    u_x2: float = None
    u_y2: float = None
    v_x1: float = None
    v_y1: float = None


def _location(a_t, log_term):
    return a_t + log_term / a_t


def compute_norming(domain: DomainSpec, alphas, grid: GridSpec, pickands_values: PickandsValues,
                    offset=0.0):
    """Compute the normalizing constants.

    :param domain: The observation domain with prod(T_i) > 1.
    :param alphas: The per-axis exponents alpha_i.
    :param grid: The grid regime.
    :param pickands_values: The injected :class:`PickandsValues`.
    :param offset: A diagnostic shift added to b_T and b*.  Nonzero
        values deliberately break the normalization.
    :return: The :class:`NormingConstants`.
    :raise ConfigurationError: When the regime needs constants that
        were not provided.
    """
    if pickands_values is None:
        raise ConfigurationError('pickands values required')
    dim = domain.dim
    alphas = _per_axis(tuple(np.atleast_1d(np.asarray(alphas, dtype=float))), dim, 'alphas')
    a_t = domain.a_t
    log_a = math.log(a_t)
    s = float(np.sum(2.0 / alphas)) - 1.0
    b_t = _location(a_t, -_LOG_SQRT_2PI + math.log(pickands_values.product(dim)) + s * log_a)
    b_t_delta = None
    b_a_t = None
    if grid.regime == GridRegime.SPARSE:
        delta = spacings(grid, domain, alphas)
        b_t_delta = _location(a_t, -_LOG_SQRT_2PI - float(np.sum(np.log(delta))) - log_a)
        b_star = b_t_delta
    elif grid.regime == GridRegime.PICKANDS:
        h_grid = pickands_values.grid_product(dim)
        b_a_t = _location(a_t, -_LOG_SQRT_2PI + math.log(h_grid) + s * log_a)
        b_star = b_a_t
    else:
        b_star = b_t
    offset = float(offset)
    if offset:
        _log.warning('norming offset %g applied', offset)
    n = NormingConstants(a_t, b_t + offset, b_t_delta, b_a_t, b_star + offset, grid.regime, offset)
    _log.info('norming: aT=%.6f bT=%.6f bStar=%.6f (%s)', n.a_t, n.b_t, n.b_star, grid.regime.value)
    return n


def to_levels(n: NormingConstants, x1, y1, x2, y2):
    """Transform limit-law arguments into the four levels.

    :return: The :class:`LevelQuadruple` with u_x2 = b_T + x2 / a_T,
        u_y2 = b* + y2 / a_T, v_x1 = -b_T + x1 / a_T and
        v_y1 = -b* + y1 / a_T.
    """
    return LevelQuadruple(
        x1, y1, x2, y2,
        u_x2=n.b_t + x2 / n.a_t,
        u_y2=n.b_star + y2 / n.a_t,
        v_x1=-n.b_t + x1 / n.a_t,
        v_y1=-n.b_star + y1 / n.a_t,
    )


def normalize_extremes(extremes, n: NormingConstants):
    """Normalize raw extremes.

    :param extremes: An object with ``m_cont``, ``m_grid``, ``min_cont``
        and ``min_grid`` attributes (scalars or arrays), or an array whose
        last axis holds those four values in that order.
    :param n: The :class:`NormingConstants`.
    :return: The array (..., 4) of a_T(M - b_T), a_T(M^delta - b*),
        a_T(m + b_T) and a_T(m^delta + b*).
    """
    if hasattr(extremes, 'm_cont'):
        x = np.stack([np.asarray(extremes.m_cont, dtype=float),
                      np.asarray(extremes.m_grid, dtype=float),
                      np.asarray(extremes.min_cont, dtype=float),
                      np.asarray(extremes.min_grid, dtype=float)], axis=-1)
    else:
        x = np.asarray(extremes, dtype=float)
        if x.shape[-1] != 4:
            raise ValueError(f'expected 4 extremes on the last axis, got shape {x.shape}')
    center = np.array([n.b_t, n.b_star, -n.b_t, -n.b_star])
    return n.a_t * (x - center)
