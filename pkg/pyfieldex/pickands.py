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
Monte Carlo estimation of Pickands-type constants.

All estimators work with Y(t) = sqrt(2) B(t) - |t|^alpha where B is a
fractional Brownian motion with Hurst index alpha / 2, so that
E exp(Y(t)) = 1.  Multi-axis functionals use the sum of independent
per-axis processes.

The default "shift" estimator evaluates the window expectation
E F(Y on [0, lambda]) of a functional F with F(Y + c) = exp(c) F(Y) as

    (n + 1) E[F(Y(. - J h)) / sum_k exp(Y((k - J) h))]

with J uniform on the n + 1 lattice points of the window.  This is
unbiased for the same finite-window quantity as the plain average of
exp(max), but every path contributes a bounded weight instead of rare
large values.  The "plain" estimator is the literal window average.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import enum
import logging
import math
import numpy as np
import scipy.integrate
import scipy.special
import scipy.stats
from .errors import ConfigurationError, FittingError
from .fieldsim import FgnSampler, two_sided_from_increments
from .rng import generator, Stream


_log = logging.getLogger(__name__)
CHUNK_PATHS = 32
ESTIMATORS = ('shift', 'plain')


class EstimateKind(enum.Enum):
    CONTINUOUS = 'continuous'
    DISCRETE = 'discrete'
    BIVARIATE = 'bivariate'


def _floats(v):
    return tuple(float(x) for x in np.atleast_1d(v))


@dataclass(frozen=True)
class PickandsConfig:
    """Monte Carlo configuration shared by all estimators.

    :param alphas: The exponents alpha_i in (0, 2].
    :param lambdas: The window lengths lambda_i > 0.
    :param fine_step: The lattice step that stands in for continuous time.
    :param grid_a: The grid spacings a_i >= 0, where 0 means
        continuous only.
    :param reps: The number of Monte Carlo paths.
    :param seed: The 64-bit seed.  Paths are keyed by (seed, path index),
        so estimators called with equal seeds share paths.
    :param estimator: 'shift' (default) or 'plain'.  'plain' is the literal
        window mean of exp(max Y) over the paths.  'shift' averages the
        same expectation over uniformly shifted windows, is unbiased for
        H(lambda) / lambda and has bounded weights.
    :param shifts_per_path: The number of shift draws J per path for
        the shift estimator.
    """
    alphas: tuple
    lambdas: tuple
    fine_step: float
    grid_a: tuple = (0.0,)
    reps: int = 20000
    seed: int = 0
    estimator: str = 'shift'
    shifts_per_path: int = 4

    def __post_init__(self):
        alphas = _floats(self.alphas)
        lambdas = _floats(self.lambdas)
        grid_a = _floats(self.grid_a)
        dim = max(len(alphas), len(lambdas), len(grid_a))
        alphas, lambdas, grid_a = [v * dim if len(v) == 1 else v for v in (alphas, lambdas, grid_a)]
        if not len(alphas) == len(lambdas) == len(grid_a) == dim:
            raise ValueError('alphas, lambdas and grid_a must have matching lengths')
        if any(not 0.0 < x <= 2.0 for x in alphas):
            raise ValueError(f'alphas must be in (0, 2], got {alphas}')
        if any(not x > 0 for x in lambdas):
            raise ValueError(f'lambdas must be positive, got {lambdas}')
        if any(not x >= 0 for x in grid_a):
            raise ValueError(f'grid_a must be nonnegative, got {grid_a}')
        if int(self.reps) < 1:
            raise ValueError(f'reps must be positive, got {self.reps}')
        if self.estimator not in ESTIMATORS:
            raise ValueError(f'unknown estimator {self.estimator}')
        if int(self.shifts_per_path) < 1:
            raise ValueError('shifts_per_path must be positive')
        h = float(self.fine_step)
        positive_a = [a for a in grid_a if a > 0]
        limit = min(positive_a) / 4.0 if positive_a else min(lambdas) / 64.0
        if not 0.0 < h <= limit * (1.0 + 1e-12):
            raise ValueError(f'fine_step {h} must be in (0, {limit:g}]')
        object.__setattr__(self, 'alphas', alphas)
        object.__setattr__(self, 'lambdas', lambdas)
        object.__setattr__(self, 'grid_a', grid_a)
        object.__setattr__(self, 'fine_step', h)
        object.__setattr__(self, 'reps', int(self.reps))
        object.__setattr__(self, 'seed', int(self.seed))
        object.__setattr__(self, 'shifts_per_path', int(self.shifts_per_path))

    @property
    def dim(self):
        return len(self.alphas)

    def window_points(self):
        """The lattice index n_i of each window end, lambda_i = n_i h."""
        return [int(round(lam / self.fine_step)) for lam in self.lambdas]

    def grid_strides(self):
        """The grid spacing in lattice steps per axis, 0 for continuous.

        :raise ConfigurationError: When a_i is not a multiple of fine_step.
        """
        strides = []
        for a in self.grid_a:
            if a == 0:
                strides.append(0)
                continue
            ratio = a / self.fine_step
            stride = int(round(ratio))
            if stride < 1 or abs(ratio - stride) > 1e-9 * max(1.0, ratio):
                raise ConfigurationError(f'grid spacing {a} is not a multiple of fine_step {self.fine_step}')
            strides.append(stride)
        return strides

    def to_dict(self):
        return {
            'alpha': list(self.alphas),
            'a': list(self.grid_a),
            'lambda': list(self.lambdas),
            'step': self.fine_step,
            'reps': self.reps,
            'seed': self.seed,
            'estimator': self.estimator,
            'shiftsPerPath': self.shifts_per_path,
        }


@dataclass(frozen=True)
class PickandsEstimate:
    """A per-unit-volume estimate H(lambda) / prod(lambda_i)."""
    kind: EstimateKind
    value: float
    stderr: float
    config: PickandsConfig
    xy: tuple = None

    def to_dict(self):
        d = {'kind': self.kind.value}
        d.update(self.config.to_dict())
        d['value'] = self.value
        d['stderr'] = self.stderr
        d['xy'] = None if self.xy is None else list(self.xy)
        return d


class _AxisPaths:
    """Two-sided Y paths on {-n h, ..., n h} for one axis."""

    def __init__(self, alpha, n, step):
        self.alpha = alpha
        self.n = n
        self.step = step
        self.t = (np.arange(2 * n + 1) - n) * step
        self.drift = np.abs(self.t) ** alpha
        self._fgn = None if alpha == 2.0 else FgnSampler(alpha / 2.0, 2 * n, step)

    def sample(self, rngs):
        if self._fgn is None:
            # B(t) = t Z is the exact fBm with Hurst index 1
            z = np.array([r.standard_normal() for r in rngs])
            return math.sqrt(2.0) * z[:, None] * self.t[None, :] - self.drift
        increments = self._fgn.sample(rngs, batch=len(rngs))
        return math.sqrt(2.0) * two_sided_from_increments(increments) - self.drift


@dataclass
class _Chunk:
    grid_max: np.ndarray
    cont_max: np.ndarray
    log_sum: np.ndarray


def _axis_chunk(cfg, axis, sampler, stride, first, count):
    n = cfg.window_points()[axis]
    rngs = [generator(cfg.seed, first + k, Stream.FBM, sub=axis) for k in range(count)]
    y = sampler.sample(rngs)
    if cfg.estimator == 'plain':
        starts = np.full((count, 1), n, dtype=np.int64)
    else:
        starts = np.stack([
            n - generator(cfg.seed, first + k, Stream.SHIFT, sub=axis).integers(
                0, n + 1, size=cfg.shifts_per_path)
            for k in range(count)])
    windows = np.lib.stride_tricks.sliding_window_view(y, n + 1, axis=-1)
    w = windows[np.arange(count)[:, None], starts]  # (count, shifts, n + 1)
    cont_max = np.max(w, axis=-1)
    grid_max = np.max(w[..., ::stride], axis=-1) if stride else cont_max
    if cfg.estimator == 'plain':
        log_sum = np.zeros_like(cont_max)
    else:
        log_sum = scipy.special.logsumexp(w, axis=-1)
    return _Chunk(grid_max, cont_max, log_sum)


def _chunk(cfg, samplers, strides, first):
    count = min(CHUNK_PATHS, cfg.reps - first)
    total = None
    for axis, sampler in enumerate(samplers):
        c = _axis_chunk(cfg, axis, sampler, strides[axis], first, count)
        if total is None:
            total = c
        else:
            total = _Chunk(total.grid_max + c.grid_max, total.cont_max + c.cont_max,
                           total.log_sum + c.log_sum)
    return total


def _map(fn, items, threads):
    threads = 1 if threads is None else max(1, int(threads))
    if threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass
class BivariateSample:
    """Per-path grid and continuous maxima from one path set.

    Arrays have shape (reps, shifts).  ``grid_max`` and ``cont_max`` hold
    A and B, the maxima of Y over the grid and over the fine lattice of
    each (shifted) window, and ``log_sum`` holds the log normalizer (0 for
    the plain estimator).  ``scale`` converts path averages to per-unit
    volume values.
    """
    config: PickandsConfig
    grid_max: np.ndarray
    cont_max: np.ndarray
    log_sum: np.ndarray
    scale: float

    def _reduce(self, log_values):
        per_path = self.scale * np.mean(np.exp(log_values), axis=-1)
        reps = per_path.shape[-1]
        value = np.mean(per_path, axis=-1)
        stderr = np.std(per_path, axis=-1, ddof=1) / math.sqrt(reps) if reps > 1 else np.zeros_like(value)
        return value, stderr

    def continuous(self):
        """Estimate H_alpha(lambda) / prod(lambda_i)."""
        return self._reduce(self.cont_max - self.log_sum)

    def discrete(self):
        """Estimate H_a,alpha(lambda) / prod(lambda_i)."""
        return self._reduce(self.grid_max - self.log_sum)

    def per_path(self, x, y):
        """Per-path weights exp(min(A - x, B - y)), normalized."""
        return self.scale * np.mean(
            np.exp(np.minimum(self.grid_max - x, self.cont_max - y) - self.log_sum), axis=-1)

    def evaluate(self, x, y, stderr=False):
        """Evaluate H^{x,y}(lambda) / prod(lambda_i).

        The first argument thresholds the grid maximum A and the second
        the continuous maximum B.

        :param x: The grid threshold offset, scalar or array.  -inf and
            +inf are allowed.
        :param y: The continuous threshold offset, broadcast against x.
        :param stderr: True to also return the standard errors.
        :return: The value array, or (value, stderr).
        """
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        value = np.empty(x.shape)
        err = np.empty(x.shape)
        reps = self.grid_max.shape[0]
        with np.errstate(over='ignore', invalid='ignore'):
            for idx in np.ndindex(x.shape):
                p = self.per_path(x[idx], y[idx])
                value[idx] = np.mean(p)
                err[idx] = np.std(p, ddof=1) / math.sqrt(reps) if reps > 1 else 0.0
        if not x.shape:
            value, err = float(value), float(err)
        return (value, err) if stderr else value

    def estimate(self, x, y):
        value, err = self.evaluate(x, y, stderr=True)
        return PickandsEstimate(EstimateKind.BIVARIATE, float(value), float(err), self.config, (float(x), float(y)))


def sample_bivariate(cfg: PickandsConfig, threads=None):
    """Sample the path set and reduce each path to its maxima.

    :param cfg: The :class:`PickandsConfig`.
    :param threads: The worker count.  Results do not depend on it.
    :return: The :class:`BivariateSample`.
    """
    strides = cfg.grid_strides()
    points = cfg.window_points()
    samplers = [_AxisPaths(alpha, n, cfg.fine_step) for alpha, n in zip(cfg.alphas, points)]
    _log.info('pickands %s: alpha=%s lambda=%s step=%g reps=%d',
              cfg.estimator, cfg.alphas, cfg.lambdas, cfg.fine_step, cfg.reps)
    chunks = _map(lambda first: _chunk(cfg, samplers, strides, first),
                  range(0, cfg.reps, CHUNK_PATHS), threads)
    grid_max = np.concatenate([c.grid_max for c in chunks])
    cont_max = np.concatenate([c.cont_max for c in chunks])
    log_sum = np.concatenate([c.log_sum for c in chunks])
    lam = [n * cfg.fine_step for n in points]
    if cfg.estimator == 'plain':
        scale = 1.0 / float(np.prod(lam))
    else:
        scale = float(np.prod([(n + 1) / x for n, x in zip(points, lam)]))
    return BivariateSample(cfg, grid_max, cont_max, log_sum, scale)


def estimate_h_alpha(cfg: PickandsConfig, threads=None):
    """Estimate the continuous constant H_alpha(lambda) / prod(lambda_i).

    :param cfg: The :class:`PickandsConfig`.  grid_a is ignored.
    :param threads: The worker count.
    :return: The :class:`PickandsEstimate`.
    """
    value, err = sample_bivariate(cfg, threads).continuous()
    return PickandsEstimate(EstimateKind.CONTINUOUS, float(value), float(err), cfg)


def estimate_h_a_alpha(cfg: PickandsConfig, threads=None):
    """Estimate the discrete constant H_a,alpha(lambda) / prod(lambda_i).

    :param cfg: The :class:`PickandsConfig` with every grid_a > 0.
    :param threads: The worker count.
    :return: The :class:`PickandsEstimate`.
    :raise ConfigurationError: When a grid spacing is 0 or not a
        multiple of fine_step.
    """
    if not all(cfg.grid_a):
        raise ConfigurationError('discrete constant requires grid_a > 0 on every axis')
    value, err = sample_bivariate(cfg, threads).discrete()
    return PickandsEstimate(EstimateKind.DISCRETE, float(value), float(err), cfg)


def estimate_h_bivariate(cfg: PickandsConfig, x, y, threads=None):
    """Estimate H^{x,y}_a,alpha(lambda) / prod(lambda_i).

    Per path the integral of exp(s) over {A > s + x, B > s + y} is
    exp(min(A - x, B - y)).

    :param cfg: The :class:`PickandsConfig` with every grid_a > 0.
    :param x: The grid threshold offset.
    :param y: The continuous threshold offset.
    :param threads: The worker count.
    :return: The :class:`PickandsEstimate`.
    """
    if not all(cfg.grid_a):
        raise ConfigurationError('bivariate constant requires grid_a > 0 on every axis')
    return sample_bivariate(cfg, threads).estimate(x, y)


def bivariate_quadrature_oracle(sample: BivariateSample, x, y, lower=-30.0, points=8001):
    """Evaluate the bivariate functional by per-path trapezoid quadrature in s.

    Integrates exp(s) 1{A > s + x, B > s + y} over s in [lower, A - x]
    on each path, independently of the closed form.

    :return: (value, stderr) over the same paths as ``sample``.
    """
    upper = sample.grid_max - x
    frac = np.linspace(0.0, 1.0, points)
    rows = []
    for k in range(upper.shape[0]):
        hi = upper[k][:, None]
        lo = np.minimum(lower, hi - 1.0)
        s = lo + (hi - lo) * frac[None, :]
        inside = (sample.cont_max[k][:, None] > s + y) & (sample.grid_max[k][:, None] >= s + x)
        f = np.exp(s - sample.log_sum[k][:, None]) * inside
        rows.append(sample.scale * np.mean(scipy.integrate.trapezoid(f, s, axis=-1)))
    p = np.array(rows)
    return float(np.mean(p)), float(np.std(p, ddof=1) / math.sqrt(len(p)))


def h2_window_oracle(lam, method='quad'):
    """H_2(lambda) / lambda for B(t) = t Z.

    The maximum of sqrt(2) t Z - t^2 on [0, lambda] is 0 for Z <= 0,
    Z^2 / 2 for Z <= sqrt(2) lambda and sqrt(2) lambda Z - lambda^2 beyond.

    :param lam: The window length.
    :param method: 'quad' (one-dimensional quadrature over Z) or
        'closed' (1 / sqrt(pi) + 1 / lambda).
    """
    lam = float(lam)
    if method == 'closed':
        return 1.0 / math.sqrt(math.pi) + 1.0 / lam
    z_edge = math.sqrt(2.0) * lam

    def integrand(z):
        m = 0.5 * z * z if z <= z_edge else z_edge * z - lam * lam
        return math.exp(m + scipy.stats.norm.logpdf(z))

    middle, _ = scipy.integrate.quad(integrand, 0.0, z_edge, limit=200)
    tail, _ = scipy.integrate.quad(integrand, z_edge, np.inf, limit=200)
    return (0.5 + middle + tail) / lam


@dataclass(frozen=True)
class Extrapolation:
    c0: float
    c1: float
    band: float
    model: str
    residuals: tuple = field(default=())

    def to_dict(self):
        return {'c0': self.c0, 'c1': self.c1, 'band': self.band, 'model': self.model,
                'residuals': list(self.residuals)}


def extrapolate(series, model='lambda', alpha=1.0):
    """Fit value = c0 + c1 g(x) by least squares.

    :param series: The sequence of (x, value) pairs, x being lambda or
        the lattice step.
    :param model: 'lambda' for g(x) = 1 / x or 'step' for
        g(x) = x^(alpha / 2).
    :param alpha: The exponent for the step model.
    :return: The :class:`Extrapolation` with c0, c1 and band, twice the
        residual-based standard error of c0.
    :raise ValueError: On fewer than 3 points.
    :raise FittingError: When the design matrix is degenerate.
    """
    series = [(float(x), float(v)) for x, v in series]
    if len(series) < 3:
        raise ValueError(f'extrapolation needs at least 3 points, got {len(series)}')
    x = np.array([s[0] for s in series])
    v = np.array([s[1] for s in series])
    if np.any(x <= 0):
        raise ValueError('extrapolation abscissae must be positive')
    if model == 'lambda':
        g = 1.0 / x
    elif model == 'step':
        g = x ** (float(alpha) / 2.0)
    else:
        raise ValueError(f'unknown model {model}')
    design = np.column_stack([np.ones_like(g), g])
    coef, _, rank, sv = np.linalg.lstsq(design, v, rcond=None)
    if rank < 2 or sv[-1] <= 1e-12 * sv[0]:
        raise FittingError('degenerate extrapolation design')
    residuals = v - design @ coef
    dof = len(v) - 2
    sigma2 = float(residuals @ residuals) / dof if dof > 0 else 0.0
    cov = sigma2 * np.linalg.inv(design.T @ design)
    band = 2.0 * math.sqrt(max(cov[0, 0], 0.0))
    return Extrapolation(float(coef[0]), float(coef[1]), band, model, tuple(float(r) for r in residuals))


def estimate_extrapolated(cfg: PickandsConfig, steps, threads=None):
    """Estimate H_alpha at several lattice steps and extrapolate to step 0.

    The lattice bias of the maximum scales as step^(alpha / 2).

    :param cfg: The base configuration (single axis).
    :param steps: At least 3 lattice steps.
    :return: (:class:`Extrapolation`, list of :class:`PickandsEstimate`).
    """
    if cfg.dim != 1:
        raise ValueError('step extrapolation supports a single axis')
    estimates = [estimate_h_alpha(replace(cfg, fine_step=float(h)), threads) for h in steps]
    fit = extrapolate([(e.config.fine_step, e.value) for e in estimates], 'step', cfg.alphas[0])
    return fit, estimates
