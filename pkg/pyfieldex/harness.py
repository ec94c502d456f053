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
Monte Carlo experiments that compare simulated extremes with the limit laws.

A replication simulates the field on the fine lattice, reads the maximum
and minimum over the whole lattice (the continuous surrogate) and over the
grid points, and stores an :class:`ExtremesRecord`.  Replication k uses
the seed derived from (masterSeed, k) and writes slot k of the results, so
the output does not depend on the worker count or the completion order.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import enum
import itertools
import logging
import math
import numpy as np
import scipy.integrate
import scipy.stats
from .config import resolve_threads
from .covmodels import CovarianceModel, MixtureFieldSpec, model_from_dict
from .errors import ConfigurationError
from .fieldsim import LatticeSpec, sampler_for
from .grids import DomainSpec, GridRegime, GridSpec, grid_indices, spacings
from .limitlaws import (Theorem, LimitParams, BivariateCache, bivariate_from_sample,
                        band_cdf, joint_cdf, gumbel_mixture_cdf, reflected_gumbel_mixture_cdf)
from .norming import PickandsValues, compute_norming, literature_values, normalize_extremes
from .pickands import PickandsConfig, sample_bivariate
from .rng import replication_seed, Stream
from .version import __version__


_log = logging.getLogger(__name__)
REPS_MIN = 100
LATTICE_RULE_DEFAULT = 0.05
LATTICE_RULE_MAX = 0.5
TAIL_POINTS_MAX = 6
TAIL_LEVEL_MIN = 3.0
EXTREMES_COLUMNS = ('m_cont', 'm_grid', 'min_cont', 'min_grid')
KS_NAMES = ('maxCont', 'maxGrid', 'minCont', 'minGrid')
PICKANDS_MC_DEFAULTS = {'lambda': 16.0, 'step': 0.01, 'reps': 4000, 'shiftsPerPath': 4}


class PickandsSource(enum.Enum):
    LITERATURE = 'literature'
    ESTIMATED = 'estimated'
    VALUES = 'values'


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo experiment.

    :param model: The :class:`CovarianceModel` or :class:`MixtureFieldSpec`.
    :param domain: The :class:`DomainSpec`.
    :param grid: The :class:`GridSpec`.
    :param eval_points: The (x1, y1, x2, y2) evaluation points.
    :param reps: The replication count >= 100.
    :param master_seed: The 64-bit master seed.
    :param lattice_rule: The lattice step rule c with
        h_i <= c u^(-2 / alpha_i), used when lattice_step is None.
        c must not exceed LATTICE_RULE_MAX.
    :param lattice_step: The explicit per-axis lattice steps, subject to
        the same LATTICE_RULE_MAX bound.
    :param pickands_source: The :class:`PickandsSource`.
    :param pickands_values: The constants for PickandsSource.VALUES.
    :param pickands_mc: The Monte Carlo settings {lambda, step, reps,
        seed, shiftsPerPath} for estimated and bivariate constants.
    :param acceptance: The acceptance thresholds, see :func:`check_acceptance`.
    :param norming_offset: A diagnostic shift of b_T and b*.
    """
    model: object
    domain: DomainSpec
    grid: GridSpec
    eval_points: tuple
    reps: int = 4000
    master_seed: int = 0
    lattice_rule: float = LATTICE_RULE_DEFAULT
    lattice_step: tuple = None
    pickands_source: PickandsSource = PickandsSource.LITERATURE
    pickands_values: PickandsValues = None
    pickands_mc: dict = field(default_factory=dict)
    acceptance: dict = field(default_factory=dict)
    norming_offset: float = 0.0
    threads: int = None
    name: str = ''

    def __post_init__(self):
        if int(self.reps) < REPS_MIN:
            raise ConfigurationError(f'reps must be >= {REPS_MIN}, got {self.reps}')
        object.__setattr__(self, 'reps', int(self.reps))
        object.__setattr__(self, 'master_seed', int(self.master_seed))
        points = tuple(tuple(float(v) for v in p) for p in self.eval_points)
        if not points:
            raise ConfigurationError('evalPoints must not be empty')
        if any(len(p) != 4 for p in points):
            raise ConfigurationError('each evaluation point must be (x1, y1, x2, y2)')
        object.__setattr__(self, 'eval_points', points)
        if self.model.dim != self.domain.dim:
            raise ConfigurationError(f'model dim {self.model.dim} != domain dim {self.domain.dim}')
        if self.domain.dim > 2:
            raise ConfigurationError('experiments support dimension 1 or 2')
        if isinstance(self.model, MixtureFieldSpec) and self.model.domain != self.domain:
            object.__setattr__(self, 'model', self.model.with_domain(self.domain))
        if not 0 < self.lattice_rule <= LATTICE_RULE_MAX:
            raise ConfigurationError(f'lattice rule must be in (0, {LATTICE_RULE_MAX}], got {self.lattice_rule}')
        if self.lattice_step is not None:
            step = np.broadcast_to(np.array(self.lattice_step, dtype=float), (self.domain.dim,))
            limit = lattice_step_limit(self.domain, self.alphas)
            if np.any(step <= 0) or np.any(step > limit * (1 + 1e-12)):
                raise ConfigurationError(f'lattice step {step.tolist()} outside (0, {limit.tolist()}]: '
                                         'the lattice does not resolve the extremes at this domain')
        source = PickandsSource(self.pickands_source)
        object.__setattr__(self, 'pickands_source', source)
        if source == PickandsSource.VALUES and self.pickands_values is None:
            raise ConfigurationError('pickands source "values" requires h_alpha')

    @property
    def alphas(self):
        return self.model.alphas

    @property
    def theorem(self):
        return Theorem.for_regime(self.grid.regime)

    @property
    def r(self):
        return float(self.model.long_range)

    def with_domain(self, domain):
        model = self.model.with_domain(domain) if isinstance(self.model, MixtureFieldSpec) else self.model
        return replace(self, domain=domain, model=model)

    @staticmethod
    def from_dict(d):
        """Construct from the JSON configuration form."""
        try:
            model_d = d['model']
            domain = DomainSpec.from_dict(d['domain'], dim=model_d.get('dim'))
            grid = GridSpec.from_dict(d['grid'])
        except KeyError as ex:
            raise ConfigurationError(f'configuration missing {ex}')
        model = model_from_dict(model_d, domain)
        if 'evalPoints' in d:
            points = d['evalPoints']
        elif 'evalGrid' in d:
            values = d['evalGrid'].get('values', [])
            points = list(itertools.product(values, repeat=4))
        else:
            raise ConfigurationError('configuration requires "evalPoints" or "evalGrid"')
        lattice = d.get('lattice', {})
        step = lattice.get('step')
        if step is not None:
            step = tuple(float(x) for x in np.atleast_1d(step))
        pickands = dict(d.get('pickands', {}))
        source = pickands.pop('source', 'literature')
        try:
            source = PickandsSource(source)
        except ValueError:
            raise ConfigurationError(f'unknown pickands source {source!r}')
        values = None
        if source == PickandsSource.VALUES:
            values = PickandsValues(pickands.get('h_alpha'), pickands.get('h_a_alpha'), 'values')
        return ExperimentConfig(
            model=model,
            domain=domain,
            grid=grid,
            eval_points=points,
            reps=d.get('reps', 4000),
            master_seed=d.get('masterSeed', 0),
            lattice_rule=float(lattice.get('rule', LATTICE_RULE_DEFAULT)),
            lattice_step=step,
            pickands_source=source,
            pickands_values=values,
            pickands_mc=pickands,
            acceptance=dict(d.get('acceptance', {})),
            norming_offset=float(d.get('normingOffset', 0.0)),
            threads=d.get('threads'),
            name=d.get('name', ''),
        )

    def to_dict(self):
        d = {
            'name': self.name,
            'model': self.model.to_dict(),
            'domain': self.domain.to_dict(),
            'grid': self.grid.to_dict(),
            'lattice': {'rule': self.lattice_rule} if self.lattice_step is None
                else {'step': list(self.lattice_step)},
            'reps': self.reps,
            'masterSeed': self.master_seed,
            'evalPoints': [list(p) for p in self.eval_points],
            'pickands': dict(self.pickands_mc, source=self.pickands_source.value),
            'acceptance': self.acceptance,
            'normingOffset': self.norming_offset,
        }
        if self.pickands_values is not None:
            d['pickands'].update(self.pickands_values.to_dict())
        return d


@dataclass(frozen=True)
class ExtremesRecord:
    """The extremes of one replication."""
    rep: int
    seed: int
    m_cont: float
    m_grid: float
    min_cont: float
    min_grid: float

    def __post_init__(self):
        # the grid is a subset of the lattice
        if not (self.m_grid <= self.m_cont and self.min_grid >= self.min_cont):
            raise AssertionError(f'replication {self.rep}: grid extremes outside lattice extremes')


@dataclass
class ComparisonReport:
    theorem: Theorem
    r: float
    reps: int
    eval_points: tuple
    empirical: np.ndarray
    theoretical: np.ndarray
    sup_defect: float
    ks: dict
    max_min_corr: float
    band_empirical: np.ndarray
    band_theoretical: np.ndarray
    gap_quantile95: float
    swap_defect: float

    def to_dict(self):
        return {
            'theorem': self.theorem.value,
            'r': self.r,
            'reps': self.reps,
            'supDefect': self.sup_defect,
            'perMarginalKS': dict(self.ks),
            'maxMinCorr': self.max_min_corr,
            'gapQuantile95': self.gap_quantile95,
            'swapDefect': self.swap_defect,
            'points': [
                {
                    'args': list(p),
                    'empirical': float(self.empirical[k]),
                    'theoretical': float(self.theoretical[k]),
                    'bandEmpirical': float(self.band_empirical[k]),
                    'bandTheoretical': float(self.band_theoretical[k]),
                }
                for k, p in enumerate(self.eval_points)
            ],
        }


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list
    extremes: np.ndarray
    normalized: np.ndarray
    norming: object
    pickands_values: PickandsValues
    limit_params: LimitParams
    report: ComparisonReport
    meta: dict


def lattice_step_limit(domain: DomainSpec, alphas, rule=LATTICE_RULE_MAX):
    """The per-axis step rule * a_T^(-2 / alpha_i)."""
    alphas = np.broadcast_to(np.array(alphas, dtype=float), (domain.dim,))
    return rule * domain.a_t ** (-2.0 / alphas)


def lattice_steps(cfg: ExperimentConfig):
    """Choose lattice steps h_i with T_i / h_i an integer."""
    extent = np.array(cfg.domain.extent)
    dim = cfg.domain.dim
    if cfg.lattice_step is not None:
        h = np.broadcast_to(np.array(cfg.lattice_step, dtype=float), (dim,))
    else:
        h = lattice_step_limit(cfg.domain, cfg.alphas, cfg.lattice_rule)
    return extent / np.ceil(extent / h - 1e-9)


def build_lattice(cfg: ExperimentConfig):
    """Construct the lattice and the per-axis grid indices.

    :return: (lattice, grid_idx, delta).
    :raise ConfigurationError: When a grid spacing is finer than the
        lattice step.
    """
    h = lattice_steps(cfg)
    lattice = LatticeSpec(cfg.domain.extent, tuple(h))
    delta = spacings(cfg.grid, cfg.domain, cfg.alphas)
    grid_idx = [grid_indices(d, t, hi) for d, t, hi in zip(delta, cfg.domain.extent, lattice.step)]
    return lattice, grid_idx, delta


def _pickands_config(cfg, axes):
    mc = dict(PICKANDS_MC_DEFAULTS)
    mc.update(cfg.pickands_mc)
    alphas = [cfg.alphas[i] for i in axes]
    if cfg.grid.regime == GridRegime.PICKANDS:
        a = np.broadcast_to(np.array(cfg.grid.d_params), (cfg.domain.dim,))
        a = [float(a[i]) for i in axes]
    else:
        a = [0.0] * len(axes)
    return PickandsConfig(
        alphas=alphas,
        lambdas=[float(mc['lambda'])] * len(axes),
        fine_step=float(mc['step']),
        grid_a=a,
        reps=int(mc['reps']),
        seed=int(mc.get('seed', cfg.master_seed)),
        shifts_per_path=int(mc['shiftsPerPath']),
    )


def resolve_pickands(cfg: ExperimentConfig, threads=1):
    """Resolve the Pickands constants and, for Pickands grids, the bivariate constant.

    :return: (:class:`PickandsValues`, h_bivariate callable or None).
    """
    dim = cfg.domain.dim
    pickands_grid = cfg.grid.regime == GridRegime.PICKANDS
    joint_sample = None
    if pickands_grid:
        joint_sample = sample_bivariate(_pickands_config(cfg, list(range(dim))), threads)
    if cfg.pickands_source == PickandsSource.LITERATURE:
        values = literature_values(cfg.alphas, cfg.grid.d_params if pickands_grid else None)
    elif cfg.pickands_source == PickandsSource.VALUES:
        values = cfg.pickands_values
    else:
        h_alpha, h_a_alpha = [], []
        for axis in range(dim):
            if dim == 1 and joint_sample is not None:
                sample = joint_sample
            else:
                sample = sample_bivariate(_pickands_config(cfg, [axis]), threads)
            h_alpha.append(float(sample.continuous()[0]))
            if pickands_grid:
                h_a_alpha.append(float(sample.discrete()[0]))
        values = PickandsValues(h_alpha, h_a_alpha if pickands_grid else None, 'estimated')
    h_bivariate = None
    if joint_sample is not None:
        h_bivariate = BivariateCache(bivariate_from_sample(joint_sample))
    return values, h_bivariate


def limit_params(cfg: ExperimentConfig, values: PickandsValues, h_bivariate=None):
    dim = cfg.domain.dim
    pickands_grid = cfg.grid.regime == GridRegime.PICKANDS
    return LimitParams(
        theorem=cfg.theorem,
        r=cfg.r,
        h_const=values.product(dim),
        h_grid_const=values.grid_product(dim) if pickands_grid else None,
        h_bivariate=h_bivariate,
    )


def _map(fn, count, threads):
    if threads <= 1:
        return [fn(k) for k in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


def extremes_record(k, sample, selector):
    """Read the lattice and grid extremes of one field sample.

    :param k: The replication index.
    :param sample: The :class:`FieldSample`.
    :param selector: The grid index selector from :func:`grid_selector`.
    :return: The :class:`ExtremesRecord`.
    """
    values = sample.values
    grid_values = values[selector]
    return ExtremesRecord(k, int(sample.seed), float(values.max()), float(grid_values.max()),
                          float(values.min()), float(grid_values.min()))


def grid_selector(grid_idx):
    return np.ix_(*grid_idx)


def simulate_extremes(cfg: ExperimentConfig, threads=None, first=0, count=None, on_sample=None):
    """Run the replications.

    :param cfg: The :class:`ExperimentConfig`.
    :param threads: The worker count, None for the configured default.
    :param first: The first replication index.
    :param count: The number of replications, None for cfg.reps - first.
    :param on_sample: The optional callable(k, sample) invoked with each
        :class:`FieldSample`, possibly from a worker thread.
    :return: (records, lattice, sampler, delta).
    """
    threads = resolve_threads(threads if threads is not None else cfg.threads)
    count = cfg.reps - first if count is None else int(count)
    if first < 0 or count < 1:
        raise ConfigurationError(f'invalid replication range first={first}, count={count}')
    lattice, grid_idx, delta = build_lattice(cfg)
    sampler = sampler_for(cfg.model, lattice)
    selector = grid_selector(grid_idx)
    _log.info('experiment %s: %d reps on lattice %s (%s), grid %s points, %d threads',
              cfg.name, count, lattice.shape, getattr(sampler, 'method', 'mixture'),
              [len(g) for g in grid_idx], threads)
    step = max(1, count // 10)

    def replicate(j):
        k = first + j
        sample = sampler.sample(replication_seed(cfg.master_seed, k))
        if on_sample is not None:
            on_sample(k, sample)
        if (j + 1) % step == 0:
            _log.info('replication %d / %d', j + 1, count)
        return extremes_record(k, sample, selector)

    records = _map(replicate, count, threads)
    return records, lattice, sampler, delta


def empirical_joint_cdf(normalized, x1, y1, x2, y2):
    """The frequency of (maxCont <= x2, maxGrid <= y2, minCont <= x1, minGrid <= y1)."""
    n = normalized
    event = (n[:, 0] <= x2) & (n[:, 1] <= y2) & (n[:, 2] <= x1) & (n[:, 3] <= y1)
    return float(np.mean(event))


def empirical_band(normalized, x1, y1, x2, y2):
    """The frequency of (minCont > x1, minGrid > y1, maxCont <= x2, maxGrid <= y2)."""
    n = normalized
    event = (n[:, 0] <= x2) & (n[:, 1] <= y2) & (n[:, 2] > x1) & (n[:, 3] > y1)
    return float(np.mean(event))


def _max_cdf(r):
    if r == 0:
        return lambda x: np.exp(-np.exp(-np.asarray(x, dtype=float)))
    return lambda x: np.array([gumbel_mixture_cdf(float(v), r) for v in np.atleast_1d(x)])


def _min_cdf(r):
    if r == 0:
        return lambda x: 1.0 - np.exp(-np.exp(np.asarray(x, dtype=float)))
    return lambda x: np.array([reflected_gumbel_mixture_cdf(float(v), r) for v in np.atleast_1d(x)])


def compare(cfg: ExperimentConfig, extremes, normalized, a_t, params: LimitParams):
    """Build the :class:`ComparisonReport` for normalized extremes."""
    points = cfg.eval_points
    empirical = np.array([empirical_joint_cdf(normalized, *p) for p in points])
    theoretical = np.array([joint_cdf(params, *p) for p in points])
    band_emp = np.array([empirical_band(normalized, *p) for p in points])
    band_theory = np.array([band_cdf(params, *p) for p in points])
    swapped = np.array([empirical_joint_cdf(normalized, x1, y1, y2, x2) for x1, y1, x2, y2 in points])
    r = params.r
    cdfs = (_max_cdf(r), _max_cdf(r), _min_cdf(r), _min_cdf(r))
    ks = {}
    for name, column, cdf in zip(KS_NAMES, normalized.T, cdfs):
        ks[name] = float(scipy.stats.kstest(column, cdf).statistic)
    if np.std(normalized[:, 0]) > 0 and np.std(normalized[:, 2]) > 0:
        corr = float(np.corrcoef(normalized[:, 0], -normalized[:, 2])[0, 1])
    else:
        corr = 0.0
    gap = a_t * (extremes[:, 0] - extremes[:, 1])
    return ComparisonReport(
        theorem=params.theorem,
        r=r,
        reps=len(normalized),
        eval_points=points,
        empirical=empirical,
        theoretical=theoretical,
        sup_defect=float(np.max(np.abs(empirical - theoretical))),
        ks=ks,
        max_min_corr=corr,
        band_empirical=band_emp,
        band_theoretical=band_theory,
        gap_quantile95=float(np.quantile(gap, 0.95)),
        swap_defect=float(np.max(np.abs(empirical - swapped))),
    )


def run_experiment(cfg: ExperimentConfig, threads=None):
    """Run one experiment end to end.

    :param cfg: The :class:`ExperimentConfig`.
    :param threads: The worker count, see :func:`pyfieldex.config.resolve_threads`.
    :return: The :class:`ExperimentResult`.
    :raise ConfigurationError: On inconsistent configuration.
    :raise SimulationError: When the field cannot be simulated.
    """
    threads = resolve_threads(threads if threads is not None else cfg.threads)
    values, h_bivariate = resolve_pickands(cfg, threads)
    norming = compute_norming(cfg.domain, cfg.alphas, cfg.grid, values, offset=cfg.norming_offset)
    params = limit_params(cfg, values, h_bivariate)
    records, lattice, sampler, delta = simulate_extremes(cfg, threads)
    extremes = np.array([[getattr(x, c) for c in EXTREMES_COLUMNS] for x in records])
    normalized = normalize_extremes(extremes, norming)
    report = compare(cfg, extremes, normalized, norming.a_t, params)
    _log.info('experiment %s: supDefect=%.4f maxMinCorr=%.4f', cfg.name, report.sup_defect,
              report.max_min_corr)
    meta = {
        'name': cfg.name,
        'version': __version__,
        'theorem': params.theorem.value,
        'r': params.r,
        'norming': norming.to_dict(),
        'pickands': values.to_dict(),
        'lattice': {'extent': list(lattice.extent), 'step': list(lattice.step),
                    'shape': list(lattice.shape)},
        'sampler': getattr(sampler, 'method', None) or sampler.base.method,
        'grid': {'regime': cfg.grid.regime.value, 'delta': [float(x) for x in delta]},
        'config': cfg.to_dict(),
    }
    return ExperimentResult(cfg, records, extremes, normalized, norming, values, params, report, meta)


def check_acceptance(report: ComparisonReport, acceptance):
    """Check a report against acceptance thresholds.

    :param report: The :class:`ComparisonReport`.
    :param acceptance: The dict with optional keys supDefectMax, ksMax
        (continuous max and min), ksGridMax (grid max and min),
        maxMinCorrAbsMax, maxMinCorrMin, gapQuantile95Max and
        swapDefectMax, where "auto" means 2 / sqrt(reps).
    :return: The list of failure messages, empty on success.
    """
    failures = []

    def upper(key, name, value):
        if key in acceptance and acceptance[key] is not None:
            limit = acceptance[key]
            if limit == 'auto':
                limit = 2.0 / math.sqrt(report.reps)
            if not value <= float(limit):
                failures.append(f'{name} = {value:.6g} exceeds {key} = {float(limit):.6g}')

    upper('supDefectMax', 'supDefect', report.sup_defect)
    upper('ksMax', 'KS maxCont', report.ks['maxCont'])
    upper('ksMax', 'KS minCont', report.ks['minCont'])
    upper('ksGridMax', 'KS maxGrid', report.ks['maxGrid'])
    upper('ksGridMax', 'KS minGrid', report.ks['minGrid'])
    upper('maxMinCorrAbsMax', '|maxMinCorr|', abs(report.max_min_corr))
    upper('gapQuantile95Max', 'gapQuantile95', report.gap_quantile95)
    upper('swapDefectMax', 'swapDefect', report.swap_defect)
    if acceptance.get('maxMinCorrMin') is not None:
        limit = float(acceptance['maxMinCorrMin'])
        if not report.max_min_corr >= limit:
            failures.append(f'maxMinCorr = {report.max_min_corr:.6g} below maxMinCorrMin = {limit:.6g}')
    return failures


@dataclass(frozen=True)
class TailValidation:
    points: int
    exact: float
    psi: float
    ratio_count: float
    ratio_length: float

    def to_dict(self):
        return {
            'points': self.points,
            'exact': self.exact,
            'psi': self.psi,
            'ratioCount': self.ratio_count,
            'ratioLength': self.ratio_length,
        }


def _model_covariance(model, lags):
    if isinstance(model, MixtureFieldSpec):
        return model.covariance(lags)
    return model.evaluate(lags)


def _pair_exceedance(u, rho):
    if rho >= 1.0 - 1e-12:
        return float(scipy.stats.norm.sf(u))
    if rho <= -1.0 + 1e-12:
        return 0.0
    s = math.sqrt(1.0 - rho * rho)

    def integrand(x):
        return scipy.stats.norm.pdf(x) * scipy.stats.norm.sf((u - rho * x) / s)

    value, _ = scipy.integrate.quad(integrand, u, np.inf, epsabs=0.0, epsrel=1e-10, limit=200)
    return value


def _orthant_exceedance(u, cov):
    k = cov.shape[0]
    return float(scipy.stats.multivariate_normal.cdf(
        np.full(k, -u), mean=np.zeros(k), cov=cov, allow_singular=True,
        maxpts=100000 * k, abseps=1e-16, releps=1e-8))


def tail_validation(model: CovarianceModel, S, delta, u):
    """Compare the exact grid-maximum exceedance with the grid count times Psi(u).

    P(max > u) over the grid points {k delta_i <= S_i} is computed by
    inclusion-exclusion over orthant probabilities.

    :param model: The :class:`CovarianceModel`.
    :param S: The per-axis window lengths.
    :param delta: The per-axis grid spacings.
    :param u: The level u >= 3.
    :return: The :class:`TailValidation` with the ratios against
        n Psi(u) (n grid points) and prod(S_i / delta_i) Psi(u).
    :raise ValueError: With more than 6 points or u < 3.
    """
    dim = model.dim
    S = np.broadcast_to(np.atleast_1d(np.asarray(S, dtype=float)), (dim,))
    delta = np.broadcast_to(np.atleast_1d(np.asarray(delta, dtype=float)), (dim,))
    if np.any(delta <= 0) or np.any(S < 0):
        raise ValueError('S must be nonnegative and delta positive')
    if u < TAIL_LEVEL_MIN:
        raise ValueError(f'level u must be >= {TAIL_LEVEL_MIN}, got {u}')
    counts = [int(math.floor(s / d + 1e-9)) + 1 for s, d in zip(S, delta)]
    n = int(np.prod(counts))
    if n > TAIL_POINTS_MAX:
        raise ValueError(f'{n} grid points exceed the exact limit of {TAIL_POINTS_MAX}')
    axes = [np.arange(c) * d for c, d in zip(counts, delta)]
    pts = np.stack([m.ravel() for m in np.meshgrid(*axes, indexing='ij')], axis=-1)
    cov = np.asarray(_model_covariance(model, pts[:, None, :] - pts[None, :, :]), dtype=float).reshape(n, n)
    psi = float(scipy.stats.norm.sf(u))
    total = 0.0
    for k in range(1, n + 1):
        sign = 1.0 if k % 2 else -1.0
        for subset in itertools.combinations(range(n), k):
            if k == 1:
                p = psi
            elif k == 2:
                p = _pair_exceedance(u, float(cov[subset[0], subset[1]]))
            else:
                p = _orthant_exceedance(u, cov[np.ix_(subset, subset)])
            total += sign * p
    length = float(np.prod(S / delta))
    ratio_length = total / (length * psi) if length > 0 else math.inf
    return TailValidation(n, total, psi, total / (n * psi), ratio_length)


@dataclass(frozen=True)
class ConvergenceRow:
    extent: tuple
    seed: int
    sup_defect: float
    ks: dict

    def to_dict(self):
        return {'T': list(self.extent), 'seed': self.seed, 'supDefect': self.sup_defect,
                'perMarginalKS': dict(self.ks)}


@dataclass(frozen=True)
class ConvergenceStudy:
    rows: tuple
    kendall_tau: float
    kendall_p: float

    def ks_nonincreasing(self, name='maxCont'):
        """The number of consecutive rung pairs whose KS distance did not increase."""
        v = [row.ks[name] for row in self.rows]
        return sum(1 for a, b in zip(v[:-1], v[1:]) if b <= a)

    def to_dict(self):
        return {'rows': [row.to_dict() for row in self.rows],
                'kendallTau': self.kendall_tau, 'kendallP': self.kendall_p}


def convergence_study(template: ExperimentConfig, ladder, threads=None):
    """Run one experiment per domain size.

    :param template: The base :class:`ExperimentConfig`.
    :param ladder: At least 3 non-decreasing domain sizes (scalars or
        per-axis vectors).
    :param threads: The worker count.
    :return: The :class:`ConvergenceStudy` with Kendall's tau of supDefect
        against log(prod(T_i)).
    :raise ValueError: On an empty, short or decreasing ladder.
    """
    ladder = list(ladder)
    if len(ladder) < 3:
        raise ValueError(f'convergence ladder needs at least 3 sizes, got {len(ladder)}')
    domains = [template.domain.with_extent(t) for t in ladder]
    volumes = [d.log_volume for d in domains]
    if any(b < a for a, b in zip(volumes[:-1], volumes[1:])):
        raise ValueError('convergence ladder must be non-decreasing')
    rows = []
    for k, domain in enumerate(domains):
        seed = replication_seed(template.master_seed, k, Stream.RUNG)
        cfg = replace(template.with_domain(domain), master_seed=seed)
        result = run_experiment(cfg, threads)
        rows.append(ConvergenceRow(domain.extent, seed, result.report.sup_defect, result.report.ks))
    defects = [row.sup_defect for row in rows]
    if len(set(volumes)) > 1 and len(set(defects)) > 1:
        tau, p = scipy.stats.kendalltau(volumes, defects)
        tau, p = float(tau), float(p)
    else:
        tau, p = math.nan, math.nan
    return ConvergenceStudy(tuple(rows), tau, p)
