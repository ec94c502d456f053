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
Exact simulation of stationary Gaussian fields on regular lattices.

The lattice covariance is embedded in a (block) circulant matrix whose
eigenvalues are the FFT of its first row.  When the embedding is
nonnegative definite, one complex FFT of scaled complex white noise
yields an exact sample in its real part.  Small lattices whose embedding
fails fall back to a dense Cholesky factor.

Fractional Brownian motion uses the same embedding for the fractional
Gaussian noise autocovariance (the Davies-Harte construction), which is
nonnegative definite for every Hurst index in (0, 1).
"""

from dataclasses import dataclass
import logging
import math
import struct
import numpy as np
import scipy.fft
import scipy.linalg
from .covmodels import CovarianceModel, MixtureFieldSpec
from .errors import SimulationError
from .rng import generator, Stream


_log = logging.getLogger(__name__)
MEMORY_CAP = 1 << 24
DENSE_POINTS_MAX = 4096
PAD_DOUBLINGS = 3
EIGENVALUE_TOLERANCE = 1e-10
DUMP_MAGIC = b'FEXS'
DUMP_VERSION = 1
_DUMP_HEADER = struct.Struct('<4sIIIIQ4x')  # 32 bytes


@dataclass(frozen=True)
class LatticeSpec:
    """The regular lattice prod({0, h_i, 2 h_i, ...} cap [0, T_i]).

    :param extent: The per-axis lengths T_i > 0.
    :param step: The per-axis spacings h_i > 0.
    :param memory_cap: The maximum total number of lattice points.
    """
    extent: tuple
    step: tuple
    memory_cap: int = MEMORY_CAP

    def __post_init__(self):
        extent = tuple(float(x) for x in np.atleast_1d(self.extent))
        step = tuple(float(x) for x in np.atleast_1d(self.step))
        if len(step) == 1 and len(extent) > 1:
            step = step * len(extent)
        if len(extent) != len(step):
            raise ValueError('extent and step lengths differ')
        if len(extent) not in (1, 2):
            raise ValueError(f'lattice dimension must be 1 or 2, got {len(extent)}')
        if any(t <= 0 for t in extent) or any(h <= 0 for h in step):
            raise ValueError('extent and step must be positive')
        object.__setattr__(self, 'extent', extent)
        object.__setattr__(self, 'step', step)
        if self.size > self.memory_cap:
            raise ValueError(f'lattice has {self.size} points, cap is {self.memory_cap}')

    @staticmethod
    def points(count, step):
        """Construct a lattice from the number of points per axis."""
        count = np.atleast_1d(count)
        step = np.broadcast_to(np.atleast_1d(np.asarray(step, dtype=float)), count.shape)
        extent = tuple(float((n - 1) * h) if n > 1 else float(h) * 0.5 for n, h in zip(count, step))
        return LatticeSpec(extent, tuple(step))

    @property
    def dim(self):
        return len(self.extent)

    @property
    def shape(self):
        """The point count n_i = floor(T_i / h_i) + 1 per axis."""
        return tuple(int(math.floor(t / h + 1e-9)) + 1 for t, h in zip(self.extent, self.step))

    @property
    def size(self):
        return int(np.prod(self.shape))

    def coordinates(self):
        """The (size, dim) array of lattice points in row-major order."""
        axes = [np.arange(n) * h for n, h in zip(self.shape, self.step)]
        mesh = np.meshgrid(*axes, indexing='ij')
        return np.stack([m.ravel() for m in mesh], axis=-1)


@dataclass(frozen=True)
class FieldSample:
    lattice: LatticeSpec
    values: np.ndarray
    seed: int


@dataclass(frozen=True)
class FbmPath:
    hurst: float
    step: float
    values: np.ndarray

    @property
    def times(self):
        return np.arange(len(self.values)) * self.step


def _signed_lags(m, h):
    j = np.arange(m)
    return np.where(j <= m // 2, j, j - m) * h


def _embedding_eigenvalues(model, lattice, sizes):
    lags = [_signed_lags(m, h) for m, h in zip(sizes, lattice.step)]
    mesh = np.meshgrid(*lags, indexing='ij')
    row = model.evaluate(np.stack(mesh, axis=-1))
    return scipy.fft.fftn(row).real


def _clamp(eigenvalues):
    """Clamp floating-point noise, return (eigenvalues, min_eigenvalue, ok)."""
    lambda_max = float(np.max(eigenvalues))
    lambda_min = float(np.min(eigenvalues))
    if lambda_min >= -EIGENVALUE_TOLERANCE * max(1.0, lambda_max):
        return np.maximum(eigenvalues, 0.0), lambda_min, True
    return eigenvalues, lambda_min, False


class FieldSampler:
    """Exact sampler for one (model, lattice) pair.

    :param model: The :class:`CovarianceModel`.
    :param lattice: The :class:`LatticeSpec`.
    :param method: 'auto' (circulant, then dense fallback), 'circulant'
        or 'dense'.
    :raise SimulationError: If no exact method applies.

    The embedding or factor is computed once.  Afterwards the sampler holds
    only read-only arrays, so one instance may serve concurrent workers.
    """

    def __init__(self, model: CovarianceModel, lattice: LatticeSpec, method=None):
        if model.dim != lattice.dim:
            raise ValueError(f'model dim {model.dim} does not match lattice dim {lattice.dim}')
        method = 'auto' if method is None else method
        if method not in ('auto', 'circulant', 'dense'):
            raise ValueError(f'unknown method {method}')
        self.model = model
        self.lattice = lattice
        self._shape = lattice.shape
        self._sqrt_eig = None
        self._factor = None
        self.method = None
        self.embedding_shape = None
        if lattice.size == 1:
            self.method = 'single'
            return
        min_eigenvalue = None
        if method in ('auto', 'circulant'):
            min_eigenvalue = self._embed()
            if self._sqrt_eig is not None:
                return
            if method == 'circulant' or lattice.size > DENSE_POINTS_MAX:
                raise SimulationError(
                    f'circulant embedding not nonnegative definite, most negative eigenvalue {min_eigenvalue:g}',
                    min_eigenvalue=min_eigenvalue)
            _log.warning('circulant embedding failed (min eigenvalue %g), using dense factorization',
                         min_eigenvalue)
        self._dense()

    def _embed(self):
        base = [scipy.fft.next_fast_len(2 * (n - 1)) if n > 1 else 1 for n in self._shape]
        min_eigenvalue = None
        for doubling in range(PAD_DOUBLINGS + 1):
            sizes = tuple(m * (1 << doubling) if m > 1 else 1 for m in base)
            eigenvalues = _embedding_eigenvalues(self.model, self.lattice, sizes)
            eigenvalues, min_eigenvalue, ok = _clamp(eigenvalues)
            if ok:
                total = float(np.prod(sizes))
                sqrt_eig = np.sqrt(eigenvalues / total)
                sqrt_eig.setflags(write=False)
                self._sqrt_eig = sqrt_eig
                self.embedding_shape = sizes
                self.method = 'circulant'
                _log.info('circulant embedding %s for lattice %s', sizes, self._shape)
                return min_eigenvalue
            _log.debug('embedding %s has min eigenvalue %g', sizes, min_eigenvalue)
        return min_eigenvalue

    def _dense(self):
        c = _dense_covariance(self.model, self.lattice)
        self._factor = _stable_cholesky(c)
        self._factor.setflags(write=False)
        self.method = 'dense'

    def sample_values(self, rng):
        """Draw one field realization with the given generator.

        :param rng: The numpy Generator.
        :return: The array with the lattice shape.
        """
        if self.method == 'single':
            return rng.standard_normal(self._shape)
        if self.method == 'dense':
            z = rng.standard_normal(self._factor.shape[0])
            return (self._factor @ z).reshape(self._shape)
        shape = self.embedding_shape
        noise = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        y = scipy.fft.fftn(self._sqrt_eig * noise).real
        index = tuple(slice(0, n) for n in self._shape)
        return np.ascontiguousarray(y[index])

    def sample(self, seed):
        """Draw the field for one 64-bit seed.

        :param seed: The replication seed.
        :return: The :class:`FieldSample`.
        """
        values = self.sample_values(generator(seed, 0, Stream.FIELD))
        return FieldSample(self.lattice, values, int(seed))


def _dense_covariance(model, lattice):
    return _symmetrize(model.evaluate(
        lattice.coordinates()[:, None, :] - lattice.coordinates()[None, :, :]))


def _symmetrize(c):
    return 0.5 * (c + c.T)


def _stable_cholesky(c):
    """Lower Cholesky factor with increasing diagonal loading on failure."""
    n = c.shape[0]
    jitter = 0.0
    for power in range(-14, -5):
        try:
            factor = scipy.linalg.cholesky(c + jitter * np.eye(n), lower=True)
            if jitter:
                _log.warning('dense factorization required jitter %g', jitter)
            return factor
        except np.linalg.LinAlgError:
            jitter = 10.0 ** power
    w, v = scipy.linalg.eigh(c)
    if w[0] < -1e-8 * max(1.0, w[-1]):
        raise SimulationError(f'covariance matrix not positive semidefinite, min eigenvalue {w[0]:g}',
                              min_eigenvalue=float(w[0]))
    return v * np.sqrt(np.maximum(w, 0.0))


def sample_field(model, lattice, seed, method=None):
    """Draw one exact sample of the stationary field on a lattice.

    :param model: The :class:`CovarianceModel`.
    :param lattice: The :class:`LatticeSpec`.
    :param seed: The 64-bit seed.  Equal (model, lattice, seed)
        reproduce identical values.
    :param method: See :class:`FieldSampler`.
    :return: The :class:`FieldSample`.
    """
    return FieldSampler(model, lattice, method).sample(seed)


class MixtureSampler:
    """Sampler of sqrt(1 - rho) Y + sqrt(rho) U for a :class:`MixtureFieldSpec`."""

    def __init__(self, spec: MixtureFieldSpec, lattice: LatticeSpec, method=None):
        self.spec = spec
        self.lattice = lattice
        self.base = FieldSampler(spec.base, lattice, method)

    def sample(self, seed):
        sample = self.base.sample(seed)
        rho = self.spec.rho
        if rho == 0.0:
            return sample
        u = generator(seed, 0, Stream.MIXTURE).standard_normal()
        values = math.sqrt(1.0 - rho) * sample.values + math.sqrt(rho) * u
        return FieldSample(self.lattice, values, int(seed))


def sample_mixture_field(spec, lattice, seed, method=None):
    """Draw one sample of the strongly dependent mixture field.

    :param spec: The :class:`MixtureFieldSpec`.
    :param lattice: The :class:`LatticeSpec`.
    :param seed: The 64-bit seed.  U is drawn from its own substream.
    :param method: See :class:`FieldSampler`.
    :return: The :class:`FieldSample`.  rTarget = 0 returns the base
        sample unchanged.
    """
    return MixtureSampler(spec, lattice, method).sample(seed)


def sampler_for(model, lattice, method=None):
    """Construct the sampler matching a model or mixture specification."""
    if isinstance(model, MixtureFieldSpec):
        return MixtureSampler(model, lattice, method)
    return FieldSampler(model, lattice, method)


def fgn_autocovariance(hurst, count):
    """Autocovariance of unit-step fractional Gaussian noise at lags 0..count-1."""
    k = np.arange(count, dtype=float)
    h2 = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** h2 - 2.0 * k ** h2 + np.abs(k - 1) ** h2)


class FgnSampler:
    """Davies-Harte sampler for n increments of fractional Gaussian noise.

    :param hurst: The Hurst index in (0, 1).
    :param count: The number of increments n.
    :param step: The time step; increments have variance step^(2H).
    """

    def __init__(self, hurst, count, step):
        if not 0.0 < hurst < 1.0:
            raise ValueError(f'hurst must be in (0, 1), got {hurst}')
        self.hurst = float(hurst)
        self.count = int(count)
        self.scale = float(step) ** self.hurst
        self._sqrt_eig = None
        if self.hurst == 0.5 or self.count < 2:
            return
        gamma = fgn_autocovariance(self.hurst, self.count + 1)
        row = np.concatenate([gamma, gamma[-2:0:-1]])
        eigenvalues, min_eigenvalue, ok = _clamp(scipy.fft.fft(row).real)
        if not ok:
            raise SimulationError(f'fGn embedding failed, min eigenvalue {min_eigenvalue:g}',
                                  min_eigenvalue=min_eigenvalue)
        sqrt_eig = np.sqrt(eigenvalues / len(row))
        sqrt_eig.setflags(write=False)
        self._sqrt_eig = sqrt_eig

    def sample(self, rng, batch=None):
        """Draw increments.

        :param rng: The generator, or a list of generators (one per row).
        :param batch: None for a single path, else the number of rows,
            which must match the list of generators.
        :return: The increments with shape (count,) or (batch, count).
        """
        rngs = [rng] if batch is None else list(rng)
        if self._sqrt_eig is None:
            x = np.stack([r.standard_normal(self.count) for r in rngs])
        else:
            m = len(self._sqrt_eig)
            noise = np.stack([r.standard_normal(m) + 1j * r.standard_normal(m) for r in rngs])
            x = scipy.fft.fft(self._sqrt_eig * noise, axis=-1).real[:, :self.count]
        x = x * self.scale
        return x[0] if batch is None else x


def _validate_fbm(hurst, lam, step):
    if not 0.0 < hurst < 1.0:
        raise ValueError(f'hurst must be in (0, 1), got {hurst}')
    if lam <= 0:
        raise ValueError(f'lambda must be positive, got {lam}')
    if not 0.0 < step <= lam / 4.0:
        raise ValueError(f'step must be in (0, lambda / 4], got {step}')
    return int(round(lam / step))


def sample_fbm(hurst, lam, step, seed):
    """Draw fractional Brownian motion on {0, step, ..., lambda}.

    :param hurst: The Hurst index H in (0, 1), which is alpha / 2.
    :param lam: The horizon lambda.
    :param step: The grid spacing in (0, lambda / 4].
    :param seed: The 64-bit seed.
    :return: The :class:`FbmPath` with B(0) = 0 and E B(t)^2 = t^(2H).
    """
    n = _validate_fbm(hurst, lam, step)
    increments = FgnSampler(hurst, n, step).sample(generator(seed, 0, Stream.FBM))
    values = np.concatenate([[0.0], np.cumsum(increments)])
    return FbmPath(float(hurst), float(step), values)


def two_sided_from_increments(increments):
    """Build a two-sided path on {-n, ..., n} anchored at index n.

    :param increments: The (..., 2n) increments.
    :return: The (..., 2n + 1) path with value 0 at index n.
    """
    n2 = increments.shape[-1]
    n = n2 // 2
    shape = increments.shape[:-1] + (n2 + 1,)
    path = np.zeros(shape)
    path[..., 1:] = np.cumsum(increments, axis=-1)
    return path - path[..., n:n + 1]


def dump_sample(sample: FieldSample, path):
    """Write a sample as a 32-byte header and little-endian float64 values."""
    shape = list(sample.lattice.shape) + [0]
    header = _DUMP_HEADER.pack(DUMP_MAGIC, DUMP_VERSION, sample.lattice.dim,
                               shape[0], shape[1], int(sample.seed) & ((1 << 64) - 1))
    with open(path, 'wb') as f:
        f.write(header)
        f.write(np.ascontiguousarray(sample.values, dtype='<f8').tobytes())


def load_sample(path, step=None):
    """Read a sample written by :func:`dump_sample`.

    :param path: The file path.
    :param step: The lattice step or per-axis steps, which the header
        does not store.
        None uses 1.0.
    :return: The :class:`FieldSample`.
    """
    with open(path, 'rb') as f:
        data = f.read()
    if len(data) < _DUMP_HEADER.size:
        raise ValueError('invalid sample file')
    magic, version, dim, n1, n2, seed = _DUMP_HEADER.unpack(data[:_DUMP_HEADER.size])
    if magic != DUMP_MAGIC:
        raise ValueError('invalid sample file magic')
    if version != DUMP_VERSION:
        raise ValueError(f'unsupported sample file version {version}')
    shape = (n1,) if dim == 1 else (n1, n2)
    values = np.frombuffer(data[_DUMP_HEADER.size:], dtype='<f8').astype(float).reshape(shape)
    step = 1.0 if step is None else step
    return FieldSample(LatticeSpec.points(shape, step), values, seed)
