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

from .version import *
from .errors import FieldexError, ConfigurationError, SimulationError, FittingError
from .covmodels import CovarianceModel, MixtureFieldSpec
from .grids import DomainSpec, GridSpec, GridRegime
from .fieldsim import LatticeSpec, sample_field, sample_mixture_field, sample_fbm
from .norming import compute_norming, to_levels, normalize_extremes
from .pickands import PickandsConfig, estimate_h_alpha, estimate_h_a_alpha, estimate_h_bivariate
from .limitlaws import Theorem, LimitParams, joint_cdf, marginal_max_cdf
from .harness import ExperimentConfig, run_experiment


__all__ = [
    'FieldexError', 'ConfigurationError', 'SimulationError', 'FittingError',
    'CovarianceModel', 'MixtureFieldSpec',
    'DomainSpec', 'GridSpec', 'GridRegime',
    'LatticeSpec', 'sample_field', 'sample_mixture_field', 'sample_fbm',
    'compute_norming', 'to_levels', 'normalize_extremes',
    'PickandsConfig', 'estimate_h_alpha', 'estimate_h_a_alpha', 'estimate_h_bivariate',
    'Theorem', 'LimitParams', 'joint_cdf', 'marginal_max_cdf',
    'ExperimentConfig', 'run_experiment',
    '__version__', '__title__', '__description__', '__url__',
    '__author__', '__author_email__', '__license__',
    '__copyright__']
