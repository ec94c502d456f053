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

"""Configuration file loading and worker-count resolution."""

import json
import logging
import os
import psutil
from .errors import ConfigurationError


_log = logging.getLogger(__name__)
THREADS_ENV = 'FIELDEX_THREADS'
CONFIGS_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'configs')


def resolve_threads(threads=None):
    """Resolve the worker count.

    :param threads: The explicit count, or None to use the FIELDEX_THREADS
        environment variable, then the number of physical cores.
    :return: The worker count >= 1.
    :raise ConfigurationError: On a non-integer or nonpositive value.
    """
    source = 'argument'
    if threads is None:
        threads = os.environ.get(THREADS_ENV)
        source = THREADS_ENV
    if threads is None:
        threads = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
        source = 'cpu_count'
    try:
        threads = int(threads)
    except (TypeError, ValueError):
        raise ConfigurationError(f'invalid thread count {threads!r} from {source}')
    if threads < 1:
        raise ConfigurationError(f'thread count must be >= 1, got {threads}')
    _log.debug('threads=%d from %s', threads, source)
    return threads


def bundled_config(name):
    """The path of a configuration shipped with the package."""
    if not name.endswith('.json'):
        name += '.json'
    return os.path.join(CONFIGS_PATH, name)


def load_json(path):
    """Load a JSON configuration file.

    :param path: The file path, or the name of a bundled configuration.
    :return: The parsed dict.
    :raise ConfigurationError: When the file is missing or malformed.
    """
    if not os.path.isfile(path):
        bundled = bundled_config(os.path.basename(path))
        if os.path.dirname(path) == '' and os.path.isfile(bundled):
            path = bundled
        else:
            raise ConfigurationError(f'configuration file not found: {path}')
    try:
        with open(path, 'rt', encoding='utf-8') as f:
            d = json.load(f)
    except json.JSONDecodeError as ex:
        raise ConfigurationError(f'invalid JSON in {path}: {ex}')
    if not isinstance(d, dict):
        raise ConfigurationError(f'{path} must contain a JSON object')
    return d


def load_experiment(path):
    """Load an experiment configuration.

    :param path: The JSON file path or bundled configuration name.
    :return: The :class:`pyfieldex.harness.ExperimentConfig`.
    """
    from .harness import ExperimentConfig
    return ExperimentConfig.from_dict(load_json(path))
