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

"""Reproducible random streams.

Every random draw in pyfieldex comes from a Philox (counter-based)
generator keyed by (seed, index, stream).  Replications and Pickands paths
are therefore reproducible regardless of how the work is scheduled across
workers.
"""

import enum
import numpy as np


SEED_MASK = (1 << 64) - 1


class Stream(enum.IntEnum):
    """Stream tags that separate independent uses of one seed."""
    REPLICATION = 0
    FIELD = 1
    MIXTURE = 2
    FBM = 3
    SHIFT = 4
    ORACLE = 5
    RUNG = 6


def _seed_sequence(seed, index, stream, sub=None):
    seed = int(seed)
    if seed < 0:
        raise ValueError(f'seed must be nonnegative, got {seed}')
    key = (int(index), int(stream))
    if sub is not None:
        key += (int(sub),)
    return np.random.SeedSequence(entropy=seed & SEED_MASK, spawn_key=key)


def generator(seed, index=0, stream=Stream.FIELD, sub=None):
    """Construct the generator for one stream.

    :param seed: The 64-bit seed.
    :param index: The replication or path index.
    :param stream: The :class:`Stream` tag.
    :param sub: The optional sub-stream, such as the axis of a
        multi-axis path.
    :return: A numpy Generator backed by Philox.
    """
    return np.random.Generator(np.random.Philox(_seed_sequence(seed, index, stream, sub)))


def replication_seed(master_seed, replication, stream=Stream.REPLICATION):
    """Derive the 64-bit seed of one replication.

    :param master_seed: The experiment master seed.
    :param replication: The replication index.
    :param stream: The derivation tag, such as :attr:`Stream.RUNG` for
        the rungs of a convergence ladder.
    :return: The replication seed as a python int.
    """
    ss = _seed_sequence(master_seed, replication, stream)
    return int(ss.generate_state(1, dtype=np.uint64)[0])
