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

"""Exceptions raised by pyfieldex."""


class FieldexError(Exception):
    """Base class for all pyfieldex errors."""


class ConfigurationError(FieldexError, ValueError):
    """The configuration is inconsistent, such as a grid regime with the
    wrong parameters or a missing Pickands constant."""


class SimulationError(FieldexError, RuntimeError):
    """The field could not be simulated.

    :param msg: The error message.
    :param min_eigenvalue: The most negative circulant embedding
        eigenvalue, when the failure is an embedding failure.
    """

    def __init__(self, msg, min_eigenvalue=None):
        super().__init__(msg)
        self.min_eigenvalue = min_eigenvalue


class FittingError(FieldexError, ArithmeticError):
    """The least-squares design is degenerate."""
