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


__version__ = "0.3.1"

__title__ = "pyfieldex"
__description__ = 'Joint extremes of Gaussian random fields on continuous domains and grids'
__url__ = 'https://github.com/fieldex/pyfieldex'
__author__ = 'Fieldex Developers'
__author_email__ = 'fieldex-dev@users.noreply.github.com'
__license__ = 'Apache 2.0'
__copyright__ = 'Copyright 2026 Fieldex Developers'

__all__ = ['__version__', '__title__', '__description__', '__url__',
           '__author__', '__author_email__', '__license__',
           '__copyright__']
