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

from pyfieldex import __version__
from pyfieldex.config import resolve_threads
import numpy as np
import platform
import psutil
import scipy
import sys


def parser_config(p):
    """Fieldex system information."""
    return on_cmd


def _sys_info():
    cpufreq = psutil.cpu_freq()
    freq = 'unavailable' if cpufreq is None else f'{cpufreq.current:.0f} MHz'
    vm = psutil.virtual_memory()
    vm_available = vm.available / (1024 ** 3)
    vm_total = vm.total / (1024 ** 3)
    return f"""\

    SYSTEM INFORMATION
    ------------------
    python               {sys.version}
    python impl          {platform.python_implementation()}
    platform             {platform.platform()}
    processor            {platform.processor()}
    CPU cores            {psutil.cpu_count(logical=False)} physical, {psutil.cpu_count(logical=True)} total
    CPU frequency        {freq}
    RAM                  {vm_available:.1f} GB available, {vm_total:.1f} GB total
    worker threads       {resolve_threads()}

    PYTHON PACKAGE INFORMATION
    --------------------------
    numpy                {np.__version__}
    scipy                {scipy.__version__}
    pyfieldex            {__version__}
    """


def on_cmd(args):
    print(_sys_info())
    return 0
