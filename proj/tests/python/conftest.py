# Copyright 2026 The advmt Authors
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

import os
import sys
from pathlib import Path

# Importable both from an installed wheel and from the CMake build tree
# (ctest exports ADVMT_MODULE_DIR -> directory holding _advmt*.so).
module_dir = os.environ.get("ADVMT_MODULE_DIR")
if module_dir:
    sys.path.insert(0, module_dir)
sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "python"))
