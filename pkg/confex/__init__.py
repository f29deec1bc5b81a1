# Copyright 2026 The ConfEx Authors. All Rights Reserved.
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
# ==============================================================================
"""ConfEx: configuration discovery and extraction for container instances

Finds the configuration files of known applications in image or container
snapshots, turns them into uniform key-value records, and ranks or checks
those records against a corpus of peer instances.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

# pylint: disable=wildcard-import
from confex.active import *
from confex.analysis import *
from confex.corpus import *
from confex.disambiguate import *
from confex.discovery import *
from confex.envdata import *
from confex.evaluation import *
from confex.match import *
from confex.parsers import *
from confex.tree import *
from confex.util import *
# pylint: enable=wildcard-import

# Other parts go under sub-packages
from confex import generate
from confex import pipeline

del absolute_import
del division
del print_function
