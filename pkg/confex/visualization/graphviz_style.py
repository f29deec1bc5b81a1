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
"""Default GraphViz styles to use."""


graph_pref = {
    'fontcolor': '#414141',
    'style': 'rounded',
    'rankdir': 'LR',
}

section_node_pref = {
    'shape': 'box',
    'style': 'rounded,filled',
    'fillcolor': '#eeeeee',
    'color': '#aaaaaa',
    'penwidth': '2',
}

entry_node_pref = {
    'shape': 'box',
    'style': 'filled',
    'fillcolor': 'white',
    'color': '#aaaaaa',
    'penwidth': '1.5',
    'fontcolor': '#414141',
}

edge_pref = {
    'color': '#aaaaaa',
    'arrowsize': '0.8',
    'penwidth': '1.5',
}
