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
"""Convert a ConfigTree to a GraphViz digraph."""

from confex.tree import ConfigTree
from confex.visualization.graphviz_style import edge_pref, entry_node_pref, \
  graph_pref, section_node_pref

__all__ = [
  "add_digraph",
  "node_label",
  "tree_to_digraph",
]

_MAX_VALUE_CHARS = 40


def add_digraph(name=None, style=True):
  """Return an empty graphviz.Digraph, styled unless `style` is False."""
  try:
    import graphviz as gv
  except ImportError:
    raise ImportError(
      "You need to install graphviz to be able to use this functionality. "
      "See https://graphviz.readthedocs.io/en/stable/manual.html for details.")

  digraph = gv.Digraph(name=name)
  if style:
    digraph.graph_attr.update(graph_pref)
    digraph.edge_attr.update(edge_pref)
  return digraph


def node_label(n):
  """`key[ordinal]`, plus the value (shortened) when there is one."""
  label = "{}[{}]".format(n.key, n.ordinal) if n.parent is not None else "/"
  if n.value is not None:
    value = n.value
    if len(value) > _MAX_VALUE_CHARS:
      value = value[:_MAX_VALUE_CHARS - 3] + "..."
    label += "\n" + value
  return label


def tree_to_digraph(tree, name=None, style=True):
  """
  Build a digraph with one vertex per tree node and an edge from every node
  to each of its children. Vertex ids are node paths.

  Args:
    tree: A `ConfigTree`.
    name: Name of the digraph; defaults to the tree's source path.
    style: Apply the default styles.

  Returns:
    A `graphviz.Digraph`.

  Raises:
    TypeError: if `tree` is not a `ConfigTree`.
    ImportError: if graphviz is not installed.
  """
  if not isinstance(tree, ConfigTree):
    raise TypeError("Expected ConfigTree, got {}".format(type(tree)))
  digraph = add_digraph(name or tree.source_path, style)
  for n in [tree.root] + list(tree.walk()):
    attributes = {}
    if style:
      attributes = dict(section_node_pref if n.is_section else entry_node_pref)
    digraph.node(n.path(), label=node_label(n), **attributes)
    if n.parent is not None:
      digraph.edge(n.parent.path(), n.path())
  return digraph
