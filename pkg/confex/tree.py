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
"""Intermediate configuration trees.

A `ConfigTree` is what every parser in `confex.parsers` produces and what
`confex.disambiguate` rewrites. Nodes keep their children in file order and
number same-key siblings densely from 1, the way Augeas numbers
`directive[1]`, `directive[2]`, ...
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import re
from typing import Dict, Iterator, List, Optional

from six import string_types

from confex import util

__all__ = [
  "TreeFormat",
  "ConfigNode",
  "ConfigTree",
  "dump_tree",
  "load_dump",
]


class TreeFormat(object):
  """
  Enum-like class for the source syntax a tree was parsed from.
  """
  HTTPD = "httpd"
  NGINX = "nginx"
  INI = "ini"
  FSTAB_TABLE = "fstab_table"
  COLON_TABLE = "colon_table"
  SERVICES_TABLE = "services_table"

  ALL = (HTTPD, NGINX, INI, FSTAB_TABLE, COLON_TABLE, SERVICES_TABLE)


class ConfigNode(object):
  """
  One node of an intermediate configuration tree.

  Section nodes (`is_section=True`) group other nodes: httpd `<IfModule>`
  blocks, nginx `{}` blocks, INI `[section]` headers and table rows. Every
  other node is an entry; entries without children become records when a
  tree is flattened.
  """

  def __init__(self,
               key,  # type: str
               value=None,  # type: Optional[str]
               children=None,  # type: Optional[List[ConfigNode]]
               is_section=False  # type: bool
               ):
    if not isinstance(key, string_types):
      raise TypeError("Node key must be a string, got {}".format(type(key)))
    if value is not None and not isinstance(value, string_types):
      raise TypeError("Node value must be a string or None, got {}".format(
        type(value)))
    self._key = key
    self._value = value
    self._is_section = bool(is_section)
    self._ordinal = 1
    self._parent = None  # type: Optional[ConfigNode]
    self._children = []  # type: List[ConfigNode]
    self._key_counts = {}  # type: Dict[str, int]
    for c in children or []:
      self.add_child(c)

  @property
  def key(self):
    # type: () -> str
    return self._key

  @property
  def value(self):
    # type: () -> Optional[str]
    return self._value

  @property
  def is_section(self):
    # type: () -> bool
    return self._is_section

  @property
  def ordinal(self):
    # type: () -> int
    """1-based position of this node among its same-key siblings."""
    return self._ordinal

  @property
  def parent(self):
    return self._parent

  @property
  def children(self):
    """Read-only view of the children, in file order."""
    return util.ListView(self._children)

  @property
  def is_leaf(self):
    # type: () -> bool
    return not self._children

  def child_values(self, key):
    # type: (str) -> List[Optional[str]]
    """Values of the direct children whose key is `key`, in order."""
    return [c.value for c in self._children if c.key == key]

  def add_child(self, child):
    # type: (ConfigNode) -> ConfigNode
    """Append `child` and number it. Returns the child for chaining."""
    if not isinstance(child, ConfigNode):
      raise TypeError("Expected ConfigNode, got {}".format(type(child)))
    if child._parent is not None:
      raise ValueError("Node {} already has a parent".format(child))
    child._parent = self
    self._children.append(child)
    self._key_counts[child.key] = self._key_counts.get(child.key, 0) + 1
    child._ordinal = self._key_counts[child.key]
    return child

  def remove_child(self, child):
    # type: (ConfigNode) -> None
    """Detach `child` and renumber the remaining siblings."""
    for i, c in enumerate(self._children):
      if c is child:
        del self._children[i]
        child._parent = None
        child._ordinal = 1
        self._renumber()
        return
    raise ValueError("Node {} is not a child of {}".format(child, self))

  def set_children(self, children):
    # type: (List[ConfigNode]) -> None
    """Replace all children of this node."""
    for c in self._children:
      c._parent = None
    self._children = []
    self._key_counts = {}
    for c in children:
      self.add_child(c)

  def _renumber(self):
    self._key_counts = {}
    for c in self._children:
      self._key_counts[c.key] = self._key_counts.get(c.key, 0) + 1
      c._ordinal = self._key_counts[c.key]

  def path(self):
    # type: () -> str
    """Augeas-style location of this node, e.g. `/IfModule[1]/directive[2]`."""
    parts = []
    n = self
    while n is not None and n._parent is not None:
      parts.append("{}[{}]".format(n.key, n.ordinal))
      n = n._parent
    return "/" + "/".join(reversed(parts))

  def walk(self):
    # type: () -> Iterator[ConfigNode]
    """Pre-order traversal of this node's subtree, excluding the node."""
    for c in self._children:
      yield c
      for d in c.walk():
        yield d

  def copy(self):
    # type: () -> ConfigNode
    return ConfigNode(self._key, self._value,
                      [c.copy() for c in self._children], self._is_section)

  def __eq__(self, other):
    if not isinstance(other, ConfigNode):
      return False
    return (self._key == other._key and self._value == other._value
            and self._is_section == other._is_section
            and self._children == other._children)

  def __ne__(self, other):
    return not self == other

  __hash__ = None

  def __repr__(self):
    return "ConfigNode({!r}, {!r}, section={}, children={})".format(
      self._key, self._value, self._is_section, len(self._children))


class ConfigTree(object):
  """
  A parsed configuration file: a synthetic root plus the source syntax and
  the path the content came from.
  """

  def __init__(self, root=None, file_format=None, source_path=None):
    if file_format is not None and file_format not in TreeFormat.ALL:
      raise ValueError("Unknown tree format '{}'".format(file_format))
    self._root = root if root is not None else ConfigNode("", is_section=True)
    self._format = file_format
    self._source_path = source_path

  @property
  def root(self):
    # type: () -> ConfigNode
    return self._root

  @property
  def format(self):
    # type: () -> Optional[str]
    return self._format

  @property
  def source_path(self):
    # type: () -> Optional[str]
    return self._source_path

  def walk(self):
    # type: () -> Iterator[ConfigNode]
    return self._root.walk()

  def leaves(self):
    # type: () -> List[ConfigNode]
    """Entry nodes without children, in pre-order."""
    return [n for n in self.walk() if n.is_leaf and not n.is_section]

  def copy(self):
    # type: () -> ConfigTree
    return ConfigTree(self._root.copy(), self._format, self._source_path)

  def __eq__(self, other):
    if not isinstance(other, ConfigTree):
      return False
    return self._format == other._format and self._root == other._root

  def __ne__(self, other):
    return not self == other

  __hash__ = None

  def __len__(self):
    return sum(1 for _ in self.walk())

  def __str__(self):
    return dump_tree(self)


# Debug dump: `key[ordinal] (value)`, two spaces of indent per level, a
# trailing `/` on section nodes and no parentheses when the value is None.
_DUMP_LINE_RE = re.compile(
  r"^(?P<indent>(?:  )*)(?P<key>.*?)\[(?P<ordinal>\d+)\](?P<section>/?)"
  r"(?: \((?P<value>.*)\))?$")


def dump_tree(tree):
  # type: (ConfigTree) -> str
  """Render `tree` in the indented debug format, one node per line."""
  lines = []

  def _dump(n, depth):
    line = "{}{}[{}]{}".format("  " * depth, n.key, n.ordinal,
                               "/" if n.is_section else "")
    if n.value is not None:
      line += " ({})".format(n.value)
    lines.append(line)
    for c in n.children:
      _dump(c, depth + 1)

  for c in tree.root.children:
    _dump(c, 0)
  return "".join(l + "\n" for l in lines)


def load_dump(text, file_format=None, source_path=None):
  # type: (str, Optional[str], Optional[str]) -> ConfigTree
  """Inverse of `dump_tree`.

  Raises:
    ValueError: if a line does not follow the dump format or skips an
      indentation level.
  """
  root = ConfigNode("", is_section=True)
  stack = [root]
  for line_number, line in enumerate(text.splitlines(), 1):
    if not line.strip():
      continue
    m = _DUMP_LINE_RE.match(line)
    if m is None:
      raise ValueError("Line {}: not a tree dump line: {!r}".format(
        line_number, line))
    depth = len(m.group("indent")) // 2
    if depth > len(stack) - 1:
      raise ValueError("Line {}: indentation skips a level".format(
        line_number))
    del stack[depth + 1:]
    n = ConfigNode(m.group("key"), m.group("value"),
                   is_section=bool(m.group("section")))
    stack[depth].add_child(n)
    if n.ordinal != int(m.group("ordinal")):
      raise ValueError("Line {}: ordinal {} does not match position {}".format(
        line_number, m.group("ordinal"), n.ordinal))
    stack.append(n)
  return ConfigTree(root, file_format, source_path)
