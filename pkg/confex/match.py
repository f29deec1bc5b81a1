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
"""Simple tree node matching functions."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import re

from six import string_types

from confex import tree

__all__ = [
  "node_key",
  "NodeMatcher",
]


def node_key(keys, n=None):
  """Check if a node has one of the given keys.

  Args:
    keys: tuple of strings containing the keys to check against.
      For instance: ("directive", "arg")
    n: the node to check (or None).
  Returns:
    if n is not None, return True if the node has one of the keys.
    if n is None, return a lambda function which does the checking.
  """
  if isinstance(keys, string_types):
    keys = (keys,)
  if n is None:
    return lambda node: node.key in keys
  else:
    return n.key in keys


class NodeMatcher(object):
  """Predicate over `ConfigNode`s, built up with chained conditions.

  The positive filter is a regular expression searched against the node key,
  a callable, or `True` for "any node". Further conditions are added with the
  builder methods, each of which returns the matcher:

    NodeMatcher("^directive$").has_value().value_in("Redirect", "Alias")
  """

  def __init__(self, positive_filter=True):
    self.positive_filters = []
    self.has_value_match = None
    self.value_set = None
    self.child_key_matches = None
    self.section_match = None
    self.positive_filters.append(
      self._finalize_positive_filter(positive_filter))

  @staticmethod
  def _finalize_positive_filter(elem):
    """Convert to a filter function."""
    if isinstance(elem, string_types):
      regex_ = re.compile(elem)
      return lambda n, regex=regex_: regex.search(n.key) is not None
    elif elem is True:
      return lambda n: True
    elif callable(elem):
      return elem
    else:
      raise ValueError("Cannot finalize the positive filter: {}".format(elem))

  def __call__(self, n):
    """Evaluate if the node matches or not."""
    if not isinstance(n, tree.ConfigNode):
      raise TypeError("Expect ConfigNode, got: {}".format(type(n)))
    for positive_filter in self.positive_filters:
      if not positive_filter(n):
        return False
    if self.has_value_match is not None:
      if (n.value is not None) != self.has_value_match:
        return False
    if self.value_set is not None and n.value not in self.value_set:
      return False
    if self.section_match is not None and n.is_section != self.section_match:
      return False
    if self.child_key_matches is not None:
      present = set(c.key for c in n.children)
      if not all(k in present for k in self.child_key_matches):
        return False
    return True

  def has_value(self, flag=True):
    """Require the node to carry a value (or, with `flag=False`, none)."""
    if self.has_value_match is not None:
      raise ValueError("has_value is already set.")
    self.has_value_match = bool(flag)
    return self

  def value_in(self, *values):
    """Require the node value to be one of `values`."""
    if self.value_set is not None:
      raise ValueError("value_in is already set.")
    self.value_set = frozenset(values)
    return self

  def child_keys(self, *keys):
    """Require children with each of the given keys."""
    if self.child_key_matches is not None:
      raise ValueError("child_keys is already set.")
    self.child_key_matches = tuple(keys)
    return self

  def section(self, flag=True):
    """Require the node to be a section (or, with `flag=False`, an entry)."""
    if self.section_match is not None:
      raise ValueError("section is already set.")
    self.section_match = bool(flag)
    return self

  @classmethod
  def from_dict(cls, spec):
    """Build a matcher from the `match:` mapping of a rule file.

    Recognized fields: `key` (regex), `has_value`, `value_in`, `child_keys`,
    `section`. An absent or empty mapping matches every node.
    """
    spec = dict(spec or {})
    unknown = set(spec) - {"key", "has_value", "value_in", "child_keys",
                           "section"}
    if unknown:
      raise ValueError("Unknown match fields: {}".format(sorted(unknown)))
    m = cls(spec.get("key", True))
    if "has_value" in spec:
      m.has_value(spec["has_value"])
    if "value_in" in spec:
      m.value_in(*spec["value_in"])
    if "child_keys" in spec:
      m.child_keys(*spec["child_keys"])
    if "section" in spec:
      m.section(spec["section"])
    return m
