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
"""
disambiguate.py

Rule-driven rewrites of intermediate trees into trees whose keys name one
configuration parameter each, and flattening of those trees into
`ConfigRecord` rows.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
import os
import re
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

import yaml

from confex import parsers, util
from confex.match import NodeMatcher
from confex.tree import ConfigNode, ConfigTree

__all__ = [
  "RuleAction",
  "TransformRule",
  "TransformError",
  "ConfigRecord",
  "HTTPD_COMMANDS",
  "disambiguate",
  "flatten",
  "flatten_raw",
  "key_stability_check",
  "load_rules",
  "rules_from_document",
  "bundled_rule_dir",
  "write_records",
  "read_records",
  "split_key",
]

# Multi-argument httpd directives whose first argument is part of the key.
HTTPD_COMMANDS = (
  "Redirect", "RedirectMatch", "RedirectPermanent", "RedirectTemp",
  "Alias", "AliasMatch", "ScriptAlias", "ScriptAliasMatch",
  "SetEnv", "SetEnvIf", "RewriteRule", "RewriteCond",
  "Header", "RequestHeader", "ErrorDocument",
)

split_key = util.split_key


class RuleAction(object):
  """
  Enum-like class for the rewrites a `TransformRule` can apply.
  """
  PROMOTE_VALUE_TO_KEY = "promote_value_to_key"
  COMMAND_KEY_WITH_FIRST_ARG = "command_key_with_first_arg"
  SECTION_KEY_WITH_ARGS = "section_key_with_args"
  PASSTHROUGH = "passthrough"
  DROP = "drop"

  ALL = (PROMOTE_VALUE_TO_KEY, COMMAND_KEY_WITH_FIRST_ARG,
         SECTION_KEY_WITH_ARGS, PASSTHROUGH, DROP)


class TransformError(ValueError):
  """Raised when no rule applies to a node."""

  def __init__(self, node_path, message):
    super(TransformError, self).__init__("{}: {}".format(node_path, message))
    self.node_path = node_path


class TransformRule(object):
  """
  One pattern-action rule: `match` selects nodes, `action` rewrites them.

  Action parameters:
    arg_key: key of the argument children consumed by the rewrite
      (default `arg`).
    joiner: string placed between joined argument values (default a space).
  """

  def __init__(self,
               application,  # type: str
               match,  # type: Callable[[ConfigNode], bool]
               action,  # type: str
               parameters=None,  # type: Optional[Dict[str, str]]
               name=None  # type: Optional[str]
               ):
    if action not in RuleAction.ALL:
      raise ValueError("Unknown rule action '{}'".format(action))
    self._application = application
    self._match = match
    self._action = action
    self._parameters = dict(parameters or {})
    self._name = name or action

  @property
  def application(self):
    return self._application

  @property
  def match(self):
    return self._match

  @property
  def action(self):
    return self._action

  @property
  def parameters(self):
    return dict(self._parameters)

  @property
  def name(self):
    return self._name

  @property
  def arg_key(self):
    return self._parameters.get("arg_key", parsers.ARG_KEY)

  @property
  def joiner(self):
    return self._parameters.get("joiner", " ")

  def __repr__(self):
    return "TransformRule({!r}, {!r}, {!r})".format(
      self._application, self._name, self._action)


_ConfigRecordBase = collections.namedtuple(
  "ConfigRecord",
  ["application", "file_path", "key", "value", "entry_ordinal"])


class ConfigRecord(_ConfigRecordBase):
  """One flattened configuration entry."""
  __slots__ = ()

  def to_dict(self):
    return dict(self._asdict())

  @classmethod
  def from_dict(cls, d):
    return cls(d["application"], d["file_path"], d["key"], d["value"],
               int(d["entry_ordinal"]))


def _split_args(n, arg_key):
  # type: (ConfigNode, str) -> Tuple[List[str], List[ConfigNode]]
  args = []
  others = []
  for c in n.children:
    if c.key == arg_key and not c.is_section and c.is_leaf:
      args.append(c.value if c.value is not None else "")
    else:
      others.append(c)
  return args, others


def _apply(rule, n, transform_children):
  # type: (TransformRule, ConfigNode, Callable) -> Optional[ConfigNode]
  """Rewrite `n` according to `rule`. Returns None to drop the node."""
  action = rule.action
  if action == RuleAction.DROP:
    return None
  if action == RuleAction.PASSTHROUGH:
    return ConfigNode(n.key, n.value, transform_children(n.children),
                      n.is_section)
  args, others = _split_args(n, rule.arg_key)
  if action == RuleAction.PROMOTE_VALUE_TO_KEY:
    if n.value is None:
      raise TransformError(n.path(), "no stored name to promote")
    value = rule.joiner.join(args) if args else None
    return ConfigNode(n.value, value, transform_children(others),
                      n.is_section)
  if action == RuleAction.COMMAND_KEY_WITH_FIRST_ARG:
    if n.value is None or not args:
      raise TransformError(n.path(), "command needs a name and an argument")
    value = rule.joiner.join(args[1:]) if len(args) > 1 else None
    return ConfigNode(n.value + " " + args[0], value,
                      transform_children(others), n.is_section)
  # SECTION_KEY_WITH_ARGS
  key = rule.joiner.join([n.key] + args) if args else n.key
  return ConfigNode(key, None, transform_children(others), True)


def disambiguate(tree, rules):
  # type: (ConfigTree, List[TransformRule]) -> ConfigTree
  """
  Rewrite `tree` so that every key denotes one parameter.

  Nodes are visited top-down; the first rule whose matcher accepts a node
  decides how it is rewritten, and the rewritten node's remaining children
  are visited in turn. The input tree is not modified.

  Args:
    tree: Intermediate tree produced by one of the parsers.
    rules: Ordered rules of the tree's application.

  Returns:
    A new `ConfigTree` of the same format and source path.

  Raises:
    TransformError: naming the first node that no rule matches.
  """
  rules = list(rules)

  def _transform_children(children):
    out = []
    for c in children:
      for rule in rules:
        if rule.match(c):
          rewritten = _apply(rule, c, _transform_children)
          if rewritten is not None:
            out.append(rewritten)
          break
      else:
        raise TransformError(c.path(), "no rule matches node {!r}".format(
          c.key))
    return out

  root = ConfigNode(tree.root.key, tree.root.value,
                    _transform_children(tree.root.children), True)
  return ConfigTree(root, tree.format, tree.source_path)


def _walk_records(tree, application, file_path, component):
  records = []

  def _walk(n, prefix):
    components = prefix + [component(n)]
    if not n.is_section and (n.is_leaf or n.value is not None):
      records.append(ConfigRecord(
        application, file_path, util.join_key(components),
        n.value if n.value is not None else "", len(records) + 1))
    for c in n.children:
      _walk(c, components)

  for c in tree.root.children:
    _walk(c, [])
  return records


def flatten(tree, application, file_path=None):
  # type: (ConfigTree, str, Optional[str]) -> List[ConfigRecord]
  """
  Turn a disambiguated tree into records, one per entry, in file order.

  Keys join the ancestor keys with `/` (components escaped with
  `util.escape_key_component`); entry ordinals run 1..n over the file.
  """
  if file_path is None:
    file_path = tree.source_path
  return _walk_records(tree, application, file_path, lambda n: n.key)


def flatten_raw(tree, application, file_path=None):
  # type: (ConfigTree, str, Optional[str]) -> List[ConfigRecord]
  """
  Flatten a tree without disambiguation, Augeas style: every component is
  `key[ordinal]`, so keys like `directive[3]/arg[1]` depend on entry order.
  """
  if file_path is None:
    file_path = tree.source_path
  return _walk_records(tree, application, file_path,
                       lambda n: "{}[{}]".format(n.key, n.ordinal))


_UNSTABLE_COMPONENT_RE = re.compile(r"^(directive|arg)\[\d+\]$")


def key_stability_check(records):
  # type: (Iterable[ConfigRecord]) -> List[ConfigRecord]
  """Records whose key still contains a positional `directive[n]` or
  `arg[n]` component."""
  return [r for r in records
          if any(_UNSTABLE_COMPONENT_RE.match(c) for c in split_key(r.key))]


def bundled_rule_dir():
  # type: () -> str
  return os.path.join(os.path.dirname(os.path.abspath(__file__)), "rules")


def rules_from_document(doc, application=None):
  # type: (Dict[str, Any], Optional[str]) -> List[TransformRule]
  """Build rules from a parsed rule-file document.

  The document has an `application` and an ordered `rules` list; each rule
  has an `action`, an optional `match` mapping (see `NodeMatcher.from_dict`),
  optional `parameters` and an optional `name`. A rule may give `commands`
  as a shorthand for `match: {value_in: [...]}` on `directive` nodes.
  """
  if not isinstance(doc, dict):
    raise ValueError("Rule document must be a mapping, got {}".format(
      type(doc)))
  application = application or doc.get("application")
  if not application:
    raise ValueError("Rule document names no application")
  version = doc.get("format_version", util.FORMAT_VERSION)
  if version != util.FORMAT_VERSION:
    raise util.FormatVersionError(
      "Rules for '{}' have format_version {}; expected {}".format(
        application, version, util.FORMAT_VERSION))
  rules = []
  for i, spec in enumerate(doc.get("rules") or []):
    if "action" not in spec:
      raise ValueError("Rule {} for '{}' has no action".format(
        i, application))
    match_spec = dict(spec.get("match") or {})
    if "commands" in spec:
      match_spec.setdefault("key", "^{}$".format(parsers.DIRECTIVE_KEY))
      match_spec.setdefault("has_value", True)
      match_spec["value_in"] = list(spec["commands"])
    rules.append(TransformRule(application,
                               NodeMatcher.from_dict(match_spec),
                               spec["action"], spec.get("parameters"),
                               spec.get("name")))
  return rules


def load_rules(application, rule_dir=None):
  # type: (str, Optional[str]) -> List[TransformRule]
  """
  Load the ordered rules of `application` from `<rule_dir>/<app>.yaml`,
  falling back to the rule files shipped with the package.

  Raises:
    ValueError: if neither location has a rule file for `application`.
  """
  candidates = []
  if rule_dir is not None:
    candidates.append(os.path.join(rule_dir, application + ".yaml"))
  candidates.append(os.path.join(bundled_rule_dir(), application + ".yaml"))
  for path in candidates:
    if os.path.exists(path):
      with open(path, "r", encoding="utf-8") as f:
        return rules_from_document(yaml.safe_load(f), application)
  raise ValueError("No rule file for application '{}' (looked in {})".format(
    application, candidates))


def write_records(path, instance_id, records, extra_header=None):
  # type: (str, str, Iterable[ConfigRecord], Optional[Dict[str, Any]]) -> None
  """Write one instance's records as JSON lines after a versioned header."""
  header = dict(extra_header or {})
  header["instance_id"] = instance_id
  util.write_jsonl(path, header, (r.to_dict() for r in records))


def read_records(path):
  # type: (str) -> Tuple[str, List[ConfigRecord]]
  """Inverse of `write_records`. Returns `(instance_id, records)`."""
  header, rows = util.read_jsonl(path)
  return header["instance_id"], [ConfigRecord.from_dict(r) for r in rows]
