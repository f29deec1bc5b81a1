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
analysis.py

Misconfiguration detection over record corpora.

Two detectors share the corpus model built here:

* outlier ranking: per-key value histograms from peer instances give every
  record of a target instance a smoothed probability of being wrong;
* type and rule inference: keys whose values vary enough are assigned a
  value type, and pairwise or set-membership rules that hold across the
  corpus are kept; records breaking either are reported as violations.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
from fractions import Fraction
import itertools
import json
import logging
import re
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from six import iteritems
from six.moves.urllib.parse import urlparse

from confex import util
from confex.disambiguate import ConfigRecord

__all__ = [
  "DEFAULT_ENTROPY_THRESHOLD",
  "DEFAULT_SUPPORT_MIN",
  "DEFAULT_CONFIDENCE_MIN",
  "DEFAULT_VALUE_SET_MIN_FRACTION",
  "DEFAULT_TOP_N",
  "ValueType",
  "RuleTemplate",
  "LeaveOneOutError",
  "ValueHistogram",
  "HistogramSet",
  "SuspectRanking",
  "InferredType",
  "InferredRule",
  "Violation",
  "AnalysisModel",
  "PathCounts",
  "qualified_key",
  "entropy",
  "build_histograms",
  "peerpressure_score",
  "peerpressure_rank",
  "check_value",
  "infer_types",
  "instance_value_sets",
  "evaluate_rule",
  "infer_rules",
  "detect_violations",
  "build_report",
  "save_model",
  "load_model",
]

logger = logging.getLogger(__name__)

DEFAULT_ENTROPY_THRESHOLD = 0.5
DEFAULT_SUPPORT_MIN = Fraction(1, 10)
DEFAULT_CONFIDENCE_MIN = Fraction(9, 10)
# A value belongs to a key's allowed set when at least this fraction of the
# instances holding the key use it.
DEFAULT_VALUE_SET_MIN_FRACTION = Fraction(1, 20)
DEFAULT_TOP_N = 10


class ValueType(object):
  """
  Enum-like class for inferred value types, in the order they are tried.
  """
  BOOLEAN = "boolean"
  IP_ADDRESS = "ip_address"
  PORT = "port"
  INTEGER = "integer"
  URI = "uri"
  FILE_PATH = "file_path"
  ENUM_SMALL = "enum_small"

  ALL = (BOOLEAN, IP_ADDRESS, PORT, INTEGER, URI, FILE_PATH, ENUM_SMALL)


class RuleTemplate(object):
  """
  Enum-like class for the rule shapes mined from a corpus.
  """
  EQUAL_TO_SAME_TYPE_ENTRY = "equal_to_same_type_entry"
  SUBSTRING_OF_ENTRY = "substring_of_entry"
  VALUE_IN_SET = "value_in_set"

  ALL = (EQUAL_TO_SAME_TYPE_ENTRY, SUBSTRING_OF_ENTRY, VALUE_IN_SET)


class LeaveOneOutError(AssertionError):
  """Raised when a target instance is part of the model it is ranked by."""


def qualified_key(record):
  # type: (ConfigRecord) -> str
  """Corpus-wide key of a record: `<application>:<key>`."""
  return "{}:{}".format(record.application, record.key)


def entropy(counts):
  # type: (Mapping[str, int]) -> float
  """Shannon entropy, in bits, of a value-count distribution."""
  c = np.fromiter(counts.values(), dtype=float, count=len(counts))
  total = c.sum()
  if total <= 0:
    return 0.0
  p = c[c > 0] / total
  return float(-(p * np.log2(p)).sum())


################################################################################
# Histograms

_ValueHistogramBase = collections.namedtuple(
  "ValueHistogram", ["key", "counts", "instance_count"])


class ValueHistogram(_ValueHistogramBase):
  """Values seen for one key: one observation per distinct (instance, value)."""
  __slots__ = ()

  @property
  def total(self):
    # type: () -> int
    return sum(self.counts.values())

  @property
  def distinct(self):
    # type: () -> int
    return len(self.counts)

  def entropy(self):
    return entropy(self.counts)


def _instance_contribution(records):
  # type: (Iterable[ConfigRecord]) -> Dict[str, set]
  contrib = {}
  for r in records:
    contrib.setdefault(qualified_key(r), set()).add(r.value)
  return contrib


class HistogramSet(object):
  """
  Per-key value histograms of a corpus, plus the ids of the instances they
  were built from.
  """

  def __init__(self):
    self._counts = {}  # type: Dict[str, Dict[str, int]]
    self._instances = {}  # type: Dict[str, int]
    self._instance_ids = frozenset()

  @property
  def instance_ids(self):
    return self._instance_ids

  def _add(self, instance_id, records, sign=1):
    for key, values in iteritems(_instance_contribution(records)):
      counts = self._counts.setdefault(key, {})
      self._instances[key] = self._instances.get(key, 0) + sign
      for v in values:
        counts[v] = counts.get(v, 0) + sign
        if counts[v] == 0:
          del counts[v]
      if self._instances[key] == 0:
        del self._instances[key]
        del self._counts[key]

  def _copy(self):
    other = HistogramSet()
    other._counts = dict(self._counts)
    other._instances = dict(self._instances)
    other._instance_ids = self._instance_ids
    return other

  def add_instance(self, instance_id, records):
    # type: (str, Iterable[ConfigRecord]) -> HistogramSet
    """A new set that also counts `instance_id`."""
    if instance_id in self._instance_ids:
      raise ValueError("Instance {} is already counted".format(instance_id))
    records = list(records)
    other = self._copy()
    for key in _instance_contribution(records):
      if key in other._counts:
        other._counts[key] = dict(other._counts[key])
    other._add(instance_id, records)
    other._instance_ids = self._instance_ids | {instance_id}
    return other

  def without_instance(self, instance_id, records):
    # type: (str, Iterable[ConfigRecord]) -> HistogramSet
    """
    A new set with `instance_id` removed; `records` must be the records the
    instance was counted with. Only the keys of that instance are copied.
    """
    if instance_id not in self._instance_ids:
      raise ValueError("Instance {} is not counted".format(instance_id))
    records = list(records)
    other = self._copy()
    for key in _instance_contribution(records):
      if key not in other._counts:
        raise ValueError("Instance {} was not counted with key {}".format(
          instance_id, key))
      other._counts[key] = dict(other._counts[key])
    other._add(instance_id, records, sign=-1)
    other._instance_ids = self._instance_ids - {instance_id}
    return other

  def merge(self, other):
    # type: (HistogramSet) -> HistogramSet
    """Sum of two sets built from disjoint instances."""
    overlap = self._instance_ids & other._instance_ids
    if overlap:
      raise ValueError("Cannot merge histograms sharing instances {}".format(
        sorted(overlap)))
    merged = self._copy()
    for key, counts in iteritems(other._counts):
      mine = dict(merged._counts.get(key, {}))
      for v, c in iteritems(counts):
        mine[v] = mine.get(v, 0) + c
      merged._counts[key] = mine
      merged._instances[key] = (merged._instances.get(key, 0)
                                + other._instances[key])
    merged._instance_ids = self._instance_ids | other._instance_ids
    return merged

  def get(self, key, default=None):
    if key not in self._counts:
      return default
    return ValueHistogram(key, dict(self._counts[key]), self._instances[key])

  def __getitem__(self, key):
    h = self.get(key)
    if h is None:
      raise KeyError(key)
    return h

  def __contains__(self, key):
    return key in self._counts

  def __len__(self):
    return len(self._counts)

  def keys(self):
    return sorted(self._counts)

  def values(self):
    return [self[k] for k in self.keys()]

  def items(self):
    return [(k, self[k]) for k in self.keys()]

  def counts_of(self, key):
    """Read-only access to the raw value counts of `key` (or None)."""
    return self._counts.get(key)

  def to_dict(self):
    return {
      "instance_ids": sorted(self._instance_ids),
      "histograms": {k: {"counts": self._counts[k],
                         "instance_count": self._instances[k]}
                     for k in self._counts},
    }

  @classmethod
  def from_dict(cls, d):
    hs = cls()
    hs._instance_ids = frozenset(d["instance_ids"])
    for k, h in iteritems(d["histograms"]):
      hs._counts[k] = {v: int(c) for v, c in iteritems(h["counts"])}
      hs._instances[k] = int(h["instance_count"])
    return hs


def build_histograms(corpus):
  # type: (Iterable[Tuple[str, Iterable[ConfigRecord]]]) -> HistogramSet
  """
  Histograms over `(instance_id, records)` pairs.

  Raises:
    ValueError: if the corpus is empty or repeats an instance id.
  """
  hs = HistogramSet()
  ids = set()
  for instance_id, records in corpus:
    if instance_id in ids:
      raise ValueError("Instance {} appears twice in the corpus".format(
        instance_id))
    ids.add(instance_id)
    hs._add(instance_id, records)
  if not ids:
    raise ValueError("Cannot build histograms from an empty corpus")
  hs._instance_ids = frozenset(ids)
  return hs


################################################################################
# Outlier ranking

class SuspectRanking(object):
  """
  Records of one instance ordered by decreasing suspicion.

  Ties are broken by key, entry ordinal and file path.
  """

  def __init__(self, scored):
    # type: (Iterable[Tuple[ConfigRecord, Fraction]]) -> None
    self._entries = sorted(
      scored, key=lambda rs: (-rs[1], rs[0].key, rs[0].entry_ordinal,
                              rs[0].file_path, rs[0].application))

  @property
  def entries(self):
    return util.ListView(self._entries)

  def top(self, n):
    # type: (int) -> List[Tuple[ConfigRecord, Fraction]]
    return self._entries[:n]

  def rank_of(self, predicate):
    # type: (Callable[[ConfigRecord], bool]) -> Optional[int]
    """1-based rank of the first record satisfying `predicate`, or None."""
    for i, (record, _) in enumerate(self._entries, 1):
      if predicate(record):
        return i
    return None

  def __len__(self):
    return len(self._entries)

  def __iter__(self):
    return iter(self._entries)


def peerpressure_score(value, counts):
  # type: (str, Optional[Mapping[str, int]]) -> Fraction
  """
  Smoothed probability that `value` is a misconfiguration given the peers'
  value counts for its key: (n - c + 1) / (n + m), where n counts the
  observations, c those equal to `value` and m the distinct values
  (including `value`). A key never seen gets 0.
  """
  if not counts:
    return Fraction(0)
  n = sum(counts.values())
  c = counts.get(value, 0)
  m = len(counts) + (0 if c else 1)
  return Fraction(n - c + 1, n + m)


def peerpressure_rank(test_records, histograms, instance_id=None):
  # type: (Iterable[ConfigRecord], HistogramSet, Optional[str]) -> SuspectRanking
  """
  Rank the records of one instance against peer histograms.

  Args:
    test_records: Records of the instance under test.
    histograms: Histograms of the peer instances only.
    instance_id: Id of the instance under test; when given it must not be
      among `histograms.instance_ids`.

  Raises:
    LeaveOneOutError: if the instance under test is part of `histograms`.
  """
  if instance_id is not None and instance_id in histograms.instance_ids:
    raise LeaveOneOutError(
      "Instance {} is part of the histograms it is ranked against".format(
        instance_id))
  return SuspectRanking(
    (r, peerpressure_score(r.value, histograms.counts_of(qualified_key(r))))
    for r in test_records)


################################################################################
# Types

InferredType = collections.namedtuple(
  "InferredType", ["key", "type", "evidence_count", "domain"])

_BOOLEAN_VALUES = frozenset(["on", "off", "yes", "no", "true", "false"])
_IP_RE = re.compile(r"^[0-9]{1,3}(\.[0-9]{1,3}){3}$")
_PORT_RE = re.compile(r"^[0-9]+$")
_INT_RE = re.compile(r"^[+-]?[0-9]+[KkMmGg]?$")
_URI_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*://\S+$")
_WORD_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_\-]*$")
_ENUM_MAX_VALUES = 5
_PLACEHOLDER_MARKERS = ("__", "{{", "}}")


def _syntax_ok(value_type, key, value):
  if value_type == ValueType.BOOLEAN:
    return value.lower() in _BOOLEAN_VALUES
  if value_type == ValueType.IP_ADDRESS:
    return _IP_RE.match(value) is not None
  if value_type == ValueType.PORT:
    return _PORT_RE.match(value) is not None and "port" in key.lower()
  if value_type == ValueType.INTEGER:
    return _INT_RE.match(value) is not None
  if value_type == ValueType.URI:
    return _URI_RE.match(value) is not None
  if value_type == ValueType.FILE_PATH:
    return value.startswith("/") and "\\" not in value
  if value_type == ValueType.ENUM_SMALL:
    return _WORD_RE.match(value) is not None
  raise ValueError("Unknown value type '{}'".format(value_type))


def _semantic_ok(value_type, value, path_exists=None, domain=()):
  if value_type == ValueType.IP_ADDRESS:
    return all(int(octet) <= 255 for octet in value.split("."))
  if value_type == ValueType.PORT:
    return int(value) <= 65535
  if value_type == ValueType.URI:
    return bool(urlparse(value).netloc)
  if value_type == ValueType.FILE_PATH:
    return path_exists is None or bool(path_exists(value))
  if value_type == ValueType.ENUM_SMALL and domain:
    return value in domain
  return True


def check_value(value_type, key, value, path_exists=None, domain=()):
  # type: (str, str, str, Optional[Callable[[str], bool]], Sequence[str]) -> Optional[str]
  """
  Check one value against a type.

  Returns:
    None when the value conforms, otherwise an explanation.
  """
  if any(m in value for m in _PLACEHOLDER_MARKERS):
    return "value {!r} looks like an unsubstituted placeholder".format(value)
  if not _syntax_ok(value_type, key, value):
    return "value {!r} is not a well-formed {}".format(value, value_type)
  if not _semantic_ok(value_type, value, path_exists, domain):
    if value_type == ValueType.FILE_PATH:
      return "path {!r} does not exist".format(value)
    return "value {!r} is not a valid {}".format(value, value_type)
  return None


def infer_types(histograms,  # type: HistogramSet
                entropy_threshold=DEFAULT_ENTROPY_THRESHOLD,  # type: float
                path_exists=None  # type: Optional[Callable[[str], bool]]
                ):
  # type: (...) -> List[InferredType]
  """
  Assign value types to keys whose values vary enough.

  Keys whose value entropy is below `entropy_threshold` bits are skipped.
  For the others, the first type (in `ValueType.ALL` order) that every
  non-empty value passes, syntactically and semantically, is assigned.

  Args:
    histograms: Corpus histograms.
    entropy_threshold: Minimum entropy, in bits.
    path_exists: Existence check for file paths over the training
      instances; when None, file paths are checked syntactically only.

  Returns:
    Inferred types, sorted by key.
  """
  types = []
  for key in histograms.keys():
    counts = histograms.counts_of(key)
    if entropy(counts) < entropy_threshold:
      continue
    values = sorted(v for v in counts if v != "")
    if not values:
      continue
    for value_type in ValueType.ALL:
      if value_type == ValueType.ENUM_SMALL and len(values) > _ENUM_MAX_VALUES:
        continue
      if all(check_value(value_type, key, v, path_exists) is None
             for v in values):
        domain = tuple(values) if value_type == ValueType.ENUM_SMALL else ()
        types.append(InferredType(
          key, value_type, sum(counts[v] for v in values), domain))
        break
  return types


################################################################################
# Rules

InferredRule = collections.namedtuple(
  "InferredRule", ["template", "keys", "support", "confidence", "value_set"])

_SUBSTRING_TYPES = (ValueType.FILE_PATH, ValueType.URI)
_SET_TYPES = (ValueType.ENUM_SMALL, ValueType.BOOLEAN)


def instance_value_sets(records, keys=None):
  # type: (Iterable[ConfigRecord], Optional[Iterable[str]]) -> Dict[str, frozenset]
  """Non-empty values per qualified key of one instance, optionally limited
  to `keys`."""
  keys = None if keys is None else frozenset(keys)
  out = {}
  for r in records:
    if r.value == "":
      continue
    k = qualified_key(r)
    if keys is not None and k not in keys:
      continue
    out.setdefault(k, set()).add(r.value)
  return {k: frozenset(v) for k, v in iteritems(out)}


def evaluate_rule(template, keys, value_sets, value_set=()):
  # type: (str, Sequence[str], Mapping[str, frozenset], Sequence[str]) -> Optional[bool]
  """
  Whether a rule holds in one instance.

  Returns:
    None when the instance lacks one of the rule's keys, else a bool.
  """
  if any(k not in value_sets for k in keys):
    return None
  if template == RuleTemplate.EQUAL_TO_SAME_TYPE_ENTRY:
    return value_sets[keys[0]] == value_sets[keys[1]]
  if template == RuleTemplate.SUBSTRING_OF_ENTRY:
    targets = value_sets[keys[1]]
    return all(any(v != t and v in t for t in targets)
               for v in value_sets[keys[0]])
  if template == RuleTemplate.VALUE_IN_SET:
    return value_sets[keys[0]] <= frozenset(value_set)
  raise ValueError("Unknown rule template '{}'".format(template))


def _candidate_rules(types, per_instance, value_set_min_fraction):
  """Yield (template, keys, value_set) for every candidate rule."""
  by_key = {t.key: t for t in types}
  keys = sorted(by_key)
  for k1, k2 in itertools.combinations(keys, 2):
    if by_key[k1].type == by_key[k2].type:
      yield RuleTemplate.EQUAL_TO_SAME_TYPE_ENTRY, (k1, k2), ()
  path_keys = [k for k in keys if by_key[k].type in _SUBSTRING_TYPES]
  for k1, k2 in itertools.permutations(path_keys, 2):
    yield RuleTemplate.SUBSTRING_OF_ENTRY, (k1, k2), ()
  for k in keys:
    if by_key[k].type not in _SET_TYPES:
      continue
    holders = [vs[k] for vs in per_instance if k in vs]
    if not holders:
      continue
    seen = collections.Counter(v for vals in holders for v in vals)
    allowed = tuple(sorted(
      v for v, c in iteritems(seen)
      if Fraction(c, len(holders)) >= value_set_min_fraction))
    yield RuleTemplate.VALUE_IN_SET, (k,), allowed


def infer_rules(corpus,  # type: Iterable[Tuple[str, Iterable[ConfigRecord]]]
                types,  # type: Iterable[InferredType]
                support_min=DEFAULT_SUPPORT_MIN,
                confidence_min=DEFAULT_CONFIDENCE_MIN,
                value_set_min_fraction=DEFAULT_VALUE_SET_MIN_FRACTION
                ):
  # type: (...) -> List[InferredRule]
  """
  Mine rules among typed keys and keep the well-supported ones.

  Candidates are equality between two keys of the same type, containment of
  one file path or URI key's values in another's, and membership of an
  enum or boolean key's values in the set of values used by at least
  `value_set_min_fraction` of the instances holding the key. Support is the
  fraction of all instances holding every key of the rule; confidence the
  fraction of those where the rule holds. A rule is accepted when
  `support >= support_min` and `confidence >= confidence_min`.

  Returns:
    Accepted rules, in template then key order.
  """
  support_min = util.as_fraction(support_min)
  confidence_min = util.as_fraction(confidence_min)
  value_set_min_fraction = util.as_fraction(value_set_min_fraction)
  types = list(types)
  typed_keys = frozenset(t.key for t in types)
  per_instance = [instance_value_sets(records, typed_keys)
                  for _, records in corpus]
  n = len(per_instance)
  if n == 0:
    return []
  accepted = []
  for template, keys, value_set in _candidate_rules(types, per_instance,
                                                    value_set_min_fraction):
    holding = present = 0
    for vs in per_instance:
      result = evaluate_rule(template, keys, vs, value_set)
      if result is None:
        continue
      present += 1
      if result:
        holding += 1
    if present == 0:
      continue
    support = Fraction(present, n)
    confidence = Fraction(holding, present)
    if support >= support_min and confidence >= confidence_min:
      accepted.append(InferredRule(template, keys, support, confidence,
                                   value_set))
  accepted.sort(key=lambda r: (RuleTemplate.ALL.index(r.template), r.keys))
  return accepted


################################################################################
# Violations

Violation = collections.namedtuple(
  "Violation", ["record", "kind", "name", "explanation"])


def detect_violations(test_records,  # type: Iterable[ConfigRecord]
                      types,  # type: Iterable[InferredType]
                      rules,  # type: Iterable[InferredRule]
                      snapshot=None  # type: Any
                      ):
  # type: (...) -> List[Violation]
  """
  Records of one instance that break an inferred type or rule.

  Args:
    test_records: Records of the instance under test.
    types: Inferred types.
    rules: Accepted rules.
    snapshot: Anything with an `exists(path)` method (an `InstanceSnapshot`
      or `PathIndex` of the instance under test); file paths are not checked
      for existence when None.

  Returns:
    `Violation(record, kind, name, explanation)` tuples: kind `type` (name is
    the type) or `rule` (name is the template).
  """
  test_records = list(test_records)
  type_by_key = {t.key: t for t in types}
  path_exists = None if snapshot is None else snapshot.exists
  violations = []
  for r in test_records:
    t = type_by_key.get(qualified_key(r))
    if t is None or r.value == "":
      continue
    problem = check_value(t.type, t.key, r.value, path_exists, t.domain)
    if problem is not None:
      violations.append(Violation(r, "type", t.type, problem))

  value_sets = instance_value_sets(test_records)
  first_record = {}
  for r in test_records:
    first_record.setdefault(qualified_key(r), r)
  for rule in rules:
    if evaluate_rule(rule.template, rule.keys, value_sets,
                     rule.value_set) is not False:
      continue
    k1 = rule.keys[0]
    if rule.template == RuleTemplate.VALUE_IN_SET:
      allowed = frozenset(rule.value_set)
      for r in test_records:
        if qualified_key(r) == k1 and r.value and r.value not in allowed:
          violations.append(Violation(
            r, "rule", rule.template,
            "value {!r} of {} is outside {}".format(
              r.value, k1, list(rule.value_set))))
    elif rule.template == RuleTemplate.SUBSTRING_OF_ENTRY:
      targets = value_sets[rule.keys[1]]
      for r in test_records:
        if (qualified_key(r) == k1 and r.value
            and not any(r.value != t and r.value in t for t in targets)):
          violations.append(Violation(
            r, "rule", rule.template,
            "value {!r} of {} is not part of any value of {}".format(
              r.value, k1, rule.keys[1])))
    else:
      violations.append(Violation(
        first_record[k1], "rule", rule.template,
        "{} differs from {} ({} vs {})".format(
          k1, rule.keys[1], sorted(value_sets[k1]),
          sorted(value_sets[rule.keys[1]]))))
  return violations


################################################################################
# Model and reports

class PathCounts(object):
  """
  Number of training instances containing each path, for file-path checks
  during type inference. `excluding(index)` hides one instance.
  """

  def __init__(self, indexes=()):
    self._counts = collections.Counter()
    for index in indexes:
      self.add(index)

  def add(self, paths):
    # type: (Iterable[str]) -> None
    """Count one instance whose paths are `paths` (e.g. a `PathIndex`)."""
    self._counts.update(set(paths))

  def exists(self, path):
    return self._counts.get(path, 0) > 0

  __call__ = exists

  def excluding(self, index):
    """Existence check ignoring the instance whose paths are `index`."""
    counts = self._counts

    def _exists(path):
      return counts.get(path, 0) - (1 if index.exists(path) else 0) > 0

    return _exists


class AnalysisModel(object):
  """Histograms, types and rules inferred from one corpus."""

  def __init__(self, histograms, types=(), rules=(), parameters=None):
    self.histograms = histograms
    self.types = list(types)
    self.rules = list(rules)
    self.parameters = dict(parameters or {})

  @classmethod
  def fit(cls,
          corpus,  # type: Sequence[Tuple[str, Sequence[ConfigRecord]]]
          path_exists=None,  # type: Optional[Callable[[str], bool]]
          entropy_threshold=DEFAULT_ENTROPY_THRESHOLD,
          support_min=DEFAULT_SUPPORT_MIN,
          confidence_min=DEFAULT_CONFIDENCE_MIN,
          histograms=None  # type: Optional[HistogramSet]
          ):
    # type: (...) -> AnalysisModel
    """Build histograms (unless given), types and rules for `corpus`."""
    corpus = list(corpus)
    if histograms is None:
      histograms = build_histograms(corpus)
    types = infer_types(histograms, entropy_threshold, path_exists)
    rules = infer_rules(corpus, types, support_min, confidence_min)
    logger.info("Model over %d instances: %d keys, %d types, %d rules",
                len(histograms.instance_ids), len(histograms), len(types),
                len(rules))
    return cls(histograms, types, rules, {
      "entropy_threshold": entropy_threshold,
      "support_min": str(util.as_fraction(support_min)),
      "confidence_min": str(util.as_fraction(confidence_min)),
    })

  @classmethod
  def empty(cls):
    """A model with no evidence: every record scores 0."""
    return cls(HistogramSet())


def _fraction_str(f):
  return "{}/{}".format(f.numerator, f.denominator)


def save_model(model, path):
  # type: (AnalysisModel, str) -> None
  doc = {
    "format_version": util.FORMAT_VERSION,
    "parameters": model.parameters,
    "histograms": model.histograms.to_dict(),
    "types": [{"key": t.key, "type": t.type,
               "evidence_count": t.evidence_count, "domain": list(t.domain)}
              for t in model.types],
    "rules": [{"template": r.template, "keys": list(r.keys),
               "support": _fraction_str(r.support),
               "confidence": _fraction_str(r.confidence),
               "value_set": list(r.value_set)}
              for r in model.rules],
  }
  util.atomic_write(path, json.dumps(doc, sort_keys=True) + "\n")


def load_model(path):
  # type: (str) -> AnalysisModel
  """
  Raises:
    FormatVersionError: if the model was written with another format.
  """
  with open(path, "r", encoding="utf-8") as f:
    doc = json.load(f)
  if doc.get("format_version") != util.FORMAT_VERSION:
    raise util.FormatVersionError(
      "Model '{}' has format_version {}; expected {}".format(
        path, doc.get("format_version"), util.FORMAT_VERSION))
  types = [InferredType(t["key"], t["type"], t["evidence_count"],
                        tuple(t["domain"])) for t in doc["types"]]
  rules = [InferredRule(r["template"], tuple(r["keys"]),
                        Fraction(r["support"]), Fraction(r["confidence"]),
                        tuple(r["value_set"])) for r in doc["rules"]]
  return AnalysisModel(HistogramSet.from_dict(doc["histograms"]), types,
                       rules, doc.get("parameters"))


def _record_dict(record):
  return record.to_dict() if isinstance(record, ConfigRecord) else dict(
    record._asdict())


def build_report(instance_id, ranking, violations, top_n=DEFAULT_TOP_N):
  # type: (str, SuspectRanking, Iterable[Violation], int) -> Dict[str, Any]
  """The per-instance report document: top suspects and violations."""
  suspects = []
  for rank, (record, score) in enumerate(ranking.top(top_n), 1):
    row = _record_dict(record)
    row.update(rank=rank, score=float(score), score_exact=_fraction_str(score))
    suspects.append(row)
  return {
    "format_version": util.FORMAT_VERSION,
    "instance_id": instance_id,
    "record_count": len(ranking),
    "suspects": suspects,
    "violations": [dict(_record_dict(v.record), kind=v.kind, name=v.name,
                        explanation=v.explanation) for v in violations],
  }
