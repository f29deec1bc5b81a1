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
"""Tests for confex.analysis."""
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

from fractions import Fraction
import os
import shutil
import tempfile
import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

import confex


def _rec(key, value, app="httpd", ordinal=1, path="/etc/httpd.conf"):
  return confex.ConfigRecord(app, path, key, value, ordinal)


def _corpus(rows, app="httpd"):
  """One instance per row; a row maps keys to values."""
  return [("i{:03d}".format(i),
           [_rec(k, v, app, n) for n, (k, v) in enumerate(sorted(row.items()),
                                                         1)])
          for i, row in enumerate(rows)]


def _integer_types(*keys):
  return [confex.InferredType(k, confex.ValueType.INTEGER, 0, ())
          for k in keys]


_T = confex.ValueType
_R = confex.RuleTemplate

# Small value pools, so that equal, contained and repeated values are common.
_POOLS = {
  _T.INTEGER: ["1", "2", ""],
  _T.FILE_PATH: ["/srv", "/srv/www", "/etc", ""],
  _T.URI: ["http://srv", "http://srv/www", ""],
  _T.ENUM_SMALL: ["low", "high", "max", ""],
  _T.BOOLEAN: ["on", "off", ""],
}


@st.composite
def _typed_corpora(draw):
  """Up to 10 typed keys over up to 20 instances, several values per key."""
  key_types = draw(st.lists(st.sampled_from(sorted(_POOLS)), min_size=1,
                            max_size=10))
  rows = []
  for _ in range(draw(st.integers(1, 20))):
    row = {}
    for i, t in enumerate(key_types):
      values = draw(st.lists(st.sampled_from(_POOLS[t]), max_size=2))
      if values:
        row["k{}".format(i)] = values
    rows.append(row)
  return key_types, rows


def _counted_rules(key_types, rows):
  """Every rule meeting the default thresholds, found by direct counting."""
  keys = ["httpd:k{}".format(i) for i in range(len(key_types))]
  type_of = dict(zip(keys, key_types))
  sets = []
  for row in rows:
    s = {}
    for k, values in row.items():
      nonempty = frozenset(v for v in values if v)
      if nonempty:
        s["httpd:" + k] = nonempty
    sets.append(s)

  def equal(s, a, b):
    return s[a] == s[b]

  def contained(s, a, b):
    return all(any(v != t and v in t for t in s[b]) for v in s[a])

  candidates = []
  for a in keys:
    for b in keys:
      if a < b and type_of[a] == type_of[b]:
        candidates.append((_R.EQUAL_TO_SAME_TYPE_ENTRY, (a, b), (), equal))
      if (a != b and type_of[a] in (_T.FILE_PATH, _T.URI)
          and type_of[b] in (_T.FILE_PATH, _T.URI)):
        candidates.append((_R.SUBSTRING_OF_ENTRY, (a, b), (), contained))
  for a in keys:
    if type_of[a] not in (_T.ENUM_SMALL, _T.BOOLEAN):
      continue
    holders = [s[a] for s in sets if a in s]
    if not holders:
      continue
    allowed = tuple(sorted(
      v for v in frozenset().union(*holders)
      if 20 * sum(1 for h in holders if v in h) >= len(holders)))
    candidates.append((_R.VALUE_IN_SET, (a,), allowed,
                       lambda s, a, allowed=allowed: s[a] <= set(allowed)))

  expected = set()
  for template, rule_keys, value_set, holds in candidates:
    present = [s for s in sets if all(k in s for k in rule_keys)]
    if not present:
      continue
    holding = sum(1 for s in present if holds(s, *rule_keys))
    if (10 * len(present) >= len(sets)
        and 10 * holding >= 9 * len(present)):
      expected.add((template, rule_keys, Fraction(len(present), len(sets)),
                    Fraction(holding, len(present)), value_set))
  return expected


class ScoreTest(unittest.TestCase):

  def test_peerpressure_score(self):
    """Test for confex.peerpressure_score."""
    self.assertEqual(confex.peerpressure_score("a", {"a": 99}),
                     Fraction(1, 100))
    self.assertEqual(confex.peerpressure_score("b", {"a": 99}),
                     Fraction(100, 101))
    self.assertEqual(confex.peerpressure_score("a", None), 0)
    self.assertEqual(confex.peerpressure_score("a", {}), 0)
    self.assertEqual(confex.peerpressure_score("a", {"a": 1, "b": 1}),
                     Fraction(2, 4))

  def test_rank(self):
    """Test for confex.peerpressure_rank."""
    peers = _corpus([{"Listen": "80", "User": "daemon"}] * 3
                    + [{"Listen": "8080", "User": "daemon"}])
    histograms = confex.build_histograms(peers)
    target = [_rec("User", "daemon", ordinal=1),
              _rec("Listen", "8080", ordinal=2),
              _rec("Foo", "bar", ordinal=3)]
    ranking = confex.peerpressure_rank(target, histograms, "target")
    self.assertEqual([(r.key, s) for r, s in ranking],
                     [("Listen", Fraction(2, 3)), ("User", Fraction(1, 5)),
                      ("Foo", 0)])
    self.assertEqual(ranking.rank_of(lambda r: r.key == "User"), 2)
    self.assertIsNone(ranking.rank_of(lambda r: r.key == "Missing"))
    self.assertEqual(len(ranking.top(1)), 1)
    with self.assertRaises(confex.LeaveOneOutError):
      confex.peerpressure_rank(target, histograms, "i000")

  def test_tie_order(self):
    """Test that equal scores are ordered by key then ordinal."""
    ranking = confex.SuspectRanking([(_rec("b", "1", ordinal=1), Fraction(1)),
                                     (_rec("a", "1", ordinal=2), Fraction(1)),
                                     (_rec("a", "2", ordinal=1), Fraction(1))])
    self.assertEqual([(r.key, r.entry_ordinal) for r, _ in ranking],
                     [("a", 1), ("a", 2), ("b", 1)])


class HistogramTest(unittest.TestCase):

  def test_build(self):
    """Test that an instance counts each distinct value of a key once."""
    corpus = [("i1", [_rec("Header set", "A", ordinal=1),
                      _rec("Header set", "A", ordinal=2),
                      _rec("Header set", "B", ordinal=3)]),
              ("i2", [_rec("Header set", "A")])]
    histograms = confex.build_histograms(corpus)
    h = histograms["httpd:Header set"]
    self.assertEqual(h.counts, {"A": 2, "B": 1})
    self.assertEqual(h.instance_count, 2)
    self.assertEqual(h.total, 3)
    self.assertEqual(histograms.instance_ids, frozenset(["i1", "i2"]))
    self.assertNotIn("httpd:Other", histograms)
    with self.assertRaises(ValueError):
      confex.build_histograms([])
    with self.assertRaises(ValueError):
      confex.build_histograms([("i1", []), ("i1", [])])

  def test_without_and_merge(self):
    """Test that removing an instance undoes adding it."""
    corpus = _corpus([{"Listen": "80"}, {"Listen": "8080", "Timeout": "300"},
                      {"Listen": "80"}])
    full = confex.build_histograms(corpus)
    rest = confex.build_histograms(corpus[:1] + corpus[2:])
    loo = full.without_instance(corpus[1][0], corpus[1][1])
    self.assertEqual(loo.to_dict(), rest.to_dict())
    self.assertNotIn("httpd:Timeout", loo)
    # The full set is unchanged.
    self.assertEqual(full["httpd:Listen"].counts, {"80": 2, "8080": 1})
    again = loo.add_instance(corpus[1][0], corpus[1][1])
    self.assertEqual(again.to_dict(), full.to_dict())
    merged = rest.merge(confex.build_histograms(corpus[1:2]))
    self.assertEqual(merged.to_dict(), full.to_dict())
    with self.assertRaises(ValueError):
      full.merge(rest)
    with self.assertRaises(ValueError):
      loo.without_instance(corpus[1][0], corpus[1][1])

  def test_entropy(self):
    """Test for confex.entropy."""
    self.assertEqual(confex.entropy({"a": 5}), 0.0)
    self.assertAlmostEqual(confex.entropy({"a": 1, "b": 1}), 1.0)
    self.assertAlmostEqual(confex.entropy({"a": 1, "b": 1, "c": 1, "d": 1}),
                           2.0)
    self.assertEqual(confex.entropy({}), 0.0)


class TypeTest(unittest.TestCase):

  def _types(self, values, key="Key", path_exists=None):
    histograms = confex.build_histograms(_corpus([{key: v} for v in values]))
    return {t.key: t for t in confex.infer_types(histograms,
                                                 path_exists=path_exists)}

  def test_ip_address(self):
    """Test that an out-of-range octet rules out the address type."""
    types = self._types(["10.0.0.1", "192.168.0.1"])
    self.assertEqual(types["httpd:Key"].type, confex.ValueType.IP_ADDRESS)
    self.assertEqual(self._types(["10.0.0.1", "192.168.0.1", "999.1.1.1"]),
                     {})

  def test_numbers(self):
    """Test for the port and integer types."""
    self.assertEqual(self._types(["3306", "3307"], "mysqld/port")
                     ["httpd:mysqld/port"].type, confex.ValueType.PORT)
    self.assertEqual(self._types(["80", "8080"], "Listen")
                     ["httpd:Listen"].type, confex.ValueType.INTEGER)
    self.assertEqual(self._types(["128M", "1G"])["httpd:Key"].type,
                     confex.ValueType.INTEGER)

  def test_booleans_and_enums(self):
    """Test for the boolean and small enum types."""
    self.assertEqual(self._types(["On", "Off"])["httpd:Key"].type,
                     confex.ValueType.BOOLEAN)
    t = self._types(["warn", "error", "info"])["httpd:Key"]
    self.assertEqual(t.type, confex.ValueType.ENUM_SMALL)
    self.assertEqual(t.domain, ("error", "info", "warn"))
    self.assertEqual(self._types(["a", "b", "c", "d", "e", "f"]), {})

  def test_file_path(self):
    """Test that file paths must exist in the training instances."""
    t = self._types(["/var/www", "/srv/www"])["httpd:Key"]
    self.assertEqual(t.type, confex.ValueType.FILE_PATH)
    self.assertEqual(t.evidence_count, 2)
    self.assertEqual(self._types(["/var/www", "/srv/www"],
                                 path_exists=lambda p: p == "/var/www"), {})
    self.assertEqual(self._types(["http://a:1", "http://b:2"])["httpd:Key"]
                     .type, confex.ValueType.URI)

  def test_untyped(self):
    """Test that constant keys and empty values are not typed."""
    self.assertEqual(self._types(["80"] * 10), {})
    self.assertEqual(self._types(["", "80", "8080"])["httpd:Key"]
                     .evidence_count, 2)

  def test_check_value(self):
    """Test for confex.check_value."""
    self.assertIsNone(confex.check_value(confex.ValueType.PORT, "port", "80"))
    self.assertIn("port", confex.check_value(confex.ValueType.PORT, "port",
                                             "70000"))
    self.assertIn("placeholder", confex.check_value(
      confex.ValueType.URI, "proxy_pass", "__PROXY_PASS__"))
    self.assertIn("placeholder", confex.check_value(
      confex.ValueType.FILE_PATH, "root", "{{ root }}"))
    self.assertIn("well-formed", confex.check_value(
      confex.ValueType.FILE_PATH, "ErrorLog", "C:\\logs\\error.log"))
    self.assertIn("does not exist", confex.check_value(
      confex.ValueType.FILE_PATH, "ErrorLog", "/x", lambda p: False))
    self.assertIsNotNone(confex.check_value(
      confex.ValueType.ENUM_SMALL, "LogLevel", "trace", domain=("warn",)))
    with self.assertRaises(ValueError):
      confex.check_value("color", "k", "red")

  def test_non_ascii_digits(self):
    """Test that digits outside ASCII are neither ports nor integers."""
    for value in (u"²", u"٣", u"8٠"):
      self.assertIn("well-formed", confex.check_value(
        confex.ValueType.PORT, "httpd:Port", value))
      self.assertIsNotNone(confex.check_value(
        confex.ValueType.INTEGER, "httpd:MaxClients", value))
    self.assertEqual(self._types([u"²", "80", "8080"], "Port"), {})
    self.assertEqual(self._types([u"٣", "443"], "Port"), {})

  @settings(max_examples=200, deadline=None)
  @given(st.lists(st.integers(-10 ** 6, 10 ** 6), min_size=1, max_size=30))
  def test_integer_key_keeps_integer_type(self, numbers):
    """Test that a key holding only integers is typed integer or not at all."""
    values = [str(n) for n in numbers]
    histograms = confex.build_histograms(
      _corpus([{"MaxClients": v} for v in values]))
    types = {t.key: t for t in confex.infer_types(histograms)}
    counts = histograms.counts_of("httpd:MaxClients")
    if confex.entropy(counts) < confex.DEFAULT_ENTROPY_THRESHOLD:
      self.assertEqual(types, {})
    else:
      self.assertEqual(types["httpd:MaxClients"].type,
                       confex.ValueType.INTEGER)


class RuleTest(unittest.TestCase):

  def _equal_rule_corpus(self, holding, equal, total=100):
    rows = []
    for i in range(total):
      if i < holding:
        rows.append({"a": "1", "b": "1" if i < equal else "2"})
      else:
        rows.append({"c": "1"})
    return _corpus(rows)

  def _accepted(self, corpus):
    return confex.infer_rules(corpus, _integer_types("httpd:a", "httpd:b"))

  def test_thresholds(self):
    """Test that support and confidence thresholds are inclusive."""
    rules = self._accepted(self._equal_rule_corpus(10, 9))
    self.assertEqual(len(rules), 1)
    rule = rules[0]
    self.assertEqual(rule.template, confex.RuleTemplate.EQUAL_TO_SAME_TYPE_ENTRY)
    self.assertEqual(rule.keys, ("httpd:a", "httpd:b"))
    self.assertEqual(rule.support, Fraction(1, 10))
    self.assertEqual(rule.confidence, Fraction(9, 10))
    # One holder fewer is below the support threshold.
    self.assertEqual(self._accepted(self._equal_rule_corpus(9, 9)), [])
    # One agreeing holder fewer is below the confidence threshold.
    self.assertEqual(self._accepted(self._equal_rule_corpus(10, 8)), [])
    self.assertEqual(confex.infer_rules([], _integer_types("httpd:a")), [])

  @settings(max_examples=200, deadline=None)
  @given(st.lists(st.tuples(st.sampled_from([None, "1", "2"]),
                            st.sampled_from([None, "1", "2"])),
                  min_size=1, max_size=25))
  def test_equal_rule_by_counting(self, pairs):
    """Test equality rule acceptance against a direct count."""
    rows = [{k: v for k, v in (("a", a), ("b", b)) if v is not None}
            for a, b in pairs]
    present = sum(1 for a, b in pairs if a is not None and b is not None)
    holding = sum(1 for a, b in pairs if a is not None and a == b)
    expected = (present > 0
                and Fraction(present, len(pairs)) >= Fraction(1, 10)
                and Fraction(holding, present) >= Fraction(9, 10))
    self.assertEqual(bool(self._accepted(_corpus(rows))), expected)

  @settings(max_examples=300, deadline=None)
  @given(_typed_corpora())
  def test_rules_by_counting(self, typed_corpus):
    """Test every template against a direct count over random corpora."""
    key_types, rows = typed_corpus
    corpus = [("i{:03d}".format(i),
               [_rec(k, v, ordinal=n)
                for n, (k, v) in enumerate(
                  ((k, v) for k in sorted(row) for v in row[k]), 1)])
              for i, row in enumerate(rows)]
    types = [confex.InferredType("httpd:k{}".format(i), t, 0, ())
             for i, t in enumerate(key_types)]
    rules = confex.infer_rules(corpus, types)
    self.assertEqual(
      set((r.template, r.keys, r.support, r.confidence, r.value_set)
          for r in rules),
      _counted_rules(key_types, rows))
    self.assertEqual(len(rules), len(set(r[:2] for r in rules)))

  def test_evaluate_rule(self):
    """Test for confex.evaluate_rule."""
    sets = {"k1": frozenset(["/var/www"]), "k2": frozenset(["/var/www/static"]),
            "k3": frozenset(["On"])}
    substring = confex.RuleTemplate.SUBSTRING_OF_ENTRY
    self.assertTrue(confex.evaluate_rule(substring, ("k1", "k2"), sets))
    self.assertFalse(confex.evaluate_rule(substring, ("k2", "k1"), sets))
    self.assertIsNone(confex.evaluate_rule(substring, ("k1", "k9"), sets))
    in_set = confex.RuleTemplate.VALUE_IN_SET
    self.assertTrue(confex.evaluate_rule(in_set, ("k3",), sets, ("On", "Off")))
    self.assertFalse(confex.evaluate_rule(in_set, ("k3",), sets, ("Off",)))
    with self.assertRaises(ValueError):
      confex.evaluate_rule("bigger_than", ("k1",), sets)

  def test_value_set_rule(self):
    """Test that rare values are left out of a mined value set."""
    rows = [{"KeepAlive": "On"}] * 60 + [{"KeepAlive": "Off"}] * 39
    rows.append({"KeepAlive": "Maybe"})
    types = [confex.InferredType("httpd:KeepAlive",
                                 confex.ValueType.ENUM_SMALL, 100,
                                 ("Maybe", "Off", "On"))]
    rules = confex.infer_rules(_corpus(rows), types)
    self.assertEqual(len(rules), 1)
    self.assertEqual(rules[0].value_set, ("Off", "On"))
    self.assertEqual(rules[0].confidence, Fraction(99, 100))


class ViolationTest(unittest.TestCase):

  def test_type_violations(self):
    """Test that planted placeholders and Windows paths are reported."""
    types = [
      confex.InferredType("nginx:proxy_pass", confex.ValueType.URI, 10, ()),
      confex.InferredType("httpd:ErrorLog", confex.ValueType.FILE_PATH, 10,
                          ()),
    ]
    records = [_rec("proxy_pass", "__PROXY_PASS__", "nginx"),
               _rec("ErrorLog", "C:\\logs\\error.log"),
               _rec("Listen", "80")]
    violations = confex.detect_violations(records, types, [])
    self.assertEqual([(v.record.key, v.kind, v.name) for v in violations],
                     [("proxy_pass", "type", confex.ValueType.URI),
                      ("ErrorLog", "type", confex.ValueType.FILE_PATH)])
    clean = [_rec("proxy_pass", "http://app:3000", "nginx"),
             _rec("ErrorLog", "/var/log/httpd/error_log")]
    self.assertEqual(confex.detect_violations(clean, types, []), [])
    index = confex.PathIndex(["/var/log/httpd"])
    self.assertEqual(len(confex.detect_violations(clean, types, [], index)), 1)

  def test_rule_violations(self):
    """Test that each rule template reports the offending record."""
    t = confex.RuleTemplate
    rules = [
      confex.InferredRule(t.EQUAL_TO_SAME_TYPE_ENTRY,
                          ("httpd:Listen", "httpd:Port"), 1, 1, ()),
      confex.InferredRule(t.SUBSTRING_OF_ENTRY,
                          ("httpd:DocumentRoot", "httpd:Alias %2Fstatic"),
                          1, 1, ()),
      confex.InferredRule(t.VALUE_IN_SET, ("httpd:KeepAlive",), 1, 1,
                          ("Off", "On")),
    ]
    records = [_rec("Listen", "80", ordinal=1), _rec("Port", "8080", ordinal=2),
               _rec("DocumentRoot", "/srv/www", ordinal=3),
               _rec("Alias %2Fstatic", "/var/www/static", ordinal=4),
               _rec("KeepAlive", "Maybe", ordinal=5)]
    violations = confex.detect_violations(records, [], rules)
    self.assertEqual([(v.record.key, v.name) for v in violations],
                     [("Listen", t.EQUAL_TO_SAME_TYPE_ENTRY),
                      ("DocumentRoot", t.SUBSTRING_OF_ENTRY),
                      ("KeepAlive", t.VALUE_IN_SET)])
    fine = [_rec("Listen", "80"), _rec("Port", "80"),
            _rec("DocumentRoot", "/var/www"),
            _rec("Alias %2Fstatic", "/var/www/static"),
            _rec("KeepAlive", "On")]
    self.assertEqual(confex.detect_violations(fine, [], rules), [])
    # Rules whose keys are missing are not applicable.
    self.assertEqual(confex.detect_violations([_rec("Listen", "80")], [],
                                              rules), [])

  def test_path_counts(self):
    """Test for confex.PathCounts."""
    a = confex.PathIndex(["/etc", "/etc/a"], "a")
    b = confex.PathIndex(["/etc"], "b")
    counts = confex.PathCounts([a, b])
    self.assertTrue(counts("/etc/a"))
    self.assertFalse(counts.exists("/etc/b"))
    self.assertFalse(counts.excluding(a)("/etc/a"))
    self.assertTrue(counts.excluding(a)("/etc"))


class ModelTest(unittest.TestCase):

  def setUp(self):
    self.tmp = tempfile.mkdtemp()

  def tearDown(self):
    shutil.rmtree(self.tmp)

  def test_fit_save_load(self):
    """Test for confex.save_model and confex.load_model."""
    rows = [{"Listen": p, "ListenCopy": p, "KeepAlive": k}
            for p, k in zip(["80", "8080", "8000", "8081"] * 5,
                            ["On", "Off"] * 10)]
    model = confex.AnalysisModel.fit(_corpus(rows))
    self.assertIn(confex.RuleTemplate.EQUAL_TO_SAME_TYPE_ENTRY,
                  [r.template for r in model.rules])
    path = os.path.join(self.tmp, "model.json")
    confex.save_model(model, path)
    loaded = confex.load_model(path)
    self.assertEqual(loaded.types, model.types)
    self.assertEqual(loaded.rules, model.rules)
    self.assertEqual(loaded.histograms.to_dict(), model.histograms.to_dict())
    self.assertEqual(loaded.parameters["support_min"], "1/10")
    with open(path, "w") as f:
      f.write('{"format_version": 99}')
    with self.assertRaises(confex.FormatVersionError):
      confex.load_model(path)

  def test_empty_model(self):
    """Test that an empty model scores every record 0."""
    model = confex.AnalysisModel.empty()
    ranking = confex.peerpressure_rank([_rec("Listen", "80")],
                                       model.histograms, "i1")
    self.assertEqual(ranking.entries[0][1], 0)

  def test_build_report(self):
    """Test for confex.build_report."""
    ranking = confex.SuspectRanking([(_rec("Listen", "8080"), Fraction(2, 3)),
                                     (_rec("User", "daemon"), Fraction(1, 5))])
    violation = confex.Violation(_rec("User", "daemon"), "rule", "x", "why")
    report = confex.build_report("i1", ranking, [violation], top_n=1)
    self.assertEqual(report["instance_id"], "i1")
    self.assertEqual(report["record_count"], 2)
    self.assertEqual(len(report["suspects"]), 1)
    top = report["suspects"][0]
    self.assertEqual((top["rank"], top["key"], top["score_exact"]),
                     (1, "Listen", "2/3"))
    self.assertAlmostEqual(top["score"], 2 / 3)
    self.assertEqual(report["violations"][0]["explanation"], "why")
    self.assertEqual(report["format_version"], confex.FORMAT_VERSION)


if __name__ == "__main__":
  unittest.main()
