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
"""Tests for confex.evaluation."""
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

from fractions import Fraction
import shutil
import tempfile
import unittest

import confex
from confex import generate
from confex import pipeline

HTTPD_TEXT = ('ServerRoot "/var/www"\n'
              'Listen 80\n'
              '<IfModule unixd_module>\n'
              '    User daemon\n'
              '</IfModule>\n')
MYSQL_TEXT = "[mysqld]\nport = 3306\nsocket = /tmp/m.sock\n"
NOTES_TEXT = "Just some notes here.\n"


def _entry(path, text):
  data = text.encode("utf-8")
  return confex.FileEntry(path, len(data), content=data)


class ScoreLabelsTest(unittest.TestCase):

  def test_score_labels(self):
    """Test for confex.score_labels."""
    predicted = {"a": "httpd", "b": "nginx", "c": None, "d": "mysql"}
    truth = {"a": "httpd", "b": "httpd", "d": None, "e": "mysql"}
    score = confex.score_labels(predicted, truth)
    self.assertEqual(score.true_positives, 1)
    self.assertEqual(score.false_positives, 2)
    self.assertEqual(score.false_negatives, 2)
    self.assertEqual(score.precision, Fraction(1, 3))
    self.assertEqual(score.recall, Fraction(1, 3))
    self.assertEqual(score.f1, Fraction(1, 3))

  def test_empty(self):
    """Test that empty inputs score zero without dividing by zero."""
    score = confex.score_labels({}, {})
    self.assertEqual(score, confex.LabelScore(0, 0, 0, 0, 0, 0))
    perfect = confex.score_labels({"a": "httpd"}, {"a": "httpd"})
    self.assertEqual((perfect.precision, perfect.recall, perfect.f1), (1, 1, 1))


class CrossValidationTest(unittest.TestCase):

  def setUp(self):
    self.snapshots = {}
    self.training = {}
    self.truth = {}
    for i in range(4):
      iid = "inst-{}".format(i)
      self.snapshots[iid] = confex.InstanceSnapshot(iid, [
        _entry("/etc/httpd/conf/httpd.conf", HTTPD_TEXT),
        _entry("/opt/db/server.cnf", MYSQL_TEXT),
        _entry("/opt/notes.txt", NOTES_TEXT),
      ])
      self.training[iid] = [
        ("httpd", "/etc/httpd/conf/httpd.conf", HTTPD_TEXT.encode("utf-8")),
        ("mysql", "/opt/db/server.cnf", MYSQL_TEXT.encode("utf-8")),
      ]
      self.truth[(iid, "/etc/httpd/conf/httpd.conf")] = "httpd"
      self.truth[(iid, "/opt/db/server.cnf")] = "mysql"

  def test_k_fold_partition(self):
    """Test for confex.k_fold_partition."""
    ids = ["i{}".format(i) for i in range(10)]
    folds = confex.k_fold_partition(ids, 5, seed=3)
    self.assertEqual([len(f) for f in folds], [2] * 5)
    self.assertEqual(sorted(i for f in folds for i in f), sorted(ids))
    self.assertEqual(folds, confex.k_fold_partition(list(reversed(ids)), 5,
                                                    seed=3))
    with self.assertRaises(ValueError):
      confex.k_fold_partition(ids, 1)

  def test_cross_validate(self):
    """Test for confex.cross_validate_labeling."""
    predictions, score = confex.cross_validate_labeling(
      self.snapshots, self.training, self.truth, folds=2)
    self.assertEqual(len(predictions), 12)
    self.assertEqual(predictions[("inst-2", "/opt/db/server.cnf")], "mysql")
    self.assertIsNone(predictions[("inst-0", "/opt/notes.txt")])
    self.assertEqual(score, confex.LabelScore(8, 0, 0, 1, 1, 1))

  def test_baselines(self):
    """Test for confex.evaluate_baselines."""
    scores = confex.evaluate_baselines(self.snapshots, self.truth,
                                       ["httpd", "mysql"])
    by_path = scores["default_paths"]
    self.assertEqual(by_path.precision, 1)
    self.assertEqual(by_path.recall, Fraction(1, 2))
    # Prose parses as httpd directives.
    by_syntax = scores["syntax_only"]
    self.assertEqual(by_syntax.recall, 1)
    self.assertEqual(by_syntax.precision, Fraction(2, 3))


class SweepTest(unittest.TestCase):

  @classmethod
  def setUpClass(cls):
    cls.tmp = tempfile.mkdtemp()
    manifest = generate.generate_corpus(cls.tmp, count=10, seed=4, decoys=6)
    cls.inputs = pipeline.labeling_inputs(manifest, cls.tmp)

  @classmethod
  def tearDownClass(cls):
    shutil.rmtree(cls.tmp)

  def test_sweep_thresholds(self):
    """Test that a stricter threshold never labels more files."""
    sweep = confex.sweep_thresholds(*self.inputs, thresholds=[1, 0.8, 0.9, 0.8])
    self.assertEqual([t for t, _ in sweep],
                     [Fraction(4, 5), Fraction(9, 10), 1])
    for (_, looser), (_, stricter) in zip(sweep, sweep[1:]):
      self.assertLessEqual(stricter.true_positives + stricter.false_positives,
                           looser.true_positives + looser.false_positives)
      self.assertLessEqual(stricter.recall, looser.recall)
    self.assertEqual([t for t, _ in confex.sweep_thresholds(*self.inputs)],
                     list(confex.DEFAULT_SWEEP_THRESHOLDS))


class InjectionTrialsTest(unittest.TestCase):

  def setUp(self):
    self.corpus = [
      ("i{:02d}".format(i),
       [confex.ConfigRecord("httpd", "/etc/httpd.conf", "Timeout", "300", 1),
        confex.ConfigRecord("httpd", "/etc/httpd.conf", "ServerName",
                            "h{}".format(i), 1),
        confex.ConfigRecord("httpd", "/etc/httpd.conf", "User", "daemon", 1)])
      for i in range(20)]
    self.targets = [("httpd", "Timeout", ("3", "30000"))]

  def test_injection_trials(self):
    """Test that an outlier in a uniform key ranks first."""
    trials = confex.injection_trials(self.corpus, self.targets, 30, seed=1)
    self.assertEqual(len(trials), 30)
    for t in trials:
      self.assertEqual((t.application, t.key, t.rank), ("httpd", "Timeout", 1))
      self.assertIn(t.value, ("3", "30000"))
    self.assertEqual(confex.injection_rates(trials), (1, 1))
    self.assertEqual(
      confex.injection_trials(self.corpus, self.targets, 30, seed=1), trials)

  def test_injection_rates(self):
    """Test for confex.injection_rates."""
    trials = [confex.InjectionTrial("i", "httpd", "k", "v", rank)
              for rank in (1, 2, 11, None)]
    self.assertEqual(confex.injection_rates(trials),
                     (Fraction(1, 4), Fraction(1, 2)))
    self.assertEqual(confex.injection_rates(trials, top_n=1),
                     (Fraction(1, 4), Fraction(1, 4)))
    self.assertEqual(confex.injection_rates([]), (0, 0))

  def test_missing_targets(self):
    """Test that targets no instance holds are rejected."""
    with self.assertRaises(ValueError):
      confex.injection_trials(self.corpus, [("nginx", "user", ("x",))], 5)


if __name__ == "__main__":
  unittest.main()
