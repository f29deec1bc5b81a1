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
"""End-to-end scenarios over generated corpora."""
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

from fractions import Fraction
import os
import shutil
import tempfile
import unittest

import confex
from confex import generate
from confex import pipeline


def _train_all(manifest, corpus_dir, vocab_dir):
  by_app = {}
  for iid, application, path, host_path in generate.planted_files(
      manifest, corpus_dir):
    by_app.setdefault(application, []).append(
      ("{}:{}".format(iid, path), host_path))
  for application, files in sorted(by_app.items()):
    pipeline.train(application, files, vocab_dir)


class GeneratedCorpusTest(unittest.TestCase):
  """200 instances, 600 active configuration files and 5000 decoys."""

  @classmethod
  def setUpClass(cls):
    cls.tmp = tempfile.mkdtemp()
    cls.corpus_dir = os.path.join(cls.tmp, "corpus")
    cls.manifest = generate.generate_corpus(
      cls.corpus_dir, count=200, seed=11, nonstandard=0.5, decoys=25,
      inject=4, plant_violations=2)
    cls.instances = cls.manifest["instances"]

  @classmethod
  def tearDownClass(cls):
    shutil.rmtree(cls.tmp)

  def test_corpus_shape(self):
    """Test the size and placement mix of the generated corpus."""
    active = [c for e in self.instances.values() for c in e["configs"]
              if c["active"]]
    self.assertEqual(len(active), 600)
    self.assertEqual(sum(len(e["decoys"]) for e in self.instances.values()),
                     5000)
    nonstandard = sum(1 for c in active if c["nonstandard"])
    self.assertGreaterEqual(Fraction(nonstandard, len(active)),
                            Fraction(2, 5))

  def test_discovery(self):
    """Test cross-validated discovery against both baselines."""
    snapshots, training, truth = pipeline.labeling_inputs(self.manifest,
                                                          self.corpus_dir)
    _, score = confex.cross_validate_labeling(snapshots, training, truth,
                                              folds=5, seed=0)
    self.assertEqual(score.recall, 1)
    self.assertGreaterEqual(score.precision, Fraction(98, 100))

    baselines = confex.evaluate_baselines(snapshots, truth,
                                          generate.APPLICATIONS)
    self.assertLessEqual(baselines["default_paths"].recall, Fraction(4, 5))
    self.assertLess(baselines["default_paths"].recall, score.recall)
    self.assertLess(baselines["syntax_only"].precision, score.precision)
    self.assertLess(baselines["default_paths"].f1, score.f1)
    self.assertLess(baselines["syntax_only"].f1, score.f1)

  def test_detection(self):
    """Test outlier ranking and violation detection end to end."""
    config = pipeline.PipelineConfig(vocab_dir=os.path.join(self.tmp, "vocab"))
    _train_all(self.manifest, self.corpus_dir, config.vocab_dir)

    scan_dir = os.path.join(self.tmp, "scan")
    summary = pipeline.run_scan(pipeline.find_instances([self.corpus_dir]),
                                scan_dir, config)
    self.assertEqual(summary["failures"], [])
    self.assertEqual(summary["totals"]["files_labeled"], 3 * 200)
    self.assertEqual(summary["totals"]["file_errors"], 0)

    out = os.path.join(self.tmp, "analysis")
    pipeline.run_analyze(scan_dir, out, config)
    stats = pipeline.report_statistics(pipeline.read_reports(out),
                                       self.manifest)
    self.assertEqual(stats["injected"], 4)
    self.assertEqual(stats["ranked_listed"], 4)
    self.assertEqual(stats["planted_violations"], 2)
    self.assertEqual(stats["violations_detected"], 2)
    self.assertEqual(stats["clean_instances_with_violations"], [])


class InjectionRankingTest(unittest.TestCase):
  """500 single-outlier trials over a clean 100-instance corpus."""

  @classmethod
  def setUpClass(cls):
    cls.tmp = tempfile.mkdtemp()
    corpus_dir = os.path.join(cls.tmp, "corpus")
    manifest = generate.generate_corpus(corpus_dir, count=100, seed=21,
                                        decoys=2)
    config = pipeline.PipelineConfig(vocab_dir=os.path.join(cls.tmp, "vocab"))
    _train_all(manifest, corpus_dir, config.vocab_dir)
    scan_dir = os.path.join(cls.tmp, "scan")
    pipeline.run_scan(pipeline.find_instances([corpus_dir]), scan_dir, config)
    cls.corpus = pipeline.read_corpus(scan_dir)

  @classmethod
  def tearDownClass(cls):
    shutil.rmtree(cls.tmp)

  def test_rank_rates(self):
    """Test the top-10 and first-place rates of injected outliers."""
    targets = [(application, key, outliers)
               for application, key, _, outliers in generate.INJECTION_TARGETS]
    trials = confex.injection_trials(self.corpus, targets, 500, seed=0)
    self.assertEqual(len(trials), 500)
    self.assertEqual(len(set(t.key for t in trials)), len(targets))
    first, top10 = confex.injection_rates(trials, top_n=10)
    self.assertGreaterEqual(top10, Fraction(9, 10))
    self.assertGreaterEqual(first, Fraction(7, 10))

  def test_dominant_values(self):
    """Test that every target key is at least 95% uniform in the corpus."""
    histograms = confex.build_histograms(self.corpus)
    for application, key, dominant, _ in generate.INJECTION_TARGETS:
      counts = histograms.counts_of("{}:{}".format(application, key))
      self.assertGreaterEqual(Fraction(counts[dominant], sum(counts.values())),
                              Fraction(95, 100))


class ActiveFilteringTest(unittest.TestCase):

  def setUp(self):
    self.tmp = tempfile.mkdtemp()
    self.corpus_dir = os.path.join(self.tmp, "corpus")
    self.manifest = generate.generate_corpus(self.corpus_dir, count=3, seed=8,
                                             decoys=8, extra_files=1000)

  def tearDown(self):
    shutil.rmtree(self.tmp)

  def _scan(self, name, **settings):
    config = pipeline.PipelineConfig(vocab_dir=os.path.join(self.tmp, "v"),
                                     **settings)
    summary = pipeline.run_scan(pipeline.find_instances([self.corpus_dir]),
                                os.path.join(self.tmp, name), config, [])
    return summary["instances"]

  def test_methods(self):
    """Test that both methods keep exactly the start-up reads."""
    # Timestamps first: reading files during a scan may move their atimes.
    rows = self._scan("ts", active_method="timestamps",
                      cutoff=generate.REFERENCE_TIME)
    self.assertEqual([r["files_active"] for r in rows], [8, 8, 8])
    rows = self._scan("events", active_method="events")
    self.assertEqual([r["files_active"] for r in rows], [8, 8, 8])
    rows = self._scan("none", active_method="none")
    for r in rows:
      self.assertEqual(r["files_active"], r["files_scanned"])
      self.assertGreaterEqual(r["files_scanned"], 1000)


if __name__ == "__main__":
  unittest.main()
