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
"""Quality measurements: precision, recall and F1 of file discovery with k-fold
cross-validation over instances, threshold sweeps, and outlier-injection
trials for suspect ranking."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
from fractions import Fraction
import logging
import random
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from confex import analysis, corpus, discovery, util
from confex.disambiguate import ConfigRecord

__all__ = [
  "LabelScore",
  "score_labels",
  "k_fold_partition",
  "cross_validate_labeling",
  "evaluate_baselines",
  "DEFAULT_SWEEP_THRESHOLDS",
  "sweep_thresholds",
  "InjectionTrial",
  "injection_trials",
  "injection_rates",
]

logger = logging.getLogger(__name__)

LabelScore = collections.namedtuple(
  "LabelScore", ["true_positives", "false_positives", "false_negatives",
                 "precision", "recall", "f1"])


def _ratio(num, den):
  return Fraction(num, den) if den else Fraction(0)


def score_labels(predicted, truth):
  # type: (Mapping[Any, Optional[str]], Mapping[Any, Optional[str]]) -> LabelScore
  """
  Compare predicted labels with ground truth.

  Both mappings go from a file identifier to an application label or None.
  A prediction is a true positive only when it names the right application;
  a wrong application counts as a false positive and, if the file is a
  configuration file, also as a false negative.

  Returns:
    A `LabelScore` with exact fractions (0 when a denominator is 0).
  """
  tp = fp = fn = 0
  for key in set(predicted) | set(truth):
    p = predicted.get(key)
    t = truth.get(key)
    if p is not None and p == t:
      tp += 1
    else:
      if p is not None:
        fp += 1
      if t is not None:
        fn += 1
  precision = _ratio(tp, tp + fp)
  recall = _ratio(tp, tp + fn)
  if precision + recall:
    f1 = 2 * precision * recall / (precision + recall)
  else:
    f1 = Fraction(0)
  return LabelScore(tp, fp, fn, precision, recall, f1)


def k_fold_partition(instance_ids, folds=5, seed=0):
  # type: (Sequence[str], int, int) -> List[List[str]]
  """Split instance ids into `folds` groups after a seeded shuffle."""
  if folds < 2:
    raise ValueError("Need at least 2 folds, got {}".format(folds))
  ids = sorted(instance_ids)
  random.Random(seed).shuffle(ids)
  return [sorted(ids[i::folds]) for i in range(folds)]


def cross_validate_labeling(snapshots,  # type: Mapping[str, corpus.InstanceSnapshot]
                            training_files,  # type: Mapping[str, List[Tuple[str, str, bytes]]]
                            truth,  # type: Mapping[Tuple[str, str], Optional[str]]
                            folds=5,  # type: int
                            seed=0,  # type: int
                            **label_kwargs
                            ):
  # type: (...) -> Tuple[Dict[Tuple[str, str], Optional[str]], LabelScore]
  """
  k-fold cross-validated labeling.

  For every fold, vocabularies are trained on the known configuration files
  of the other folds' instances, then every retained text file of the
  fold's instances is labeled.

  Args:
    snapshots: Instance id to snapshot.
    training_files: Instance id to `(application, path, content)` triples of
      that instance's known configuration files.
    truth: `(instance_id, path)` to the true application label (None or
      absent for other files).
    folds: Number of folds.
    seed: Seed of the fold assignment.
    **label_kwargs: Passed on to `discovery.label_file`.

  Returns:
    `(predictions, score)` where predictions maps `(instance_id, path)` of
    every labeled-or-not candidate file to its predicted label.
  """
  predictions = {}
  partition = k_fold_partition(list(snapshots), folds, seed)
  for i, test_ids in enumerate(partition):
    train_ids = [iid for j, part in enumerate(partition) if j != i
                 for iid in part]
    by_app = collections.OrderedDict()
    for iid in sorted(train_ids):
      for application, path, content in training_files.get(iid, ()):
        by_app.setdefault(application, []).append(
          ("{}:{}".format(iid, path), content))
    vocabularies = [discovery.train_vocabulary(app, files)
                    for app, files in sorted(by_app.items())]
    logger.debug("Fold %d: %d test instances, vocabularies %s", i,
                 len(test_ids), vocabularies)
    for iid in test_ids:
      for entry in snapshots[iid].entries:
        if entry.content is None:
          continue
        result = discovery.label_file(entry, vocabularies, **label_kwargs)
        predictions[(iid, entry.path)] = result.application
  return predictions, score_labels(predictions, truth)


def evaluate_baselines(snapshots, truth, applications, **filter_kwargs):
  # type: (Mapping[str, corpus.InstanceSnapshot], Mapping, Sequence[str], Any) -> Dict[str, LabelScore]
  """Score the default-paths and syntax-only baselines over all instances.

  The default-paths baseline looks at every entry; the syntax-only baseline
  at every retained text file.
  """
  by_path = {}
  by_syntax = {}
  for iid, snap in snapshots.items():
    for entry in snap.entries:
      label = discovery.default_paths_baseline(entry.path)
      if label is not None:
        by_path[(iid, entry.path)] = label
      if entry.content is not None:
        by_syntax[(iid, entry.path)] = discovery.syntax_only_baseline(
          entry, applications, **filter_kwargs)
  return {
    "default_paths": score_labels(by_path, truth),
    "syntax_only": score_labels(by_syntax, truth),
  }


# Similarity thresholds tried by `sweep_thresholds` unless told otherwise.
DEFAULT_SWEEP_THRESHOLDS = tuple(Fraction(n, 100) for n in range(80, 101, 4))


def sweep_thresholds(snapshots,  # type: Mapping[str, corpus.InstanceSnapshot]
                     training_files,  # type: Mapping[str, List[Tuple[str, str, bytes]]]
                     truth,  # type: Mapping[Tuple[str, str], Optional[str]]
                     thresholds=DEFAULT_SWEEP_THRESHOLDS,  # type: Iterable[Any]
                     folds=5,  # type: int
                     seed=0,  # type: int
                     **label_kwargs
                     ):
  # type: (...) -> List[Tuple[Fraction, LabelScore]]
  """
  Cross-validated labeling scores for several similarity thresholds.

  Every threshold uses the same fold assignment, so the scores differ only
  by the threshold. A higher threshold never labels a file a lower one
  leaves unlabeled.

  Returns:
    `(threshold, score)` pairs in increasing threshold order.
  """
  out = []
  for threshold in sorted(set(util.as_fraction(t) for t in thresholds)):
    _, score = cross_validate_labeling(snapshots, training_files, truth,
                                       folds, seed, threshold=threshold,
                                       **label_kwargs)
    logger.info("Threshold %s: precision %s recall %s", threshold,
                score.precision, score.recall)
    out.append((threshold, score))
  return out


InjectionTrial = collections.namedtuple(
  "InjectionTrial", ["instance_id", "application", "key", "value", "rank"])


def injection_trials(corpus_,  # type: Iterable[Tuple[str, Iterable[ConfigRecord]]]
                     targets,  # type: Iterable[Tuple[str, str, Sequence[str]]]
                     trials,  # type: int
                     seed=0  # type: int
                     ):
  # type: (...) -> List[InjectionTrial]
  """
  Plant one outlier value per trial and rank it leave-one-out.

  Each trial picks an instance holding one of the target keys, gives one of
  its records for that key an outlier value and ranks the altered instance
  against the histograms of all other instances.

  Args:
    corpus_: `(instance_id, records)` pairs of a clean corpus.
    targets: `(application, key, outlier values)` triples.
    trials: Number of trials.
    seed: Seed of the trial choices.

  Returns:
    One `InjectionTrial` per trial; `rank` is the 1-based rank of the altered
    record within its instance.

  Raises:
    ValueError: if no instance holds any target key.
  """
  corpus_ = [(iid, list(records)) for iid, records in corpus_]
  histograms = analysis.build_histograms(corpus_)
  choices = []
  for iid, records in corpus_:
    for application, key, outliers in targets:
      positions = [i for i, r in enumerate(records)
                   if r.application == application and r.key == key]
      if positions:
        choices.append((iid, records, application, key, sorted(outliers),
                        positions))
  if not choices:
    raise ValueError("No instance holds any of the target keys")

  rng = random.Random(seed)
  peers = {}
  results = []
  for _ in range(trials):
    iid, records, application, key, outliers, positions = rng.choice(choices)
    i = rng.choice(positions)
    planted = records[i]._replace(value=rng.choice(outliers))
    if iid not in peers:
      peers[iid] = histograms.without_instance(iid, records)
    ranking = analysis.peerpressure_rank(
      records[:i] + [planted] + records[i + 1:], peers[iid], iid)
    results.append(InjectionTrial(iid, application, key, planted.value,
                                  ranking.rank_of(lambda r: r is planted)))
  return results


def injection_rates(trials_, top_n=analysis.DEFAULT_TOP_N):
  # type: (Sequence[InjectionTrial], int) -> Tuple[Fraction, Fraction]
  """Fractions of trials ranked first and ranked within `top_n`."""
  first = sum(1 for t in trials_ if t.rank == 1)
  listed = sum(1 for t in trials_ if t.rank is not None and t.rank <= top_n)
  return _ratio(first, len(trials_)), _ratio(listed, len(trials_))
