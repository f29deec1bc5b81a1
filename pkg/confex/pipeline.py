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
pipeline.py

The phases wired together: training vocabularies, scanning instances into
record corpora, and analyzing record corpora into reports. The command-line
front-end in `confex.cli` is a thin layer over these functions.

Output layout of a scan:

  records/<instance_id>.jsonl
  paths/<instance_id>.jsonl.gz
  summary.json

and of an analysis:

  reports/<instance_id>.json
  analysis.json
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

from concurrent.futures import ProcessPoolExecutor
import glob
import json
import logging
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from six import iteritems, string_types
import yaml

from confex import active, analysis, corpus, discovery, envdata, generate, \
  parsers, util
from confex.disambiguate import ConfigRecord, disambiguate, flatten, \
  key_stability_check, load_rules, read_records, write_records

__all__ = [
  "CONFEX_HOME_ENV",
  "SYSTEM_FILES",
  "PipelineConfig",
  "InstanceSource",
  "find_instances",
  "train",
  "scan_instance",
  "run_scan",
  "read_corpus",
  "read_path_indexes",
  "run_analyze",
  "labeling_inputs",
  "read_reports",
  "report_statistics",
]

logger = logging.getLogger(__name__)

CONFEX_HOME_ENV = "CONFEX_HOME"

# System files parsed at fixed locations, whatever discovery says.
SYSTEM_FILES = (
  ("/etc/fstab", "fstab"),
  ("/etc/services", "services"),
)

_FRACTION_FIELDS = ("threshold", "support_min", "confidence_min")


class PipelineConfig(object):
  """
  Settings of every phase.

  Defaults can be replaced from a YAML mapping (`from_file`) and then from
  explicit overrides (`replace`), so command-line flags win over the file.
  """

  FIELDS = (
    "vocab_dir", "rule_dir", "threshold", "size_cap", "excluded_extensions",
    "active_method", "cutoff", "window_seconds", "syntax_check",
    "entropy_threshold", "support_min", "confidence_min", "top_n", "jobs",
  )

  def __init__(self, **kwargs):
    home = os.environ.get(CONFEX_HOME_ENV)
    self.vocab_dir = os.path.join(home, "vocab") if home else "vocab"
    self.rule_dir = None
    if home and os.path.isdir(os.path.join(home, "rules")):
      self.rule_dir = os.path.join(home, "rules")
    self.threshold = discovery.DEFAULT_THRESHOLD
    self.size_cap = corpus.DEFAULT_SIZE_CAP
    self.excluded_extensions = sorted(corpus.DEFAULT_EXCLUDED_EXTENSIONS)
    self.active_method = "events"
    self.cutoff = None
    self.window_seconds = active.DEFAULT_WINDOW_SECONDS
    self.syntax_check = True
    self.entropy_threshold = analysis.DEFAULT_ENTROPY_THRESHOLD
    self.support_min = analysis.DEFAULT_SUPPORT_MIN
    self.confidence_min = analysis.DEFAULT_CONFIDENCE_MIN
    self.top_n = analysis.DEFAULT_TOP_N
    self.jobs = 1
    self._set(kwargs)
    self.validate()

  def _set(self, values):
    for name, value in iteritems(values):
      if name not in self.FIELDS:
        raise ValueError("Unknown pipeline setting '{}'".format(name))
      if value is None:
        continue
      if name in _FRACTION_FIELDS:
        value = util.as_fraction(value)
      elif name == "cutoff":
        value = active.parse_cutoff(value)
      elif name == "excluded_extensions":
        if isinstance(value, string_types):
          value = [value]
        value = sorted(e.lower() for e in value)
      setattr(self, name, value)

  def replace(self, **overrides):
    # type: (...) -> PipelineConfig
    """A copy with the non-None `overrides` applied."""
    values = self.to_dict()
    values.update({k: v for k, v in iteritems(overrides) if v is not None})
    return PipelineConfig(**values)

  @classmethod
  def from_file(cls, path):
    # type: (str) -> PipelineConfig
    with open(path, "r", encoding="utf-8") as f:
      doc = yaml.safe_load(f) or {}
    if not isinstance(doc, dict):
      raise ValueError("Config file '{}' must hold a mapping".format(path))
    return cls(**doc)

  def validate(self):
    """
    Raises:
      ValueError: for fractions outside [0, 1], a non-positive size cap or
        job count, or an unknown active-file method.
    """
    for name in _FRACTION_FIELDS:
      v = getattr(self, name)
      if not 0 <= v <= 1:
        raise ValueError("{} must be in [0, 1], got {}".format(name, v))
    if self.size_cap <= 0:
      raise ValueError("size_cap must be positive, got {}".format(
        self.size_cap))
    if self.jobs < 1:
      raise ValueError("jobs must be at least 1, got {}".format(self.jobs))
    if self.top_n < 1:
      raise ValueError("top_n must be at least 1, got {}".format(self.top_n))
    if self.entropy_threshold < 0:
      raise ValueError("entropy_threshold must be non-negative, got "
                       "{}".format(self.entropy_threshold))
    method = active.ActiveMethod.CLI_NAMES.get(self.active_method,
                                               self.active_method)
    if method not in (active.ActiveMethod.TIMESTAMPS,
                      active.ActiveMethod.ACCESS_EVENTS,
                      active.ActiveMethod.NONE):
      raise ValueError("Unknown active-file method '{}'".format(
        self.active_method))

  def to_dict(self):
    return {name: getattr(self, name) for name in self.FIELDS}

  def __repr__(self):
    return "PipelineConfig({})".format(", ".join(
      "{}={!r}".format(k, v) for k, v in sorted(self.to_dict().items())))


################################################################################
# Training

def train(application,  # type: str
          files,  # type: Iterable[Tuple[str, str]]
          vocab_dir,  # type: str
          file_format=None  # type: Optional[str]
          ):
  # type: (...) -> Tuple[discovery.Vocabulary, int]
  """
  Create or extend `<vocab_dir>/<application>.json` from `(source, host
  path)` pairs. Sources already in the vocabulary are skipped.

  Returns:
    `(vocabulary, number of files added)`.

  Raises:
    ValueError: if `files` is empty.
  """
  files = list(files)
  if not files:
    raise ValueError("No training files for '{}'".format(application))
  path = os.path.join(vocab_dir, application + ".json")
  vocab = discovery.load_vocabulary(path) if os.path.exists(path) else None
  known = vocab.sources() if vocab is not None else frozenset()
  new = []
  for source, host_path in files:
    if source in known:
      continue
    with open(host_path, "rb") as f:
      new.append((source, f.read()))
  if new:
    vocab = discovery.train_vocabulary(application, new, vocab, file_format)
    discovery.save_vocabulary(vocab, path)
  logger.info("Vocabulary %s: %d new files, %d in total", application,
              len(new), len(vocab.file_sets))
  return vocab, len(new)


################################################################################
# Scanning

class InstanceSource(object):
  """Where one instance to scan lives: a root (directory or tar archive)
  and an optional access log."""

  def __init__(self, instance_id, root, access_log=None):
    self.instance_id = instance_id
    self.root = root
    self.access_log = access_log

  def __repr__(self):
    return "InstanceSource({!r}, {!r})".format(self.instance_id, self.root)


def _source_for(path, instance_id):
  if os.path.isdir(os.path.join(path, "rootfs")):
    log = os.path.join(path, "access.log")
    return InstanceSource(instance_id, os.path.join(path, "rootfs"),
                          log if os.path.exists(log) else None)
  return InstanceSource(instance_id, path)


def find_instances(paths):
  # type: (Iterable[str]) -> List[InstanceSource]
  """
  Resolve scan arguments into instances.

  A path holding an `instances/` directory (a generated corpus) yields one
  instance per subdirectory; a path holding `rootfs/` (and optionally
  `access.log`) is one instance; anything else is a snapshot root of its
  own. Instance ids are directory basenames.

  Raises:
    ValueError: if a path does not exist or two instances share an id.
  """
  sources = []
  for path in paths:
    if not os.path.exists(path):
      raise ValueError("No such instance path '{}'".format(path))
    base = os.path.join(path, "instances")
    if os.path.isdir(base):
      for name in sorted(os.listdir(base)):
        if os.path.isdir(os.path.join(base, name)):
          sources.append(_source_for(os.path.join(base, name), name))
    else:
      sources.append(_source_for(path, corpus._default_instance_id(path)))
  seen = set()
  for s in sources:
    if s.instance_id in seen:
      raise ValueError("Instance id '{}' appears twice".format(s.instance_id))
    seen.add(s.instance_id)
  return sources


def _active_paths(snapshot, config):
  try:
    report = active.discover_active(snapshot, config.active_method,
                                    config.cutoff, config.window_seconds)
  except active.ActiveDiscoveryError as e:
    logger.warning("%s; scanning all files", e)
    report = active.active_none(snapshot)
  return report


def _extract(application, entry, rules):
  tree = parsers.parse_file(application, entry.content, entry.path)
  tree = disambiguate(tree, rules)
  records = flatten(tree, application, entry.path)
  unstable = key_stability_check(records)
  if unstable:
    logger.warning("%s: %d records of %s keep positional keys (e.g. %s)",
                   entry.path, len(unstable), application, unstable[0].key)
  return records


def scan_instance(source,  # type: InstanceSource
                  out_dir,  # type: str
                  config,  # type: PipelineConfig
                  vocabularies  # type: Sequence[discovery.Vocabulary]
                  ):
  # type: (...) -> Dict[str, Any]
  """
  Run discovery and extraction on one instance and write its record file
  and path index.

  Files that fail to parse or transform are counted and listed in the
  returned summary; they never stop the instance.

  Returns:
    The instance's summary: counts of files scanned, active, labeled and
    parsed, the number of records, the labels and the per-file errors.
  """
  snapshot = corpus.ingest_directory(
    source.root,
    corpus.make_retain_predicate(config.size_cap, config.excluded_extensions),
    source.instance_id)
  if source.access_log is not None:
    snapshot = corpus.ingest_access_log(snapshot, source.access_log)
  report = _active_paths(snapshot, config)

  rules = {}
  labels = []
  errors = []
  records = []
  parsed = 0
  for entry in snapshot.entries:
    if entry.path not in report.active_paths or entry.content is None:
      continue
    result = discovery.label_file(
      entry, vocabularies, config.threshold, config.size_cap,
      config.excluded_extensions, syntax_check=config.syntax_check)
    if not result.labeled:
      continue
    labels.append({"path": entry.path, "application": result.application,
                   "similarity": str(result.best_similarity)})
    application = result.application
    try:
      if application not in rules:
        rules[application] = load_rules(application, config.rule_dir)
      records.extend(_extract(application, entry, rules[application]))
      parsed += 1
    except ValueError as e:
      logger.warning("%s:%s: %s", snapshot.instance_id, entry.path, e)
      errors.append({"path": entry.path, "application": application,
                     "error": str(e)})

  for path, application in SYSTEM_FILES:
    entry = snapshot.get(path)
    if entry is None or entry.content is None:
      continue
    try:
      if application not in rules:
        rules[application] = load_rules(application, config.rule_dir)
      records.extend(_extract(application, entry, rules[application]))
    except ValueError as e:
      logger.warning("%s:%s: %s", snapshot.instance_id, path, e)
      errors.append({"path": path, "application": application,
                     "error": str(e)})

  profile = envdata.collect_environment(snapshot)
  records.extend(envdata.env_to_records(profile, [l["path"] for l in labels]))

  iid = snapshot.instance_id
  write_records(os.path.join(out_dir, "records", iid + ".jsonl"), iid, records,
                {"active_method": report.method})
  corpus.PathIndex.from_snapshot(snapshot).save(
    os.path.join(out_dir, "paths", iid + ".jsonl.gz"))
  summary = {
    "instance_id": iid,
    "active_method": report.method,
    "files_scanned": len(snapshot),
    "files_active": len(report.active_paths),
    "files_labeled": len(labels),
    "files_parsed": parsed,
    "records": len(records),
    "labels": labels,
    "errors": errors,
  }
  logger.info("%s: %d files, %d labeled, %d records", iid, len(snapshot),
              len(labels), len(records))
  return summary


def _scan_worker(args):
  source, out_dir, config, vocabularies = args
  try:
    return scan_instance(source, out_dir, config, vocabularies)
  except Exception as e:  # pylint: disable=broad-except
    logger.exception("Scan of %s failed", source.instance_id)
    return {"instance_id": source.instance_id, "failed": True,
            "error": "{}: {}".format(type(e).__name__, e)}


def run_scan(sources, out_dir, config, vocabularies=None):
  # type: (Sequence[InstanceSource], str, PipelineConfig, Optional[Sequence[discovery.Vocabulary]]) -> Dict[str, Any]
  """
  Scan every instance, `config.jobs` at a time, and write `summary.json`.

  A failing instance is recorded in the summary's `failures`; the others
  are unaffected.
  """
  if vocabularies is None:
    vocabularies = discovery.load_vocabularies(config.vocab_dir)
  if not vocabularies:
    logger.warning("No vocabularies in %s; nothing will be labeled",
                   config.vocab_dir)
  tasks = [(s, out_dir, config, vocabularies) for s in sources]
  if config.jobs > 1 and len(tasks) > 1:
    with ProcessPoolExecutor(max_workers=config.jobs) as pool:
      results = list(pool.map(_scan_worker, tasks))
  else:
    results = [_scan_worker(t) for t in tasks]
  instances = [r for r in results if not r.get("failed")]
  summary = {
    "format_version": util.FORMAT_VERSION,
    "instances": sorted(instances, key=lambda r: r["instance_id"]),
    "failures": sorted((r for r in results if r.get("failed")),
                       key=lambda r: r["instance_id"]),
    "totals": {
      "instances": len(instances),
      "files_scanned": sum(r["files_scanned"] for r in instances),
      "files_labeled": sum(r["files_labeled"] for r in instances),
      "files_parsed": sum(r["files_parsed"] for r in instances),
      "records": sum(r["records"] for r in instances),
      "file_errors": sum(len(r["errors"]) for r in instances),
    },
  }
  util.atomic_write(os.path.join(out_dir, "summary.json"),
                    json.dumps(summary, indent=2, sort_keys=True) + "\n")
  return summary


################################################################################
# Analysis

def read_corpus(scan_dir):
  # type: (str) -> List[Tuple[str, List[ConfigRecord]]]
  """`(instance_id, records)` of every record file of a scan, by id."""
  out = []
  for path in sorted(glob.glob(os.path.join(scan_dir, "records", "*.jsonl"))):
    out.append(read_records(path))
  out.sort(key=lambda x: x[0])
  return out


def read_path_indexes(scan_dir):
  # type: (str) -> Dict[str, corpus.PathIndex]
  out = {}
  for path in sorted(glob.glob(os.path.join(scan_dir, "paths",
                                            "*.jsonl.gz"))):
    index = corpus.PathIndex.load(path)
    out[index.instance_id] = index
  return out


def _without(corpus_, instance_id):
  return [(iid, records) for iid, records in corpus_ if iid != instance_id]


def run_analyze(scan_dir,  # type: str
                out_dir,  # type: str
                config,  # type: PipelineConfig
                model=None,  # type: Optional[analysis.AnalysisModel]
                leave_one_out=False,  # type: bool
                targets=None,  # type: Optional[Iterable[str]]
                model_out=None  # type: Optional[str]
                ):
  # type: (...) -> Dict[str, Any]
  """
  Rank and check every target instance of a scan and write its report.

  Without `model`, the corpus itself is the model and each target is
  analyzed against all other instances (histograms, types and rules are
  rebuilt without it). With `model`, targets the model was built from are
  subtracted from it when `leave_one_out` is set.

  Args:
    scan_dir: Output directory of a scan.
    out_dir: Where `reports/` and `analysis.json` go.
    config: Analysis thresholds and `top_n`.
    model: A loaded model, or None.
    leave_one_out: Subtract targets from a given model.
    targets: Instance ids to analyze; defaults to every instance.
    model_out: Where to save the model fitted on the whole corpus.

  Returns:
    The analysis summary.

  Raises:
    LeaveOneOutError: if a target is part of `model` and `leave_one_out` is
      not set.
    ValueError: for unknown targets.
  """
  corpus_ = read_corpus(scan_dir)
  by_id = dict(corpus_)
  indexes = read_path_indexes(scan_dir)
  targets = sorted(by_id) if targets is None else sorted(targets)
  unknown = [t for t in targets if t not in by_id]
  if unknown:
    raise ValueError("Unknown target instances {}".format(unknown))

  path_counts = analysis.PathCounts(indexes.values())
  fit_kwargs = dict(entropy_threshold=config.entropy_threshold,
                    support_min=config.support_min,
                    confidence_min=config.confidence_min)
  own_model = model is None
  if own_model:
    if corpus_:
      model = analysis.AnalysisModel.fit(corpus_, path_counts, **fit_kwargs)
    else:
      model = analysis.AnalysisModel.empty()
  if model_out is not None:
    analysis.save_model(model, model_out)

  summary = {"format_version": util.FORMAT_VERSION, "instances": []}
  for iid in targets:
    records = by_id[iid]
    index = indexes.get(iid)
    histograms, types, rules = model.histograms, model.types, model.rules
    if iid in histograms.instance_ids and (own_model or leave_one_out):
      histograms = histograms.without_instance(iid, records)
      path_exists = (path_counts.excluding(index) if index is not None
                     else path_counts.exists)
      types = analysis.infer_types(histograms, config.entropy_threshold,
                                   path_exists)
      rules = analysis.infer_rules(_without(corpus_, iid), types,
                                   config.support_min, config.confidence_min)
    ranking = analysis.peerpressure_rank(records, histograms, iid)
    violations = analysis.detect_violations(records, types, rules, index)
    report = analysis.build_report(iid, ranking, violations, config.top_n)
    util.atomic_write(os.path.join(out_dir, "reports", iid + ".json"),
                      json.dumps(report, indent=2, sort_keys=True) + "\n")
    summary["instances"].append({"instance_id": iid,
                                 "records": len(records),
                                 "violations": len(violations)})
    logger.info("%s: %d records, %d violations", iid, len(records),
                len(violations))
  util.atomic_write(os.path.join(out_dir, "analysis.json"),
                    json.dumps(summary, indent=2, sort_keys=True) + "\n")
  return summary


def labeling_inputs(manifest, corpus_dir):
  # type: (Dict[str, Any], str) -> Tuple[Dict[str, corpus.InstanceSnapshot], Dict[str, List[Tuple[str, str, bytes]]], Dict[Tuple[str, str], str]]
  """
  Snapshots, known configuration files and true labels of a generated
  corpus, in the shape `evaluation.cross_validate_labeling` takes them.
  """
  snapshots = {
    iid: corpus.ingest_directory(generate.instance_root(corpus_dir, iid),
                                 instance_id=iid)
    for iid in sorted(manifest["instances"])}
  training = {}
  truth = {}
  for iid, application, path, host_path in generate.planted_files(
      manifest, corpus_dir):
    truth[(iid, path)] = application
    with open(host_path, "rb") as f:
      training.setdefault(iid, []).append((application, path, f.read()))
  return snapshots, training, truth


def read_reports(analysis_dir):
  # type: (str) -> Dict[str, Dict[str, Any]]
  """Per-instance report documents of an analysis, by instance id."""
  out = {}
  for path in sorted(glob.glob(os.path.join(analysis_dir, "reports",
                                            "*.json"))):
    with open(path, "r", encoding="utf-8") as f:
      report = json.load(f)
    if report.get("format_version") != util.FORMAT_VERSION:
      raise util.FormatVersionError(
        "Report '{}' has format_version {}; expected {}".format(
          path, report.get("format_version"), util.FORMAT_VERSION))
    out[report["instance_id"]] = report
  return out


def _matches(row, change):
  return (row["application"] == change["application"]
          and row["key"] == change["key"] and row["value"] == change["value"])


def report_statistics(reports, manifest):
  # type: (Dict[str, Dict[str, Any]], Dict[str, Any]) -> Dict[str, Any]
  """
  Score reports against a generation manifest.

  For every instance with an injected outlier, the rank of the injected
  record among the reported suspects (None when it is not listed); for
  every instance with a planted violation, whether a violation names the
  planted record.
  """
  ranks = {}
  detected = {}
  for iid, entry in sorted(iteritems(manifest["instances"])):
    report = reports.get(iid)
    if report is None:
      continue
    injection = entry.get("injection")
    if injection is not None:
      ranks[iid] = next((row["rank"] for row in report["suspects"]
                         if _matches(row, injection)), None)
    violation = entry.get("violation")
    if violation is not None:
      detected[iid] = any(_matches(row, violation)
                          for row in report["violations"])
  found = [r for r in ranks.values() if r is not None]
  return {
    "injected": len(ranks),
    "ranked_first": sum(1 for r in found if r == 1),
    "ranked_listed": len(found),
    "ranks": ranks,
    "planted_violations": len(detected),
    "violations_detected": sum(1 for d in detected.values() if d),
    "violations_by_instance": detected,
    "clean_instances_with_violations": sorted(
      iid for iid, report in iteritems(reports)
      if iid in manifest["instances"]
      and "violation" not in manifest["instances"][iid]
      and "injection" not in manifest["instances"][iid]
      and report["violations"]),
  }
