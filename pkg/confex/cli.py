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
cli.py

Command-line front-end: `confex train|scan|analyze|generate|report`.

Exit codes: 0 success, 1 internal error, 2 usage error, 3 some instances
failed (listed in the scan summary).
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import argparse
import glob
import logging
import os
import sys
from typing import List, Optional

from confex import analysis, evaluation, generate, pipeline

__all__ = [
  "EXIT_OK",
  "EXIT_INTERNAL",
  "EXIT_USAGE",
  "EXIT_PARTIAL",
  "UsageError",
  "build_parser",
  "cmd_train",
  "cmd_scan",
  "cmd_analyze",
  "cmd_generate",
  "cmd_report",
  "main",
]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_PARTIAL = 3


class UsageError(ValueError):
  """Bad arguments or inputs; reported with exit code 2."""


def _config(args, **overrides):
  config = (pipeline.PipelineConfig.from_file(args.config) if args.config
            else pipeline.PipelineConfig())
  return config.replace(**overrides)


def cmd_train(args):
  # type: (argparse.Namespace) -> int
  config = _config(args, vocab_dir=args.vocab_dir)
  by_app = {}
  if args.manifest:
    manifest = generate.load_manifest(args.manifest)
    corpus_dir = (args.manifest if os.path.isdir(args.manifest)
                  else os.path.dirname(args.manifest))
    wanted = set(args.instances or manifest["instances"])
    for iid, application, path, host_path in generate.planted_files(
        manifest, corpus_dir):
      if iid in wanted and (args.app is None or application == args.app):
        by_app.setdefault(application, []).append(
          ("{}:{}".format(iid, path), host_path))
  else:
    if not args.app or not args.files:
      raise UsageError("train needs --app and --files, or --manifest")
    paths = sorted(set(p for pattern in args.files
                       for p in glob.glob(pattern, recursive=True)
                       if os.path.isfile(p)))
    if paths:
      by_app[args.app] = [(p, p) for p in paths]
  if not by_app:
    raise UsageError("No training files matched")
  for application in sorted(by_app):
    vocab, added = pipeline.train(application, by_app[application],
                                  config.vocab_dir, args.format)
    print("{}: {} files added, {} in vocabulary".format(
      application, added, len(vocab.file_sets)))
  return EXIT_OK


def cmd_scan(args):
  # type: (argparse.Namespace) -> int
  config = _config(
    args, vocab_dir=args.vocab_dir, rule_dir=args.rule_dir,
    active_method=args.active_method, cutoff=args.cutoff,
    window_seconds=args.window, threshold=args.threshold,
    size_cap=args.size_cap, jobs=args.jobs,
    syntax_check=False if args.no_syntax_check else None)
  sources = pipeline.find_instances(args.paths)
  if args.access_log:
    if len(sources) != 1:
      raise UsageError("--access-log needs exactly one instance")
    sources[0].access_log = args.access_log
  summary = pipeline.run_scan(sources, args.out, config)
  totals = summary["totals"]
  print("{} instances, {} files, {} labeled, {} parsed, {} records".format(
    totals["instances"], totals["files_scanned"], totals["files_labeled"],
    totals["files_parsed"], totals["records"]))
  if summary["failures"]:
    for f in summary["failures"]:
      print("FAILED {}: {}".format(f["instance_id"], f["error"]),
            file=sys.stderr)
    return EXIT_PARTIAL
  return EXIT_OK


def cmd_analyze(args):
  # type: (argparse.Namespace) -> int
  config = _config(
    args, entropy_threshold=args.entropy_threshold,
    support_min=args.support_min, confidence_min=args.confidence_min,
    top_n=args.top_n)
  model = None
  if args.empty_model:
    model = analysis.AnalysisModel.empty()
  elif args.model:
    model = analysis.load_model(args.model)
  summary = pipeline.run_analyze(
    args.scan_dir, args.out or args.scan_dir, config, model,
    args.leave_one_out, args.targets, args.save_model)
  flagged = sum(1 for i in summary["instances"] if i["violations"])
  print("{} instances analyzed, {} with violations".format(
    len(summary["instances"]), flagged))
  return EXIT_OK


def cmd_generate(args):
  # type: (argparse.Namespace) -> int
  manifest = generate.generate_corpus(
    args.out, count=args.count, seed=args.seed, nonstandard=args.nonstandard,
    decoys=args.decoys, inject=args.inject,
    plant_violations=args.plant_violations, extra_files=args.extra_files)
  print("{} instances written to {}".format(len(manifest["instances"]),
                                            args.out))
  return EXIT_OK


def _print_sweep(args):
  if not args.manifest:
    raise UsageError("--sweep needs --manifest")
  corpus_dir = (args.manifest if os.path.isdir(args.manifest)
                else os.path.dirname(args.manifest))
  snapshots, training, truth = pipeline.labeling_inputs(
    generate.load_manifest(args.manifest), corpus_dir)
  thresholds = args.thresholds or evaluation.DEFAULT_SWEEP_THRESHOLDS
  print("threshold  precision  recall  f1")
  for threshold, score in evaluation.sweep_thresholds(
      snapshots, training, truth, thresholds, folds=args.folds):
    print("{:9.2f}  {:9.4f}  {:6.4f}  {:6.4f}".format(
      float(threshold), float(score.precision), float(score.recall),
      float(score.f1)))


def cmd_report(args):
  # type: (argparse.Namespace) -> int
  if args.sweep:
    _print_sweep(args)
  if not args.reports:
    if not args.sweep:
      raise UsageError("report needs --reports or --sweep")
    return EXIT_OK
  reports = pipeline.read_reports(args.reports)
  for iid in sorted(reports):
    report = reports[iid]
    print("{} ({} records, {} violations)".format(
      iid, report["record_count"], len(report["violations"])))
    for row in report["suspects"][:args.top]:
      print("  {:>3} {:.4f} {}:{} = {!r} ({}:{})".format(
        row["rank"], row["score"], row["application"], row["key"],
        row["value"], row["file_path"], row["entry_ordinal"]))
    for v in report["violations"]:
      print("  ! {} {}: {}".format(v["kind"], v["name"], v["explanation"]))
  if args.manifest:
    stats = pipeline.report_statistics(reports,
                                       generate.load_manifest(args.manifest))
    if stats["injected"]:
      print("injected: {}  ranked #1: {} ({:.1%})  listed: {} ({:.1%})".format(
        stats["injected"], stats["ranked_first"],
        stats["ranked_first"] / stats["injected"], stats["ranked_listed"],
        stats["ranked_listed"] / stats["injected"]))
    if stats["planted_violations"]:
      print("planted violations: {}  detected: {}".format(
        stats["planted_violations"], stats["violations_detected"]))
    print("clean instances with violations: {}".format(
      len(stats["clean_instances_with_violations"])))
  return EXIT_OK


def build_parser():
  # type: () -> argparse.ArgumentParser
  parser = argparse.ArgumentParser(
    prog="confex",
    description="Discover, extract and analyze configuration files of "
                "container instances.")
  parser.add_argument("-v", "--verbose", action="store_true",
                      help="debug logging")
  parser.add_argument("-q", "--quiet", action="store_true",
                      help="warnings and errors only")
  parser.add_argument("--config", help="YAML file with pipeline settings")
  sub = parser.add_subparsers(dest="command")
  sub.required = True

  p = sub.add_parser("train", help="build or extend vocabularies")
  p.add_argument("--app", help="application label")
  p.add_argument("--files", action="append",
                 help="glob of known configuration files (repeatable)")
  p.add_argument("--format", help="parser used by the syntax gate")
  p.add_argument("--manifest",
                 help="generated corpus (or its manifest.json) to train from")
  p.add_argument("--instances", nargs="+",
                 help="with --manifest, train only on these instances")
  p.add_argument("--vocab-dir")
  p.set_defaults(func=cmd_train)

  p = sub.add_parser("scan", help="extract records from instances")
  p.add_argument("paths", nargs="*", default=[],
                 help="instance roots, instance directories or corpora")
  p.add_argument("--out", required=True)
  p.add_argument("--vocab-dir")
  p.add_argument("--rule-dir")
  p.add_argument("--active-method", choices=("timestamps", "events", "none"))
  p.add_argument("--cutoff", help="epoch seconds or ISO 8601 timestamp")
  p.add_argument("--window", type=int, help="access-event window, seconds")
  p.add_argument("--threshold", type=float)
  p.add_argument("--size-cap", type=int)
  p.add_argument("--no-syntax-check", action="store_true")
  p.add_argument("--access-log")
  p.add_argument("--jobs", type=int)
  p.set_defaults(func=cmd_scan)

  p = sub.add_parser("analyze", help="rank suspects and report violations")
  p.add_argument("scan_dir")
  p.add_argument("--out", help="defaults to the scan directory")
  p.add_argument("--model", help="model file from --save-model")
  p.add_argument("--empty-model", action="store_true")
  p.add_argument("--save-model")
  p.add_argument("--leave-one-out", action="store_true",
                 help="subtract each target from a given model")
  p.add_argument("--targets", nargs="+")
  p.add_argument("--top-n", type=int)
  p.add_argument("--entropy-threshold", type=float)
  p.add_argument("--support-min", type=float)
  p.add_argument("--confidence-min", type=float)
  p.set_defaults(func=cmd_analyze)

  p = sub.add_parser("generate", help="write a synthetic corpus")
  p.add_argument("out")
  p.add_argument("--count", type=int, default=200)
  p.add_argument("--seed", type=int, default=1)
  p.add_argument("--nonstandard", type=float, default=0.5)
  p.add_argument("--decoys", type=int, default=25)
  p.add_argument("--inject", type=int, default=0)
  p.add_argument("--plant-violations", type=int, default=0)
  p.add_argument("--extra-files", type=int, default=0)
  p.set_defaults(func=cmd_generate)

  p = sub.add_parser("report", help="print analysis reports")
  p.add_argument("--reports", help="analysis output directory")
  p.add_argument("--manifest", help="generation manifest for injection stats")
  p.add_argument("--top", type=int, default=analysis.DEFAULT_TOP_N)
  p.add_argument("--sweep", action="store_true",
                 help="cross-validated discovery scores per similarity "
                      "threshold of the --manifest corpus")
  p.add_argument("--thresholds", type=float, nargs="+")
  p.add_argument("--folds", type=int, default=5)
  p.set_defaults(func=cmd_report)
  return parser


def main(argv=None):
  # type: (Optional[List[str]]) -> int
  args = build_parser().parse_args(argv)
  level = logging.INFO
  if args.verbose:
    level = logging.DEBUG
  elif args.quiet:
    level = logging.WARNING
  logging.basicConfig(level=level,
                      format="%(asctime)s %(levelname)s %(name)s: %(message)s")
  try:
    return args.func(args)
  except (ValueError, analysis.LeaveOneOutError) as e:
    logger.error("%s", e)
    return EXIT_USAGE
  except Exception:  # pylint: disable=broad-except
    logger.exception("confex %s failed", args.command)
    return EXIT_INTERNAL


if __name__ == "__main__":
  sys.exit(main())
