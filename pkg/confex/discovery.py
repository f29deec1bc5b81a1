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
discovery.py

Keyword vocabularies and the classifier that labels unlabeled text files as
configuration files of a known application.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
import fnmatch
from fractions import Fraction
import glob
import json
import logging
import os
import re
from typing import Any, Iterable, List, Optional, Tuple

from six import string_types

from confex import corpus, parsers, util

__all__ = [
  "DEFAULT_THRESHOLD",
  "DEFAULT_SIZE_CAP",
  "DEFAULT_EXCLUDED_EXTENSIONS",
  "DEFAULT_PATHS",
  "KeywordSet",
  "Vocabulary",
  "MatchResult",
  "LabelResult",
  "extract_keywords",
  "train_vocabulary",
  "jaccard",
  "upper_bound",
  "best_match",
  "label_file",
  "default_paths_baseline",
  "syntax_only_baseline",
  "save_vocabulary",
  "load_vocabulary",
  "load_vocabularies",
]

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = Fraction(9, 10)
DEFAULT_SIZE_CAP = corpus.DEFAULT_SIZE_CAP
DEFAULT_EXCLUDED_EXTENSIONS = corpus.DEFAULT_EXCLUDED_EXTENSIONS

# Where packaged software puts its configuration by default.
DEFAULT_PATHS = collections.OrderedDict([
  ("httpd", (
    "/etc/httpd/conf/httpd.conf",
    "/etc/httpd/conf.d/*.conf",
    "/etc/apache2/apache2.conf",
    "/etc/apache2/conf-enabled/*.conf",
    "/etc/apache2/sites-enabled/*",
    "/usr/local/apache2/conf/httpd.conf",
    "/usr/local/apache2/conf/extra/*.conf",
  )),
  ("mysql", (
    "/etc/my.cnf",
    "/etc/mysql/my.cnf",
    "/etc/mysql/conf.d/*.cnf",
    "/etc/mysql/mysql.conf.d/*.cnf",
    "/etc/my.cnf.d/*.cnf",
  )),
  ("nginx", (
    "/etc/nginx/nginx.conf",
    "/etc/nginx/conf.d/*.conf",
    "/etc/nginx/sites-enabled/*",
    "/usr/local/nginx/conf/nginx.conf",
  )),
])

_DELIMITERS_RE = re.compile(r"[\s=:<>\[\],]+")
_COMMENT_PREFIXES = ("//", "#", "%")


KeywordSet = collections.namedtuple("KeywordSet", ["keywords", "source"])


def extract_keywords(content, source=None):
  # type: (Any, Optional[str]) -> KeywordSet
  """
  Keywords of a file: the first token of every non-comment line.

  Lines whose first non-blank characters are `//`, `#` or `%` are comments.
  Tokens are separated by whitespace and `= : < > [ ] ,`.

  Args:
    content: File content as text or bytes. Bytes holding a NUL are treated
      as undecodable and yield an empty set.
    source: Identifier of the file, kept on the result.

  Returns:
    A `KeywordSet`.
  """
  if isinstance(content, (bytes, bytearray)):
    if b"\x00" in content:
      logger.warning("Binary content in %s; no keywords extracted",
                     source or "<input>")
      return KeywordSet(frozenset(), source)
    content = util.decode_text(content)
  keywords = set()
  for line in content.splitlines():
    line = line.lstrip()
    if not line or line.startswith(_COMMENT_PREFIXES):
      continue
    for token in _DELIMITERS_RE.split(line):
      if token:
        keywords.add(token)
        break
  return KeywordSet(frozenset(keywords), source)


class Vocabulary(object):
  """
  Keyword sets of the known configuration files of one application.

  `union_set` is derived from `file_sets` and never stored separately.
  `file_format` names the parser used by the syntax gate.
  """

  def __init__(self, application, file_sets=(), file_format=None):
    if not application or not isinstance(application, string_types):
      raise ValueError("Vocabulary needs an application name")
    self._application = application
    self._file_format = (file_format if file_format is not None
                         else parsers.APPLICATION_FORMATS.get(application))
    self._file_sets = []
    union = set()
    for ks in file_sets:
      if not isinstance(ks, KeywordSet):
        raise TypeError("Expected KeywordSet, got {}".format(type(ks)))
      self._file_sets.append(ks)
      union.update(ks.keywords)
    self._union_set = frozenset(union)

  @property
  def application(self):
    # type: () -> str
    return self._application

  @property
  def file_format(self):
    return self._file_format

  @property
  def file_sets(self):
    return util.ListView(self._file_sets)

  @property
  def union_set(self):
    return self._union_set

  def sources(self):
    return frozenset(ks.source for ks in self._file_sets)

  def extend(self, keyword_sets):
    # type: (Iterable[KeywordSet]) -> Vocabulary
    """A new vocabulary with `keyword_sets` appended."""
    return Vocabulary(self._application,
                      list(self._file_sets) + list(keyword_sets),
                      self._file_format)

  def __eq__(self, other):
    if not isinstance(other, Vocabulary):
      return False
    return (self._application == other._application
            and self._file_format == other._file_format
            and self._file_sets == other._file_sets)

  def __ne__(self, other):
    return not self == other

  __hash__ = None

  def __repr__(self):
    return "Vocabulary({!r}, {} files, {} keywords)".format(
      self._application, len(self._file_sets), len(self._union_set))


def train_vocabulary(application, files, vocabulary=None, file_format=None):
  # type: (str, Iterable[Tuple[str, Any]], Optional[Vocabulary], Optional[str]) -> Vocabulary
  """
  Build (or extend) the vocabulary of `application`.

  Args:
    application: Application label.
    files: `(path, content)` pairs of known configuration files.
    vocabulary: Existing vocabulary to extend; its keyword sets are kept as
      they are.
    file_format: Parser for the syntax gate; defaults to the registry entry
      of `application`.

  Returns:
    A new `Vocabulary`.

  Raises:
    ValueError: if `files` is empty or `vocabulary` belongs to another
      application.
  """
  files = list(files)
  if not files:
    raise ValueError("No training files for '{}'".format(application))
  new_sets = [extract_keywords(content, path) for path, content in files]
  if vocabulary is None:
    return Vocabulary(application, new_sets, file_format)
  if vocabulary.application != application:
    raise ValueError("Cannot extend the '{}' vocabulary with '{}' "
                     "files".format(vocabulary.application, application))
  return vocabulary.extend(new_sets)


def _keywords(s):
  if isinstance(s, KeywordSet):
    return s.keywords
  return frozenset(s)


def jaccard(a, b):
  # type: (Iterable[str], Iterable[str]) -> Fraction
  """|a ∩ b| / |a ∪ b|, with the similarity of two empty sets defined as 0."""
  a = _keywords(a)
  b = _keywords(b)
  union = len(a | b)
  if union == 0:
    return Fraction(0)
  return Fraction(len(a & b), union)


def upper_bound(test_set, vocab):
  # type: (Iterable[str], Vocabulary) -> Fraction
  """Upper bound on the Jaccard index of `test_set` against any file set of
  `vocab`: |test ∩ union| / |test|."""
  test_set = _keywords(test_set)
  if not test_set:
    return Fraction(0)
  return Fraction(len(test_set & vocab.union_set), len(test_set))


MatchResult = collections.namedtuple(
  "MatchResult", ["similarity", "matched", "comparisons"])


def _check_threshold(threshold):
  threshold = util.as_fraction(threshold)
  if not 0 <= threshold <= 1:
    raise ValueError("Threshold must be in [0, 1], got {}".format(threshold))
  return threshold


def best_match(test_set, vocab, threshold=DEFAULT_THRESHOLD, prune=True):
  # type: (Iterable[str], Vocabulary, Any, bool) -> MatchResult
  """
  Best Jaccard similarity of `test_set` against the files of `vocab`.

  With `prune`, a test set whose upper bound is already below `threshold` is
  rejected without comparing it to any file set, and the bound is returned
  as the similarity.

  Returns:
    `MatchResult(similarity, matched, comparisons)`; `comparisons` counts the
    file sets compared.
  """
  threshold = _check_threshold(threshold)
  test_set = _keywords(test_set)
  if not test_set:
    return MatchResult(Fraction(0), False, 0)
  if prune:
    bound = upper_bound(test_set, vocab)
    if bound < threshold:
      return MatchResult(bound, False, 0)
  best = Fraction(0)
  for ks in vocab.file_sets:
    best = max(best, jaccard(test_set, ks.keywords))
  return MatchResult(best, best >= threshold, len(vocab.file_sets))


_LabelResultBase = collections.namedtuple(
  "LabelResult", ["path", "application", "best_similarity", "syntax_valid"])


class LabelResult(_LabelResultBase):
  """Outcome of `label_file`. `application` is None for unlabeled files."""
  __slots__ = ()

  @property
  def labeled(self):
    return self.application is not None


def _unlabeled(entry, similarity=Fraction(0)):
  return LabelResult(entry.path, None, similarity, False)


def _prefilter(entry, size_cap, excluded_extensions):
  """Reason to skip `entry` without looking at keywords, or None."""
  ext = os.path.splitext(entry.path)[1].lower()
  if ext in excluded_extensions:
    return "excluded extension"
  if entry.size_bytes > size_cap:
    return "over size cap"
  if entry.content is None:
    return "no content"
  if not corpus.is_text(entry.content):
    return "not text"
  return None


def label_file(entry,  # type: corpus.FileEntry
               vocabularies,  # type: Iterable[Vocabulary]
               threshold=DEFAULT_THRESHOLD,
               size_cap=DEFAULT_SIZE_CAP,  # type: int
               excluded_extensions=DEFAULT_EXCLUDED_EXTENSIONS,
               prune=True,  # type: bool
               syntax_check=True  # type: bool
               ):
  # type: (...) -> LabelResult
  """
  Decide whether `entry` is a configuration file of a known application.

  Files with an excluded extension, over `size_cap`, without content or
  not text are unlabeled right away. Otherwise the file's keywords are
  matched against every vocabulary; matching applications are tried by
  decreasing similarity (ties by name) and the first whose parser accepts
  the file labels it.

  Args:
    entry: Snapshot entry to classify.
    vocabularies: Trained vocabularies.
    threshold: Minimum Jaccard similarity for a match.
    size_cap: Largest file size considered, in bytes.
    excluded_extensions: Lower-case extensions (with the dot) never labeled.
    prune: Use the upper-bound shortcut in `best_match`.
    syntax_check: Run the parser gate. When disabled, the best match labels
      the file and `syntax_valid` is reported as True.

  Returns:
    A `LabelResult`.
  """
  threshold = _check_threshold(threshold)
  excluded = frozenset(e.lower() for e in excluded_extensions)
  reason = _prefilter(entry, size_cap, excluded)
  if reason is not None:
    logger.debug("%s: unlabeled (%s)", entry.path, reason)
    return _unlabeled(entry)

  test_set = extract_keywords(entry.content, entry.path).keywords
  candidates = []
  best_seen = Fraction(0)
  for vocab in vocabularies:
    result = best_match(test_set, vocab, threshold, prune)
    best_seen = max(best_seen, result.similarity)
    if result.matched:
      candidates.append((result.similarity, vocab))
  candidates.sort(key=lambda c: (-c[0], c[1].application))

  for similarity, vocab in candidates:
    if not syntax_check:
      return LabelResult(entry.path, vocab.application, similarity, True)
    if parsers.syntax_check(vocab.application, entry.content,
                            vocab.file_format):
      logger.debug("%s: labeled %s (J=%s)", entry.path, vocab.application,
                   similarity)
      return LabelResult(entry.path, vocab.application, similarity, True)
    logger.debug("%s: matches %s but fails its syntax check", entry.path,
                 vocab.application)
  return _unlabeled(entry, best_seen)


def default_paths_baseline(path, default_paths=None):
  # type: (str, Optional[dict]) -> Optional[str]
  """Label a file purely by its location: the application whose default
  configuration paths match `path`, or None."""
  for application, patterns in (default_paths or DEFAULT_PATHS).items():
    for pattern in patterns:
      if fnmatch.fnmatchcase(path, pattern):
        return application
  return None


def syntax_only_baseline(entry,  # type: corpus.FileEntry
                         applications,  # type: Iterable[str]
                         size_cap=DEFAULT_SIZE_CAP,  # type: int
                         excluded_extensions=DEFAULT_EXCLUDED_EXTENSIONS
                         ):
  # type: (...) -> Optional[str]
  """Label a file with the first application (by name) whose parser accepts
  it, with no keyword matching."""
  excluded = frozenset(e.lower() for e in excluded_extensions)
  if _prefilter(entry, size_cap, excluded) is not None:
    return None
  for application in sorted(applications):
    if parsers.syntax_check(application, entry.content):
      return application
  return None


def save_vocabulary(vocab, path):
  # type: (Vocabulary, str) -> None
  doc = {
    "format_version": util.FORMAT_VERSION,
    "application": vocab.application,
    "file_format": vocab.file_format,
    "file_sets": [{"source": ks.source, "keywords": sorted(ks.keywords)}
                  for ks in vocab.file_sets],
  }
  util.atomic_write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_vocabulary(path):
  # type: (str) -> Vocabulary
  """Read a vocabulary file. The union set is always recomputed."""
  with open(path, "r", encoding="utf-8") as f:
    doc = json.load(f)
  if doc.get("format_version") != util.FORMAT_VERSION:
    raise util.FormatVersionError(
      "Vocabulary '{}' has format_version {}; expected {}".format(
        path, doc.get("format_version"), util.FORMAT_VERSION))
  file_sets = [KeywordSet(frozenset(fs["keywords"]), fs.get("source"))
               for fs in doc["file_sets"]]
  return Vocabulary(doc["application"], file_sets, doc.get("file_format"))


def load_vocabularies(vocab_dir):
  # type: (str) -> List[Vocabulary]
  """All `*.json` vocabularies of a directory, sorted by file name."""
  return [load_vocabulary(p)
          for p in sorted(glob.glob(os.path.join(vocab_dir, "*.json")))]
