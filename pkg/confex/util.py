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
"""Utility functions for confex
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

from fractions import Fraction
import gzip
import json
import os
import tempfile
from typing import Any, Dict, Iterable, List, Tuple

from six import string_types


__all__ = [
  "FORMAT_VERSION",
  "FormatVersionError",
  "ListView",
  "as_fraction",
  "decode_text",
  "escape_key_component",
  "join_key",
  "split_key",
  "atomic_write",
  "write_jsonl",
  "read_jsonl",
]

# Version stamped into every artifact this package writes (vocabularies,
# snapshots, record files, models, reports).
FORMAT_VERSION = 1


class FormatVersionError(ValueError):
  """Raised when an artifact was written with an unsupported format_version."""


class ListView(object):
  """Immutable list wrapper.

  Handed out wherever a caller may read but must not reorder or extend a list
  owned by another object (node children, access logs).
  """

  def __init__(self, list_):
    if not isinstance(list_, list):
      raise TypeError("Expected a list, got: {}.".format(type(list_)))
    self._list = list_

  def __iter__(self):
    return iter(self._list)

  def __len__(self):
    return len(self._list)

  def __bool__(self):
    return bool(self._list)

  __nonzero__ = __bool__

  def __getitem__(self, i):
    return self._list[i]

  def __eq__(self, other):
    if isinstance(other, ListView):
      other = other._list
    return list(self._list) == list(other)

  def __ne__(self, other):
    return not self == other

  def __add__(self, other):
    if not isinstance(other, list):
      other = list(other)
    return list(self) + other

  def __str__(self):
    return "ListView[{}]".format(self._list)

  __repr__ = __str__


def as_fraction(x):
  # type: (Any) -> Fraction
  """Convert a threshold or ratio to an exact `Fraction`.

  Floats go through their shortest decimal repr so that `0.9` becomes exactly
  9/10 and boundary comparisons against exact ratios behave as written.
  """
  if isinstance(x, Fraction):
    return x
  if isinstance(x, float):
    return Fraction(repr(x))
  if isinstance(x, string_types):
    return Fraction(x)
  return Fraction(x)


def decode_text(data):
  # type: (Any) -> str
  """Decode file content with the 8-bit fallback used by every parser.

  UTF-8 is tried first; anything that is not valid UTF-8 is read as Latin-1,
  which maps every byte to a code point and therefore never fails.
  """
  if isinstance(data, string_types):
    return data
  if not isinstance(data, (bytes, bytearray)):
    raise TypeError("Expected text or bytes, got {}".format(type(data)))
  try:
    return bytes(data).decode("utf-8")
  except UnicodeDecodeError:
    return bytes(data).decode("latin-1", "replace")


def escape_key_component(component):
  # type: (str) -> str
  """Escape a single key component so that `/` can join hierarchy levels."""
  return component.replace("%", "%25").replace("/", "%2F")


def _unescape_key_component(component):
  # type: (str) -> str
  return component.replace("%2F", "/").replace("%25", "%")


def join_key(components):
  # type: (Iterable[str]) -> str
  """Join raw key components into one slash-separated hierarchical key."""
  return "/".join(escape_key_component(c) for c in components)


def split_key(key):
  # type: (str) -> List[str]
  """Inverse of `join_key`."""
  if not key:
    return []
  return [_unescape_key_component(c) for c in key.split("/")]


def atomic_write(path, data, mode="w"):
  # type: (str, Any, str) -> None
  """Write `data` to `path` via a temp file in the same directory + rename.

  Readers either see the previous file or the complete new one.
  """
  directory = os.path.dirname(os.path.abspath(path))
  if not os.path.isdir(directory):
    os.makedirs(directory)
  fd, tmp_path = tempfile.mkstemp(prefix=".tmp-", dir=directory)
  try:
    with os.fdopen(fd, mode) as f:
      f.write(data)
    os.replace(tmp_path, path)
  except BaseException:
    if os.path.exists(tmp_path):
      os.remove(tmp_path)
    raise


def _open(path, mode):
  if path.endswith(".gz"):
    return gzip.open(path, mode + "t", encoding="utf-8")
  return open(path, mode, encoding="utf-8")


def write_jsonl(path, header, rows):
  # type: (str, Dict[str, Any], Iterable[Dict[str, Any]]) -> None
  """Atomically write a header object followed by one JSON object per line.

  The header always carries `format_version`.
  """
  header = dict(header)
  header.setdefault("format_version", FORMAT_VERSION)
  lines = [json.dumps(header, sort_keys=True)]
  lines.extend(json.dumps(r, sort_keys=True) for r in rows)
  text = "\n".join(lines) + "\n"
  if path.endswith(".gz"):
    atomic_write(path, gzip.compress(text.encode("utf-8"), mtime=0), "wb")
  else:
    atomic_write(path, text)


def read_jsonl(path):
  # type: (str) -> Tuple[Dict[str, Any], List[Dict[str, Any]]]
  """Read a file written by `write_jsonl`.

  Returns:
    `(header, rows)` where rows is a list of dicts.
  Raises:
    FormatVersionError: if the header's format_version is not supported.
    ValueError: if the file is empty or a line is not valid JSON.
  """
  with _open(path, "r") as f:
    lines = [l for l in f.read().splitlines() if l.strip()]
  if not lines:
    raise ValueError("File '{}' has no header line".format(path))
  rows = []
  for i, line in enumerate(lines):
    try:
      rows.append(json.loads(line))
    except ValueError as e:
      raise ValueError("{}:{}: invalid JSON ({})".format(path, i + 1, e))
  header = rows[0]
  version = header.get("format_version")
  if version != FORMAT_VERSION:
    raise FormatVersionError(
      "File '{}' has format_version {}; expected {}".format(
        path, version, FORMAT_VERSION))
  return header, rows[1:]
