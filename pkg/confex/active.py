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
"""Narrow a snapshot down to the files running applications actually read."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
import datetime
import logging
import re
from typing import Optional

from six import integer_types, string_types

from confex import corpus

__all__ = [
  "DEFAULT_WINDOW_SECONDS",
  "ActiveMethod",
  "ActiveDiscoveryError",
  "ActiveFileReport",
  "active_by_timestamps",
  "active_by_events",
  "active_none",
  "discover_active",
  "parse_cutoff",
]

logger = logging.getLogger(__name__)

DEFAULT_WINDOW_SECONDS = 10


class ActiveMethod(object):
  """
  Enum-like class for the ways of selecting active files.
  """
  TIMESTAMPS = "timestamps"
  ACCESS_EVENTS = "access_events"
  NONE = "none"

  # Spellings accepted on the command line.
  CLI_NAMES = {"timestamps": TIMESTAMPS, "events": ACCESS_EVENTS,
               "none": NONE}


class ActiveDiscoveryError(ValueError):
  """Raised when the requested method cannot run on a snapshot."""


ActiveFileReport = collections.namedtuple(
  "ActiveFileReport", ["active_paths", "method", "cutoff_time"])


def active_by_timestamps(snapshot, cutoff=None):
  # type: (corpus.InstanceSnapshot, Optional[int]) -> ActiveFileReport
  """
  Files whose access time is at or after `cutoff`.

  Args:
    snapshot: Snapshot whose entries carry atimes.
    cutoff: Epoch seconds; defaults to the snapshot's reference time (the
      last restart of the instance).

  Returns:
    An `ActiveFileReport` with method `timestamps`. Entries without an atime
    are inactive.
  """
  if cutoff is None:
    cutoff = snapshot.reference_time
  active = set()
  missing = 0
  for e in snapshot.entries:
    if e.atime is None:
      missing += 1
    elif e.atime >= cutoff:
      active.add(e.path)
  if missing:
    logger.warning("%d entries of %s have no atime and are treated as "
                   "inactive", missing, snapshot.instance_id)
  return ActiveFileReport(frozenset(active), ActiveMethod.TIMESTAMPS,
                          int(cutoff))


def active_by_events(snapshot, window_seconds=DEFAULT_WINDOW_SECONDS):
  # type: (corpus.InstanceSnapshot, int) -> ActiveFileReport
  """
  Paths read within `window_seconds` of the first logged event.

  Raises:
    ValueError: if `window_seconds` is not a positive integer.
    ActiveDiscoveryError: if the snapshot has no access log.
  """
  if (not isinstance(window_seconds, integer_types)
      or isinstance(window_seconds, bool) or window_seconds <= 0):
    raise ValueError("window_seconds must be a positive integer, got "
                     "{!r}".format(window_seconds))
  log = snapshot.access_log
  if log is None:
    raise ActiveDiscoveryError(
      "Snapshot {} has no access log; use the 'timestamps' method or "
      "'none'".format(snapshot.instance_id))
  if not log:
    return ActiveFileReport(frozenset(), ActiveMethod.ACCESS_EVENTS, None)
  window_end = log[0].timestamp + window_seconds
  active = frozenset(ev.path for ev in log
                     if ev.is_read and ev.timestamp <= window_end)
  return ActiveFileReport(active, ActiveMethod.ACCESS_EVENTS, None)


def active_none(snapshot):
  # type: (corpus.InstanceSnapshot) -> ActiveFileReport
  """Every entry of the snapshot (offline image mode)."""
  return ActiveFileReport(snapshot.paths(), ActiveMethod.NONE, None)


def discover_active(snapshot, method, cutoff=None,
                    window_seconds=DEFAULT_WINDOW_SECONDS):
  """Dispatch to one of the three selection methods.

  `method` may use either the `ActiveMethod` values or their command-line
  spellings (`events` for `access_events`).
  """
  method = ActiveMethod.CLI_NAMES.get(method, method)
  if method == ActiveMethod.TIMESTAMPS:
    return active_by_timestamps(snapshot, cutoff)
  elif method == ActiveMethod.ACCESS_EVENTS:
    return active_by_events(snapshot, window_seconds)
  elif method == ActiveMethod.NONE:
    return active_none(snapshot)
  raise ValueError("Unknown active-file method '{}'".format(method))


_EPOCH_RE = re.compile(r"^-?[0-9]+$")


def parse_cutoff(text):
  # type: (str) -> int
  """Parse `--cutoff`: epoch seconds or an ISO 8601 timestamp (UTC if naive)."""
  if isinstance(text, integer_types):
    return int(text)
  if not isinstance(text, string_types):
    raise TypeError("Expected a string, got {}".format(type(text)))
  text = text.strip()
  if _EPOCH_RE.match(text):
    return int(text)
  iso = text[:-1] + "+00:00" if text.endswith(("Z", "z")) else text
  try:
    dt = datetime.datetime.fromisoformat(iso)
  except ValueError:
    raise ValueError("Cutoff '{}' is neither epoch seconds nor ISO "
                     "8601".format(text))
  if dt.tzinfo is None:
    dt = dt.replace(tzinfo=datetime.timezone.utc)
  return int(dt.timestamp())
