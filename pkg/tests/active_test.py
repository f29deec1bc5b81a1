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
"""Tests for confex.active."""
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import random
import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

import confex

CUTOFF = 1000

_PATHS = st.sampled_from(["/etc/a", "/etc/b", "/etc/c", "/var/d"])


def _snapshot(atimes, log=None):
  entries = [confex.FileEntry(path, 0, atime=atime)
             for path, atime in sorted(atimes.items())]
  return confex.InstanceSnapshot("i", entries, log, reference_time=CUTOFF)


class ActiveTest(unittest.TestCase):

  def test_timestamps(self):
    """Test for confex.active_by_timestamps around the cutoff."""
    snap = _snapshot({"/a": CUTOFF - 1, "/b": CUTOFF - 100})
    report = confex.active_by_timestamps(snap, CUTOFF)
    self.assertEqual(report.active_paths, frozenset())
    self.assertEqual(report.method, confex.ActiveMethod.TIMESTAMPS)
    self.assertEqual(report.cutoff_time, CUTOFF)

    snap = _snapshot({"/a": CUTOFF, "/b": CUTOFF - 1, "/c": None})
    self.assertEqual(confex.active_by_timestamps(snap, CUTOFF).active_paths,
                     frozenset(["/a"]))

  def test_timestamps_default_cutoff(self):
    """Test that the reference time is the default cutoff."""
    snap = _snapshot({"/a": CUTOFF + 5, "/b": CUTOFF - 5})
    report = confex.active_by_timestamps(snap)
    self.assertEqual(report.active_paths, frozenset(["/a"]))
    self.assertEqual(report.cutoff_time, CUTOFF)

  def test_timestamps_large_snapshot(self):
    """Test that exactly the touched files of a large snapshot are active."""
    rng = random.Random(7)
    atimes = {"/data/f{:04d}".format(i): CUTOFF - rng.randint(1, 10000)
              for i in range(1000)}
    touched = rng.sample(sorted(atimes), 7)
    for path in touched:
      atimes[path] = CUTOFF + rng.randint(0, 60)
    report = confex.active_by_timestamps(_snapshot(atimes), CUTOFF)
    self.assertEqual(report.active_paths, frozenset(touched))

  def test_events(self):
    """Test for confex.active_by_events with a ten second window."""
    log = [confex.AccessEvent("/etc/a", "r", 100),
           confex.AccessEvent("/etc/b", "r", 103),
           confex.AccessEvent("/etc/w", "w", 104),
           confex.AccessEvent("/etc/c", "r", 112)]
    snap = _snapshot({}, log)
    report = confex.active_by_events(snap, 10)
    self.assertEqual(report.active_paths, frozenset(["/etc/a", "/etc/b"]))
    self.assertEqual(report.method, confex.ActiveMethod.ACCESS_EVENTS)
    self.assertIsNone(report.cutoff_time)
    # The window end is inclusive.
    self.assertIn("/etc/c", confex.active_by_events(snap, 12).active_paths)

  def test_events_edge_cases(self):
    """Test for confex.active_by_events on write-only and empty logs."""
    writes = _snapshot({}, [confex.AccessEvent("/var/log/x", "w", 1)])
    self.assertEqual(confex.active_by_events(writes).active_paths,
                     frozenset())
    empty = _snapshot({}, [])
    self.assertEqual(confex.active_by_events(empty).active_paths, frozenset())
    with self.assertRaises(confex.ActiveDiscoveryError):
      confex.active_by_events(_snapshot({}))
    for bad in (0, -1, 1.5, True):
      with self.assertRaises(ValueError):
        confex.active_by_events(empty, bad)

  @settings(max_examples=300, deadline=None)
  @given(st.dictionaries(_PATHS, st.one_of(st.none(), st.integers(0, 2000))),
         st.integers(0, 2000), st.integers(0, 2000))
  def test_earlier_cutoff_never_shrinks(self, atimes, c1, c2):
    """Test that an earlier cutoff keeps every file a later one keeps."""
    early, late = sorted((c1, c2))
    snap = _snapshot(atimes)
    self.assertLessEqual(confex.active_by_timestamps(snap, late).active_paths,
                         confex.active_by_timestamps(snap, early).active_paths)

  @settings(max_examples=300, deadline=None)
  @given(st.lists(st.tuples(_PATHS, st.sampled_from(["r", "w", "rw"]),
                            st.integers(0, 100)), max_size=20),
         st.integers(1, 60), st.integers(1, 60))
  def test_wider_window_never_shrinks(self, events, w1, w2):
    """Test that a wider event window keeps every file a narrower one keeps."""
    narrow, wide = sorted((w1, w2))
    log = [confex.AccessEvent(p, flags, ts)
           for p, flags, ts in sorted(events, key=lambda e: e[2])]
    snap = _snapshot({}, log)
    self.assertLessEqual(confex.active_by_events(snap, narrow).active_paths,
                         confex.active_by_events(snap, wide).active_paths)

  def test_discover_active(self):
    """Test for confex.discover_active."""
    snap = _snapshot({"/a": CUTOFF, "/b": 0},
                     [confex.AccessEvent("/b", "r", 1)])
    self.assertEqual(confex.discover_active(snap, "none").active_paths,
                     frozenset(["/a", "/b"]))
    self.assertEqual(confex.discover_active(snap, "events").active_paths,
                     frozenset(["/b"]))
    self.assertEqual(
      confex.discover_active(snap, confex.ActiveMethod.ACCESS_EVENTS).method,
      confex.ActiveMethod.ACCESS_EVENTS)
    self.assertEqual(confex.discover_active(snap, "timestamps").active_paths,
                     frozenset(["/a"]))
    with self.assertRaises(ValueError):
      confex.discover_active(snap, "inotify")

  def test_parse_cutoff(self):
    """Test for confex.parse_cutoff."""
    self.assertEqual(confex.parse_cutoff("1600000000"), 1600000000)
    self.assertEqual(confex.parse_cutoff(42), 42)
    self.assertEqual(confex.parse_cutoff("2020-09-13T12:26:40Z"), 1600000000)
    self.assertEqual(confex.parse_cutoff("2020-09-13T12:26:40"), 1600000000)
    self.assertEqual(confex.parse_cutoff("2020-09-13T14:26:40+02:00"),
                     1600000000)
    with self.assertRaises(ValueError):
      confex.parse_cutoff("yesterday")


if __name__ == "__main__":
  unittest.main()
