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
corpus.py

Read-only snapshots of instance filesystems: ingestion from directories, tar
archives and layer stacks, access-event logs, and on-disk persistence.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
import gzip
import hashlib
import logging
import os
import stat
import tarfile
import time
from typing import Callable, Dict, Iterable, List, Optional

import numpy as np

from confex import util

__all__ = [
  "DEFAULT_SIZE_CAP",
  "DEFAULT_EXCLUDED_EXTENSIONS",
  "TEXT_SAMPLE_BYTES",
  "IngestionError",
  "AccessLogError",
  "EntryKind",
  "FileEntry",
  "AccessEvent",
  "InstanceSnapshot",
  "PathIndex",
  "is_text",
  "make_retain_predicate",
  "ingest_directory",
  "ingest_tar",
  "ingest_layers",
  "ingest_access_log",
  "parse_access_log",
  "save_snapshot",
  "load_snapshot",
]

logger = logging.getLogger(__name__)

DEFAULT_SIZE_CAP = 200 * 1024
DEFAULT_EXCLUDED_EXTENSIONS = frozenset([
  ".h", ".c", ".cpp", ".js", ".css", ".md", ".md5sums", ".html", ".svg"])

# Number of leading bytes inspected by the text heuristic.
TEXT_SAMPLE_BYTES = 8192
_MIN_PRINTABLE_RATIO = 0.95

# Tab, LF, FF, CR, printable ASCII and the printable upper half of Latin-1.
_TEXT_BYTES = np.zeros(256, dtype=bool)
_TEXT_BYTES[[9, 10, 12, 13]] = True
_TEXT_BYTES[32:127] = True
_TEXT_BYTES[160:256] = True

_WHITEOUT_PREFIX = ".wh."
_OPAQUE_WHITEOUT = ".wh..wh..opq"


class IngestionError(ValueError):
  """Raised when a snapshot root cannot be read at all."""


class AccessLogError(ValueError):
  """Raised for a malformed access-event log line."""

  def __init__(self, line_number, message):
    super(AccessLogError, self).__init__(
      "Access log line {}: {}".format(line_number, message))
    self.line_number = line_number


class EntryKind(object):
  """
  Enum-like class for the kinds of filesystem entry kept in a snapshot.
  """
  FILE = "file"
  SYMLINK = "symlink"


_FileEntryBase = collections.namedtuple(
  "FileEntry", ["path", "size_bytes", "mtime", "atime", "mode_bits",
                "owner_uid", "owner_gid", "content", "kind", "link_target"])


class FileEntry(_FileEntryBase):
  """Metadata of one file in a snapshot, plus its bytes when retained.

  Symlinks are recorded with `kind=EntryKind.SYMLINK` and their target in
  `link_target`; they are never followed and never carry content. `atime` may
  be None when the source (e.g. a tar member) does not record it.
  """
  __slots__ = ()

  def __new__(cls, path, size_bytes, mtime=0, atime=None, mode_bits=0o644,
              owner_uid=0, owner_gid=0, content=None, kind=EntryKind.FILE,
              link_target=None):
    if not path.startswith("/"):
      raise ValueError("Entry path '{}' is not absolute".format(path))
    if size_bytes < 0:
      raise ValueError("Negative size {} for '{}'".format(size_bytes, path))
    if content is not None:
      content = bytes(content)
      if len(content) != size_bytes:
        raise ValueError(
          "Entry '{}' has size_bytes={} but {} bytes of content".format(
            path, size_bytes, len(content)))
    if kind not in (EntryKind.FILE, EntryKind.SYMLINK):
      raise ValueError("Unknown entry kind '{}'".format(kind))
    return super(FileEntry, cls).__new__(
      cls, path, int(size_bytes), int(mtime),
      None if atime is None else int(atime), int(mode_bits), int(owner_uid),
      int(owner_gid), content, kind, link_target)

  def without_content(self):
    return self._replace(content=None)

  def to_dict(self):
    d = self._asdict()
    del d["content"]
    return d


_AccessEventBase = collections.namedtuple(
  "AccessEvent", ["path", "flags", "timestamp"])


class AccessEvent(_AccessEventBase):
  """One logged open(): `flags` is `r`, `w` or `rw`."""
  __slots__ = ()

  @property
  def is_read(self):
    return "r" in self.flags


class InstanceSnapshot(object):
  """
  Immutable view of one image or container filesystem.
  """

  def __init__(self,
               instance_id,  # type: str
               entries,  # type: Iterable[FileEntry]
               access_log=None,  # type: Optional[List[AccessEvent]]
               reference_time=None,  # type: Optional[int]
               directories=()  # type: Iterable[str]
               ):
    self._instance_id = str(instance_id)
    self._entries = {}  # type: Dict[str, FileEntry]
    for e in entries:
      if not isinstance(e, FileEntry):
        raise TypeError("Expected FileEntry, got {}".format(type(e)))
      if e.path in self._entries:
        raise ValueError("Duplicate entry path '{}' in snapshot {}".format(
          e.path, instance_id))
      self._entries[e.path] = e
    self._access_log = None if access_log is None else list(access_log)
    self._reference_time = int(time.time() if reference_time is None
                               else reference_time)
    self._directories = frozenset(directories) | frozenset(["/"])

  @property
  def instance_id(self):
    # type: () -> str
    return self._instance_id

  @property
  def entries(self):
    """Entries sorted by path."""
    return util.ListView([self._entries[p] for p in sorted(self._entries)])

  @property
  def access_log(self):
    """The access events, or None when no log was ingested."""
    if self._access_log is None:
      return None
    return util.ListView(self._access_log)

  @property
  def reference_time(self):
    # type: () -> int
    return self._reference_time

  @property
  def directories(self):
    return self._directories

  def paths(self):
    return frozenset(self._entries)

  def get(self, path, default=None):
    return self._entries.get(path, default)

  def __getitem__(self, path):
    return self._entries[path]

  def __contains__(self, path):
    return path in self._entries

  def __len__(self):
    return len(self._entries)

  def exists(self, path):
    # type: (str) -> bool
    """True if `path` names a file, symlink or directory of the snapshot."""
    path = _normalize(path)
    return path in self._entries or path in self._directories

  def with_access_log(self, events):
    # type: (Iterable[AccessEvent]) -> InstanceSnapshot
    return InstanceSnapshot(self._instance_id, self._entries.values(),
                            list(events), self._reference_time,
                            self._directories)

  def with_reference_time(self, reference_time):
    # type: (int) -> InstanceSnapshot
    return InstanceSnapshot(self._instance_id, self._entries.values(),
                            self._access_log, reference_time,
                            self._directories)

  def __repr__(self):
    return "InstanceSnapshot({!r}, {} entries)".format(
      self._instance_id, len(self._entries))


def _normalize(path):
  path = os.path.normpath("/" + path.lstrip("/"))
  return "/" + path.lstrip("/")


def is_text(data):
  # type: (bytes) -> bool
  """Heuristic text test over the first `TEXT_SAMPLE_BYTES` bytes.

  Text means no NUL byte and at least 95% of the bytes printable or
  whitespace under an 8-bit encoding. Empty input is text.
  """
  head = np.frombuffer(bytes(data[:TEXT_SAMPLE_BYTES]), dtype=np.uint8)
  if head.size == 0:
    return True
  if not head.all():
    return False
  return bool(_TEXT_BYTES[head].mean() >= _MIN_PRINTABLE_RATIO)


def make_retain_predicate(size_cap=DEFAULT_SIZE_CAP,
                          excluded_extensions=DEFAULT_EXCLUDED_EXTENSIONS):
  """Build the default content-retention predicate.

  The predicate is called as `predicate(path, size_bytes, head)` where `head`
  holds the first `TEXT_SAMPLE_BYTES` bytes of the file.
  """
  if size_cap <= 0:
    raise ValueError("size_cap must be positive, got {}".format(size_cap))
  excluded = frozenset(e.lower() for e in excluded_extensions)

  def _retain(path, size_bytes, head):
    if os.path.splitext(path)[1].lower() in excluded:
      return False
    if size_bytes > size_cap:
      return False
    return is_text(head)

  return _retain


def _default_instance_id(root_path):
  name = os.path.basename(os.path.normpath(os.path.abspath(root_path)))
  return name or "root"


def ingest_directory(root_path,  # type: str
                     retain_predicate=None,  # type: Optional[Callable]
                     instance_id=None,  # type: Optional[str]
                     reference_time=None  # type: Optional[int]
                     ):
  # type: (...) -> InstanceSnapshot
  """
  Build a snapshot mirroring the tree under `root_path`.

  If `root_path` is a tar archive it is ingested with `ingest_tar` instead.

  Args:
    root_path: Directory (or tar archive) standing for the instance's `/`.
    retain_predicate: `predicate(path, size_bytes, head) -> bool` deciding
      which files keep their content. Defaults to
      `make_retain_predicate()`.
    instance_id: Identifier of the snapshot; defaults to the basename of
      `root_path`.
    reference_time: Overrides the snapshot's reference time (defaults to the
      ingestion wall-clock time).

  Returns:
    A new `InstanceSnapshot`.

  Raises:
    IngestionError: if `root_path` cannot be listed.
  """
  if instance_id is None:
    instance_id = _default_instance_id(root_path)
  if os.path.isfile(root_path) and tarfile.is_tarfile(root_path):
    return ingest_tar(root_path, retain_predicate, instance_id,
                      reference_time)
  if not os.path.isdir(root_path):
    raise IngestionError("Snapshot root '{}' is not a directory".format(
      root_path))
  try:
    os.listdir(root_path)
  except OSError as e:
    raise IngestionError("Cannot read snapshot root '{}': {}".format(
      root_path, e))
  if retain_predicate is None:
    retain_predicate = make_retain_predicate()

  entries = []
  directories = set(["/"])

  def _on_error(e):
    logger.warning("Skipping unreadable directory %s: %s", e.filename, e)

  for dirpath, dirnames, filenames in os.walk(root_path, onerror=_on_error):
    dirnames.sort()
    rel_dir = os.path.relpath(dirpath, root_path)
    snap_dir = "/" if rel_dir == "." else "/" + rel_dir.replace(os.sep, "/")
    for name in list(dirnames):
      full = os.path.join(dirpath, name)
      if os.path.islink(full):
        # Links to directories are listed in dirnames; keep them as links.
        dirnames.remove(name)
        filenames.append(name)
      else:
        directories.add(_join(snap_dir, name))
    for name in sorted(filenames):
      entry = _ingest_file(os.path.join(dirpath, name), _join(snap_dir, name),
                           retain_predicate)
      if entry is not None:
        entries.append(entry)
  return InstanceSnapshot(instance_id, entries, None, reference_time,
                          directories)


def _join(directory, name):
  return directory.rstrip("/") + "/" + name


def _ingest_file(full_path, snap_path, retain_predicate):
  try:
    st = os.lstat(full_path)
  except OSError as e:
    logger.warning("Cannot stat %s: %s", full_path, e)
    return None
  common = dict(mtime=int(st.st_mtime), atime=int(st.st_atime),
                mode_bits=stat.S_IMODE(st.st_mode), owner_uid=st.st_uid,
                owner_gid=st.st_gid)
  if stat.S_ISLNK(st.st_mode):
    return FileEntry(snap_path, st.st_size, kind=EntryKind.SYMLINK,
                     link_target=os.readlink(full_path), **common)
  if not stat.S_ISREG(st.st_mode):
    logger.debug("Ignoring special file %s", full_path)
    return None
  content = None
  try:
    with open(full_path, "rb") as f:
      head = f.read(TEXT_SAMPLE_BYTES)
      if retain_predicate(snap_path, st.st_size, head):
        content = head + f.read()
  except (IOError, OSError) as e:
    logger.warning("Cannot read %s, keeping metadata only: %s", full_path, e)
  if content is not None and len(content) != st.st_size:
    logger.warning("%s changed size while being read; keeping metadata only",
                   full_path)
    content = None
  return FileEntry(snap_path, st.st_size, content=content, **common)


def ingest_tar(archive_path,  # type: str
               retain_predicate=None,  # type: Optional[Callable]
               instance_id=None,  # type: Optional[str]
               reference_time=None  # type: Optional[int]
               ):
  # type: (...) -> InstanceSnapshot
  """Build a snapshot from a (possibly compressed) tar archive.

  Later members win over earlier members with the same path. Access times
  come from pax headers when present.
  """
  if instance_id is None:
    instance_id = _default_instance_id(archive_path)
  if retain_predicate is None:
    retain_predicate = make_retain_predicate()
  try:
    tar = tarfile.open(archive_path, "r:*")
  except (tarfile.TarError, IOError, OSError) as e:
    raise IngestionError("Cannot read archive '{}': {}".format(
      archive_path, e))
  entries = {}
  directories = set(["/"])
  with tar:
    for member in tar:
      path = _normalize(member.name)
      if member.isdir():
        directories.add(path)
        continue
      common = dict(mtime=int(member.mtime), atime=_pax_atime(member),
                    mode_bits=stat.S_IMODE(member.mode),
                    owner_uid=member.uid, owner_gid=member.gid)
      if member.issym():
        entries[path] = FileEntry(path, len(member.linkname),
                                  kind=EntryKind.SYMLINK,
                                  link_target=member.linkname, **common)
        continue
      if not (member.isfile() or member.islnk()):
        continue
      size = member.size
      if member.islnk():
        try:
          size = tar.getmember(member.linkname).size
        except KeyError:
          logger.warning("Hard link %s points outside the archive", path)
      content = None
      f = tar.extractfile(member)
      if f is not None:
        # Members the predicate rejects are read no further than the sample.
        head = f.read(TEXT_SAMPLE_BYTES)
        if retain_predicate(path, size, head):
          content = head + f.read()
      entries[path] = FileEntry(path, size, content=content, **common)
  for p in entries:
    parent = os.path.dirname(p)
    while parent not in directories:
      directories.add(parent)
      parent = os.path.dirname(parent)
  return InstanceSnapshot(instance_id, entries.values(), None,
                          reference_time, directories)


def _pax_atime(member):
  atime = member.pax_headers.get("atime")
  if atime is None:
    return None
  return int(float(atime))


def ingest_layers(layer_roots,  # type: List[str]
                  retain_predicate=None,  # type: Optional[Callable]
                  instance_id=None,  # type: Optional[str]
                  reference_time=None  # type: Optional[int]
                  ):
  # type: (...) -> InstanceSnapshot
  """
  Flatten ordered filesystem layers (lowest first) into one snapshot.

  Paths are resolved last-writer-wins. A `.wh.<name>` marker deletes
  `<name>` (and anything below it) from the lower layers; a `.wh..wh..opq`
  marker empties its directory of lower-layer content.
  """
  if not layer_roots:
    raise IngestionError("No layers given")
  if instance_id is None:
    instance_id = _default_instance_id(layer_roots[-1])
  entries = {}  # type: Dict[str, FileEntry]
  directories = set(["/"])

  def _remove_tree(prefix, keep_root):
    for p in [p for p in entries if p == prefix or p.startswith(prefix + "/")]:
      del entries[p]
    for d in [d for d in directories if d.startswith(prefix + "/")]:
      directories.discard(d)
    if not keep_root:
      directories.discard(prefix)

  for layer in layer_roots:
    snap = ingest_directory(layer, retain_predicate, instance_id,
                            reference_time)
    layer_entries = []
    for e in snap.entries:
      parent, name = os.path.split(e.path)
      if name == _OPAQUE_WHITEOUT:
        _remove_tree(parent, keep_root=True)
      elif name.startswith(_WHITEOUT_PREFIX):
        _remove_tree(_join(parent, name[len(_WHITEOUT_PREFIX):]),
                     keep_root=False)
      else:
        layer_entries.append(e)
    for e in layer_entries:
      entries[e.path] = e
      directories.discard(e.path)
    for d in snap.directories:
      entries.pop(d, None)
      directories.add(d)
  return InstanceSnapshot(instance_id, entries.values(), None,
                          reference_time, directories)


def parse_access_log(lines):
  # type: (Iterable[str]) -> List[AccessEvent]
  """
  Parse access-log lines of the form `<epoch>\\t<r|w|rw>\\t<absolute-path>`.

  Blank lines are skipped.

  Raises:
    AccessLogError: naming the first malformed line, or a line whose
      timestamp is lower than its predecessor's.
  """
  events = []
  last = None
  for line_number, line in enumerate(lines, 1):
    line = line.rstrip("\r\n")
    if not line.strip():
      continue
    fields = line.split("\t")
    if len(fields) != 3:
      raise AccessLogError(line_number, "expected 3 tab-separated fields, "
                                        "got {}".format(len(fields)))
    ts, flags, path = fields
    try:
      timestamp = int(ts)
    except ValueError:
      raise AccessLogError(line_number, "bad timestamp {!r}".format(ts))
    if flags not in ("r", "w", "rw"):
      raise AccessLogError(line_number, "bad flags {!r}".format(flags))
    if not path.startswith("/"):
      raise AccessLogError(line_number, "path {!r} is not absolute".format(
        path))
    if last is not None and timestamp < last:
      raise AccessLogError(line_number, "timestamp {} decreases from "
                                        "{}".format(timestamp, last))
    last = timestamp
    events.append(AccessEvent(path, flags, timestamp))
  return events


def ingest_access_log(snapshot, log_path):
  # type: (InstanceSnapshot, str) -> InstanceSnapshot
  """Return a copy of `snapshot` whose access_log is read from `log_path`."""
  with open(log_path, "r", encoding="utf-8", errors="replace") as f:
    events = parse_access_log(f)
  return snapshot.with_access_log(events)


_MANIFEST_NAME = "manifest.jsonl"
_BLOB_DIR = "blobs"
_ACCESS_LOG_NAME = "access.log"


def _blob_name(path):
  return hashlib.sha256(path.encode("utf-8")).hexdigest() + ".gz"


def save_snapshot(snapshot, out_dir):
  # type: (InstanceSnapshot, str) -> None
  """
  Persist `snapshot` under `out_dir`: a JSON-lines manifest of entries,
  gzip content blobs named by the sha256 of the entry path and, when present,
  the access log.
  """
  blob_dir = os.path.join(out_dir, _BLOB_DIR)
  if not os.path.isdir(blob_dir):
    os.makedirs(blob_dir)
  rows = []
  for e in snapshot.entries:
    row = e.to_dict()
    if e.content is not None:
      row["blob"] = _blob_name(e.path)
      util.atomic_write(os.path.join(blob_dir, row["blob"]),
                        gzip.compress(e.content, mtime=0), "wb")
    rows.append(row)
  header = {
    "instance_id": snapshot.instance_id,
    "reference_time": snapshot.reference_time,
    "directories": sorted(snapshot.directories),
    "has_access_log": snapshot.access_log is not None,
  }
  if snapshot.access_log is not None:
    util.atomic_write(
      os.path.join(out_dir, _ACCESS_LOG_NAME),
      "".join("{}\t{}\t{}\n".format(ev.timestamp, ev.flags, ev.path)
              for ev in snapshot.access_log))
  util.write_jsonl(os.path.join(out_dir, _MANIFEST_NAME), header, rows)


def load_snapshot(snapshot_dir):
  # type: (str) -> InstanceSnapshot
  """Inverse of `save_snapshot`."""
  header, rows = util.read_jsonl(os.path.join(snapshot_dir, _MANIFEST_NAME))
  entries = []
  for row in rows:
    blob = row.pop("blob", None)
    content = None
    if blob is not None:
      with gzip.open(os.path.join(snapshot_dir, _BLOB_DIR, blob), "rb") as f:
        content = f.read()
    entries.append(FileEntry(content=content, **row))
  snap = InstanceSnapshot(header["instance_id"], entries, None,
                          header["reference_time"], header["directories"])
  if header.get("has_access_log"):
    snap = ingest_access_log(snap, os.path.join(snapshot_dir,
                                                _ACCESS_LOG_NAME))
  return snap


class PathIndex(object):
  """
  The set of file, symlink and directory paths of one instance.

  Stands in for a full snapshot wherever only existence checks are needed
  (file-path semantic checks during analysis).
  """

  def __init__(self, paths=(), instance_id=None):
    self._paths = frozenset(paths)
    self._instance_id = instance_id

  @classmethod
  def from_snapshot(cls, snapshot):
    # type: (InstanceSnapshot) -> PathIndex
    return cls(snapshot.paths() | snapshot.directories, snapshot.instance_id)

  @property
  def instance_id(self):
    return self._instance_id

  def exists(self, path):
    # type: (str) -> bool
    return _normalize(path) in self._paths

  __call__ = exists

  def __contains__(self, path):
    return self.exists(path)

  def __len__(self):
    return len(self._paths)

  def __iter__(self):
    return iter(sorted(self._paths))

  def save(self, path):
    # type: (str) -> None
    util.write_jsonl(path, {"instance_id": self._instance_id},
                     ({"path": p} for p in sorted(self._paths)))

  @classmethod
  def load(cls, path):
    # type: (str) -> PathIndex
    header, rows = util.read_jsonl(path)
    return cls((r["path"] for r in rows), header.get("instance_id"))
