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
envdata.py

Environmental information of an instance (users, groups, environment
variables, file ownership) in the same record form as application
configuration, so analysis can cross-check the two.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
import logging
from typing import Dict, Iterable, List, Tuple

import yaml

from confex import corpus, parsers, util
from confex.disambiguate import ConfigRecord

__all__ = [
  "PASSWD_PATH",
  "GROUP_PATH",
  "MANIFEST_PATH",
  "User",
  "Group",
  "EnvironmentProfile",
  "collect_environment",
  "env_to_records",
]

logger = logging.getLogger(__name__)

PASSWD_PATH = "/etc/passwd"
GROUP_PATH = "/etc/group"
# Runtime facts (environment, addresses, ports) a crawler can drop into an
# image; YAML mapping with optional `env`, `addresses` and `ports`.
MANIFEST_PATH = "/.confex/manifest"

User = collections.namedtuple("User", parsers.PASSWD_SCHEMA)
Group = collections.namedtuple("Group", parsers.GROUP_SCHEMA)

_EnvironmentProfileBase = collections.namedtuple(
  "EnvironmentProfile",
  ["users", "groups", "env_vars", "file_meta", "addresses", "ports"])


class EnvironmentProfile(_EnvironmentProfileBase):
  """Users, groups, environment variables, addresses, ports and per-path
  `(mode_bits, owner_uid, owner_gid)` of one instance."""
  __slots__ = ()

  def __new__(cls, users=(), groups=(), env_vars=None, file_meta=None,
              addresses=(), ports=()):
    return super(EnvironmentProfile, cls).__new__(
      cls, list(users), list(groups), dict(env_vars or {}),
      dict(file_meta or {}), list(addresses), list(ports))


def _table_rows(snapshot, path, schema):
  entry = snapshot.get(path)
  if entry is None:
    logger.warning("%s has no %s", snapshot.instance_id, path)
    return []
  if entry.content is None:
    logger.warning("%s: content of %s was not retained", snapshot.instance_id,
                   path)
    return []
  tree = parsers.parse_colon_table(entry.content, schema, path, strict=False)
  return [[leaf.value for leaf in row.children] for row in tree.root.children]


def _is_id(text):
  return text.isdigit()


def _read_manifest(snapshot):
  entry = snapshot.get(MANIFEST_PATH)
  if entry is None or entry.content is None:
    return {}
  try:
    doc = yaml.safe_load(util.decode_text(entry.content))
  except yaml.YAMLError as e:
    logger.warning("%s: unreadable %s: %s", snapshot.instance_id,
                   MANIFEST_PATH, e)
    return {}
  if not isinstance(doc, dict):
    logger.warning("%s: %s is not a mapping", snapshot.instance_id,
                   MANIFEST_PATH)
    return {}
  return doc


def collect_environment(snapshot):
  # type: (corpus.InstanceSnapshot) -> EnvironmentProfile
  """
  Gather the environment profile of `snapshot`.

  Rows of `/etc/passwd` or `/etc/group` whose ids are not non-negative
  integers are skipped with a warning; other fields are kept verbatim,
  however odd.
  """
  users = []
  for fields in _table_rows(snapshot, PASSWD_PATH, parsers.PASSWD_SCHEMA):
    user = User(*fields)
    if not (_is_id(user.uid) and _is_id(user.gid)):
      logger.warning("%s: passwd row for %r has non-numeric ids",
                     snapshot.instance_id, user.name)
      continue
    users.append(user)
  groups = []
  for fields in _table_rows(snapshot, GROUP_PATH, parsers.GROUP_SCHEMA):
    group = Group(*fields)
    if not _is_id(group.gid):
      logger.warning("%s: group row for %r has a non-numeric gid",
                     snapshot.instance_id, group.name)
      continue
    groups.append(group)
  manifest = _read_manifest(snapshot)
  env_vars = {str(k): "" if v is None else str(v)
              for k, v in (manifest.get("env") or {}).items()}
  file_meta = {e.path: (e.mode_bits, e.owner_uid, e.owner_gid)
               for e in snapshot.entries}
  return EnvironmentProfile(
    users, groups, env_vars, file_meta,
    [str(a) for a in manifest.get("addresses") or ()],
    [str(p) for p in manifest.get("ports") or ()])


class _RecordSink(object):
  """Collects records, numbering entries densely per (application, file)."""

  def __init__(self):
    self.records = []  # type: List[ConfigRecord]
    self._counters = {}  # type: Dict[Tuple[str, str], int]

  def add(self, application, file_path, components, value):
    k = (application, file_path)
    self._counters[k] = self._counters.get(k, 0) + 1
    self.records.append(ConfigRecord(application, file_path,
                                     util.join_key(components), value,
                                     self._counters[k]))


def env_to_records(profile, meta_paths=()):
  # type: (EnvironmentProfile, Iterable[str]) -> List[ConfigRecord]
  """
  Records for an environment profile.

  Users become `sys.passwd` records keyed `passwd/<user>/<field>` (one per
  passwd field), groups `sys.group` records keyed `group/<group>/<field>`,
  environment variables `sys.env` records keyed `env/<NAME>`, addresses and
  ports `sys.net` records. For each path of `meta_paths` present in the
  profile, `sys.file` records give its octal mode and owner ids.
  """
  sink = _RecordSink()
  for user in profile.users:
    for field in parsers.PASSWD_SCHEMA:
      sink.add("sys.passwd", PASSWD_PATH, ["passwd", user.name, field],
               getattr(user, field))
  for group in profile.groups:
    for field in parsers.GROUP_SCHEMA:
      sink.add("sys.group", GROUP_PATH, ["group", group.name, field],
               getattr(group, field))
  for name in sorted(profile.env_vars):
    sink.add("sys.env", MANIFEST_PATH, ["env", name], profile.env_vars[name])
  for address in profile.addresses:
    sink.add("sys.net", MANIFEST_PATH, ["net", "address"], address)
  for port in profile.ports:
    sink.add("sys.net", MANIFEST_PATH, ["net", "port"], port)
  for path in meta_paths:
    if path not in profile.file_meta:
      continue
    mode, uid, gid = profile.file_meta[path]
    sink.add("sys.file", path, ["file", path, "mode"], "{:04o}".format(mode))
    sink.add("sys.file", path, ["file", path, "uid"], str(uid))
    sink.add("sys.file", path, ["file", path, "gid"], str(gid))
  return sink.records
