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
generate.py

Deterministic synthetic instance corpora with ground truth.

Each generated instance is a directory tree standing for an image's root
filesystem, with httpd, nginx and mysql configuration files (at default or
non-standard locations), passive template copies, decoy text files, system
files and an access log of the instance's start-up. A sorted-keys
`manifest.json` records where every configuration file went, which files
were read at start-up, and every injected or planted error.

Layout of the output directory:

  manifest.json
  instances/<instance_id>/rootfs/...
  instances/<instance_id>/access.log
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
import json
import logging
import os
import random
from typing import Any, Dict, List, Optional, Tuple

from six import string_types
import yaml

from confex import active, envdata, util

__all__ = [
  "REFERENCE_TIME",
  "ACCESS_START",
  "APPLICATIONS",
  "INJECTION_TARGETS",
  "VIOLATION_PLANTS",
  "GeneratedConfig",
  "httpd_config",
  "nginx_config",
  "mysql_config",
  "generate_instance",
  "generate_corpus",
  "load_manifest",
  "instance_root",
  "instance_access_log",
  "planted_files",
]

logger = logging.getLogger(__name__)

# Last start-up of every generated instance; files read during start-up
# carry atimes after it, everything else before it.
REFERENCE_TIME = 1600000000
ACCESS_START = REFERENCE_TIME + 10
_OLD_ATIME = REFERENCE_TIME - 86400
_OLD_MTIME = REFERENCE_TIME - 30 * 86400

APPLICATIONS = ("httpd", "nginx", "mysql")

_STANDARD_PATHS = {
  "httpd": ("/etc/httpd/conf/httpd.conf", "/etc/apache2/apache2.conf",
            "/usr/local/apache2/conf/httpd.conf"),
  "nginx": ("/etc/nginx/nginx.conf", "/usr/local/nginx/conf/nginx.conf"),
  "mysql": ("/etc/mysql/my.cnf", "/etc/my.cnf"),
}
_NONSTANDARD_DIRS = ("/opt/{}/conf", "/srv/{}/etc", "/home/deploy/{}",
                     "/usr/local/etc/{}-site", "/app/config/{}")
_NONSTANDARD_NAMES = {
  "httpd": ("httpd.conf", "site.conf", "web.conf"),
  "nginx": ("nginx.conf", "proxy.conf", "server.conf"),
  "mysql": ("my.cnf", "server.cnf", "db.cnf"),
}
_PASSIVE_PATHS = {
  "httpd": "/usr/share/doc/httpd/httpd.conf.sample",
  "nginx": "/usr/share/doc/nginx/nginx.conf.default",
  "mysql": "/usr/share/mysql/my-default.cnf",
}
_PASSIVE_PROBABILITY = 0.3

# (application, record key, dominant value, outliers). The dominant value is
# the same in every generated file, so an injected outlier is the only value
# of its key the peers never saw.
INJECTION_TARGETS = (
  ("httpd", "Timeout", "300", ("3", "30000", "-1")),
  ("httpd", "MaxKeepAliveRequests", "100", ("0", "1", "100000")),
  ("httpd", "ServerTokens", "Prod", ("Full", "OS")),
  ("nginx", "http/keepalive_timeout", "65", ("0", "6500")),
  ("nginx", "http/client_max_body_size", "1m", ("0", "100g")),
  ("mysql", "mysqld/max_allowed_packet", "16M", ("1K", "16")),
  ("mysql", "mysqld/key_buffer_size", "16M", ("0", "16G")),
)

_PROXY_PASS_KEY = "http/server/location %2Fapi%2F/proxy_pass"

# (kind, application, record key, planted value).
VIOLATION_PLANTS = (
  ("placeholder", "nginx", _PROXY_PASS_KEY, "__PROXY_PASS__"),
  ("windows_path", "httpd", "ErrorLog", "C:\\logs\\error.log"),
)

_COMMENTS = (
  "This file is managed by the deployment scripts.",
  "See the documentation for the meaning of each setting.",
  "Adjust to the host's resources.",
  "Do not edit by hand.",
  "Tuned for the production profile.",
  "Local override.",
)

GeneratedConfig = collections.namedtuple(
  "GeneratedConfig", ["application", "variant", "text", "stubs"])


class _Template(object):
  """Collects one file's lines with randomized values and comment noise."""

  def __init__(self, rng, overrides):
    self.rng = rng
    self.overrides = overrides or {}
    self.stubs = {}  # type: Dict[str, str]

  def value(self, key, choices):
    if key in self.overrides:
      return self.overrides[key]
    if isinstance(choices, string_types):
      return choices
    return self.rng.choice(choices)

  def path(self, key, choices, kind):
    v = self.value(key, choices)
    if v.startswith("/") and key not in self.overrides:
      self.stubs[v] = kind
    return v

  def noisy(self, lines, comment="#"):
    """Shuffle `lines` and sprinkle comments among them."""
    lines = list(lines)
    self.rng.shuffle(lines)
    out = []
    for line in lines:
      if self.rng.random() < 0.25:
        out.append("{} {}".format(comment, self.rng.choice(_COMMENTS)))
      out.append(line)
    return out


def _quoted(v):
  return v if "\\" in v else '"{}"'.format(v)


def httpd_config(rng, overrides=None, variant=None):
  # type: (random.Random, Optional[Dict[str, str]], Optional[int]) -> GeneratedConfig
  """An httpd configuration file. `overrides` map record keys to values."""
  t = _Template(rng, overrides)
  variant = rng.choice((1, 2)) if variant is None else variant
  user = t.value("IfModule unixd_module/User", ("daemon", "www-data", "apache"))
  doc_root = t.path("DocumentRoot",
                    ("/var/www/html", "/srv/www/htdocs", "/var/www/site"),
                    "dir")
  alias_dir = t.path("Alias /static", doc_root + "/static", "dir")
  top = [
    "ServerRoot {}".format(_quoted(t.path(
      "ServerRoot", ("/etc/httpd", "/usr/local/apache2", "/opt/httpd"),
      "dir"))),
    "Listen {}".format(t.value("Listen", ("80", "8080", "8000", "8081"))),
    "ServerAdmin {}".format(t.value("ServerAdmin", "webmaster@example.com")),
    "ServerName {}".format(t.value(
      "ServerName", "www{}.example.com".format(rng.randrange(100000)))),
    "DocumentRoot {}".format(_quoted(doc_root)),
    "ErrorLog {}".format(_quoted(t.path(
      "ErrorLog", ("/var/log/httpd/error_log", "/var/log/apache2/error.log",
                   "/var/log/www/error.log"), "file"))),
    "LogLevel {}".format(t.value("LogLevel", ("warn", "error", "info",
                                              "debug"))),
    "Timeout {}".format(t.value("Timeout", "300")),
    "KeepAlive {}".format(t.value("KeepAlive", ("On", "Off"))),
    "MaxKeepAliveRequests {}".format(t.value("MaxKeepAliveRequests", "100")),
    "KeepAliveTimeout {}".format(t.value("KeepAliveTimeout",
                                         ("5", "15", "30"))),
    "ServerTokens {}".format(t.value("ServerTokens", "Prod")),
    "Alias /static {}".format(_quoted(alias_dir)),
    "Redirect /old {}".format(t.value("Redirect /old", "/new")),
  ]
  lines = t.noisy(top)
  lines += [
    "",
    "<IfModule unixd_module>",
    "    User {}".format(user),
    "    Group {}".format(t.value("IfModule unixd_module/Group", user)),
    "</IfModule>",
    "",
    "<IfModule dir_module>",
    "    DirectoryIndex index.html",
    "</IfModule>",
    "",
    "<Directory />",
    "    AllowOverride none",
    "    Require all denied",
    "</Directory>",
  ]
  if variant == 2:
    cert = t.path("IfModule ssl_module/SSLCertificateFile",
                  "/etc/pki/tls/certs/localhost.crt", "file")
    lines += [
      "",
      "<IfModule ssl_module>",
      "    SSLEngine on",
      "    SSLProtocol all -SSLv3",
      "    SSLCertificateFile {}".format(cert),
      "</IfModule>",
    ]
  return GeneratedConfig("httpd", variant, "\n".join(lines) + "\n", t.stubs)


def nginx_config(rng, overrides=None, variant=None):
  # type: (random.Random, Optional[Dict[str, str]], Optional[int]) -> GeneratedConfig
  t = _Template(rng, overrides)
  variant = rng.choice((1, 2)) if variant is None else variant
  top = [
    "user {};".format(t.value("user", ("nginx", "www-data"))),
    "worker_processes {};".format(t.value("worker_processes",
                                          ("auto", "1", "2", "4"))),
    "error_log {};".format(t.path(
      "error_log", ("/var/log/nginx/error.log", "/var/log/nginx-error.log"),
      "file")),
    "pid {};".format(t.value("pid", "/run/nginx.pid")),
  ]
  http = [
    "    sendfile {};".format(t.value("http/sendfile", ("on", "off"))),
    "    keepalive_timeout {};".format(t.value("http/keepalive_timeout",
                                               "65")),
    "    client_max_body_size {};".format(t.value(
      "http/client_max_body_size", "1m")),
    "    include {};".format(t.value("http/include",
                                     "/etc/nginx/mime.types")),
  ]
  if variant == 2:
    http += ["    gzip on;", "    gzip_types text/plain text/css;"]
  root = t.path("http/server/root", ("/usr/share/nginx/html", "/var/www/nginx",
                                     "/srv/nginx/public"), "dir")
  lines = t.noisy(top)
  lines += [
    "",
    "events {",
    "    worker_connections {};".format(t.value(
      "events/worker_connections", ("512", "1024", "2048"))),
    "}",
    "",
    "http {",
  ]
  lines += t.noisy(http)
  lines += [
    "",
    "    server {",
    "        listen {};".format(t.value("http/server/listen",
                                        ("80", "8080", "8000"))),
    "        server_name app{}.example.org;".format(rng.randrange(100000)),
    "        root {};".format(root),
    "        index index.html index.htm;",
    "",
    "        location / {",
    "            try_files $uri $uri/ =404;",
    "        }",
    "",
    "        location /api/ {",
    "            proxy_pass {};".format(t.value(
      _PROXY_PASS_KEY, ("http://127.0.0.1:8080", "http://app:3000",
                        "http://backend:9000"))),
    "        }",
    "    }",
    "}",
  ]
  return GeneratedConfig("nginx", variant, "\n".join(lines) + "\n", t.stubs)


def mysql_config(rng, overrides=None, variant=None):
  # type: (random.Random, Optional[Dict[str, str]], Optional[int]) -> GeneratedConfig
  t = _Template(rng, overrides)
  variant = rng.choice((1, 2)) if variant is None else variant
  port = t.value("mysqld/port", ("3306", "3307", "3310"))
  socket = t.path("mysqld/socket", ("/var/run/mysqld/mysqld.sock",
                                    "/tmp/mysql.sock"), "file")
  mysqld = [
    "user = {}".format(t.value("mysqld/user", "mysql")),
    "port = {}".format(port),
    "bind-address = {}".format(t.value("mysqld/bind-address",
                                       ("127.0.0.1", "0.0.0.0"))),
    "datadir = {}".format(t.path("mysqld/datadir", (
      "/var/lib/mysql", "/data/mysql", "/srv/mysql/data"), "dir")),
    "socket = {}".format(socket),
    "log-error = {}".format(t.path("mysqld/log-error", (
      "/var/log/mysql/error.log", "/var/log/mysqld.log"), "file")),
    "max_connections = {}".format(t.value("mysqld/max_connections",
                                          ("151", "200", "500"))),
    "innodb_buffer_pool_size = {}".format(t.value(
      "mysqld/innodb_buffer_pool_size", ("128M", "256M", "1G"))),
    "max_allowed_packet = {}".format(t.value("mysqld/max_allowed_packet",
                                             "16M")),
    "key_buffer_size = {}".format(t.value("mysqld/key_buffer_size", "16M")),
    "skip-name-resolve",
  ]
  lines = [
    "[client]",
    "port = {}".format(t.value("client/port", port)),
    "socket = {}".format(t.value("client/socket", socket)),
    "",
    "[mysqld]",
  ]
  lines += t.noisy(mysqld)
  if variant == 2:
    lines += ["", "[mysqldump]", "quick", "quote-names"]
  return GeneratedConfig("mysql", variant, "\n".join(lines) + "\n", t.stubs)


_CONFIG_BUILDERS = {
  "httpd": httpd_config,
  "nginx": nginx_config,
  "mysql": mysql_config,
}


################################################################################
# Decoys and system files

_WORDS = ("server", "request", "cache", "worker", "queue", "latency", "user",
          "session", "timeout", "buffer", "report", "daily", "module",
          "package", "release", "build", "deploy", "network", "storage",
          "metric")


def _sentence(rng, n=8):
  words = [rng.choice(_WORDS) for _ in range(n)]
  return words[0].capitalize() + " " + " ".join(words[1:]) + "."


def _decoy_prose(rng):
  return "\n".join(_sentence(rng, rng.randrange(5, 12))
                   for _ in range(rng.randrange(3, 9))) + "\n"


def _decoy_python(rng):
  name = rng.choice(_WORDS)
  return ("import os\nimport sys\n\n\n"
          "def {0}_count(items):\n"
          "    total = 0\n"
          "    for item in items:\n"
          "        total += len(item)\n"
          "    return total\n\n\n"
          "if __name__ == \"__main__\":\n"
          "    print({0}_count(sys.argv[1:]))\n").format(name)


def _decoy_shell(rng):
  return ("#!/bin/sh\nset -e\n"
          "export APP_HOME=/opt/{0}\n"
          "cd $APP_HOME\n"
          "exec ./bin/{0} --workers {1}\n").format(rng.choice(_WORDS),
                                                   rng.randrange(1, 9))


def _decoy_csv(rng):
  rows = ["name,count,ratio"]
  rows += ["{},{},{:.2f}".format(rng.choice(_WORDS), rng.randrange(1000),
                                 rng.random()) for _ in range(10)]
  return "\n".join(rows) + "\n"


def _decoy_log(rng):
  return "".join(
    "2020-09-13 12:{:02d}:{:02d} INFO {} {} ok\n".format(
      i, rng.randrange(60), rng.choice(_WORDS), rng.randrange(100))
    for i in range(12))


def _decoy_header(rng):
  name = rng.choice(_WORDS).upper()
  return "#ifndef {0}_H\n#define {0}_H\nint {1}_init(void);\n#endif\n".format(
    name, name.lower())


def _decoy_json(rng):
  return json.dumps({w: rng.randrange(100)
                     for w in rng.sample(_WORDS, 5)}, sort_keys=True) + "\n"


def _decoy_yaml(rng):
  return yaml.safe_dump({w: rng.choice(_WORDS)
                         for w in rng.sample(_WORDS, 5)},
                        default_flow_style=False)


def _decoy_unit(rng):
  name = rng.choice(_WORDS)
  return ("[Unit]\nDescription={0} daemon\nAfter=network.target\n\n"
          "[Service]\nExecStart=/usr/bin/{0}d\nRestart=always\n\n"
          "[Install]\nWantedBy=multi-user.target\n").format(name)


def _decoy_env(rng):
  return "".join("{}={}\n".format(w.upper(), rng.randrange(1000))
                 for w in rng.sample(_WORDS, 4))


# (generator, directory, extension)
_DECOYS = (
  (_decoy_prose, "/usr/share/doc/{}", ".txt"),
  (_decoy_prose, "/opt/{}", ""),
  (_decoy_python, "/opt/{}/lib", ".py"),
  (_decoy_shell, "/usr/local/bin", ".sh"),
  (_decoy_csv, "/srv/data/{}", ".csv"),
  (_decoy_log, "/var/log/{}", ".log"),
  (_decoy_header, "/usr/include/{}", ".h"),
  (_decoy_json, "/etc/{}", ".json"),
  (_decoy_yaml, "/etc/{}", ".yml"),
  (_decoy_unit, "/etc/systemd/system", ".service"),
  (_decoy_env, "/opt/{}", ".env"),
)

_PASSWD = """\
root:x:0:0:root:/root:/bin/bash
daemon:x:1:1:daemon:/usr/sbin:/usr/sbin/nologin
bin:x:2:2:bin:/bin:/usr/sbin/nologin
www-data:x:33:33:www-data:/var/www:/usr/sbin/nologin
apache:x:48:48:Apache:/usr/share/httpd:/sbin/nologin
nginx:x:101:101:nginx user:/var/cache/nginx:/sbin/nologin
mysql:x:102:102:MySQL Server:/var/lib/mysql:/bin/false
nobody:x:65534:65534:nobody:/nonexistent:/usr/sbin/nologin
"""

_GROUP = """\
root:x:0:
daemon:x:1:
bin:x:2:
www-data:x:33:
apache:x:48:
nginx:x:101:
mysql:x:102:
nogroup:x:65534:
"""

_SERVICES = """\
ssh             22/tcp
http            80/tcp          www
https           443/tcp
mysql           3306/tcp
"""

_FSTAB = """\
# <file system> <mount point> <type> <options> <dump> <pass>
/dev/sda1 / ext4 defaults,noatime 0 1
tmpfs /tmp tmpfs defaults,size=512m 0 0
"""

_SYSTEM_FILES = (
  ("/etc/passwd", _PASSWD),
  ("/etc/group", _GROUP),
  ("/etc/services", _SERVICES),
  ("/etc/fstab", _FSTAB),
)


################################################################################
# Instances

def instance_root(out_dir, instance_id):
  return os.path.join(out_dir, "instances", instance_id, "rootfs")


def instance_access_log(out_dir, instance_id):
  return os.path.join(out_dir, "instances", instance_id, "access.log")


def _write(rootfs, path, text, atime, mtime=_OLD_MTIME):
  full = os.path.join(rootfs, path.lstrip("/"))
  d = os.path.dirname(full)
  if not os.path.isdir(d):
    os.makedirs(d)
  with open(full, "wb") as f:
    f.write(text.encode("utf-8"))
  os.utime(full, (atime, mtime))


def _config_path(rng, application, nonstandard):
  if rng.random() < nonstandard:
    d = rng.choice(_NONSTANDARD_DIRS).format(application)
    return d + "/" + rng.choice(_NONSTANDARD_NAMES[application]), True
  return rng.choice(_STANDARD_PATHS[application]), False


def generate_instance(out_dir,  # type: str
                      instance_id,  # type: str
                      rng,  # type: random.Random
                      nonstandard=0.5,  # type: float
                      decoys=25,  # type: int
                      overrides=None,  # type: Optional[Dict[str, Dict[str, str]]]
                      extra_files=0  # type: int
                      ):
  # type: (...) -> Dict[str, Any]
  """
  Write one instance under `out_dir` and return its manifest entry.

  Args:
    out_dir: Corpus directory.
    instance_id: Name of the instance directory.
    rng: Source of randomness; the instance depends on nothing else.
    nonstandard: Probability that a configuration file is placed outside
      its application's default locations.
    decoys: Number of decoy text files.
    overrides: Application to `{record key: value}` substitutions.
    extra_files: Number of additional small data files, never read.

  Returns:
    A manifest entry with `configs`, `decoys`, `accessed` and `touched`.
  """
  overrides = overrides or {}
  rootfs = instance_root(out_dir, instance_id)
  configs = []
  stubs = {}
  startup_reads = []
  for application in APPLICATIONS:
    generated = _CONFIG_BUILDERS[application](
      rng, overrides.get(application))
    path, is_nonstandard = _config_path(rng, application, nonstandard)
    configs.append({"application": application, "path": path,
                    "variant": generated.variant,
                    "nonstandard": is_nonstandard, "active": True})
    stubs.update(generated.stubs)
    _write(rootfs, path, generated.text, ACCESS_START + len(startup_reads))
    startup_reads.append(path)
    if rng.random() < _PASSIVE_PROBABILITY:
      passive = _CONFIG_BUILDERS[application](rng)
      configs.append({"application": application,
                      "path": _PASSIVE_PATHS[application],
                      "variant": passive.variant, "nonstandard": True,
                      "active": False})
      _write(rootfs, _PASSIVE_PATHS[application], passive.text, _OLD_ATIME)

  for path, text in _SYSTEM_FILES:
    _write(rootfs, path, text, ACCESS_START + len(startup_reads))
    startup_reads.append(path)
  manifest = {
    "env": {"PATH": "/usr/local/sbin:/usr/local/bin:/usr/sbin:/usr/bin",
            "HOSTNAME": "{:012x}".format(rng.getrandbits(48)),
            "APP_ENV": rng.choice(("production", "staging", "development"))},
  }
  _write(rootfs, envdata.MANIFEST_PATH,
         yaml.safe_dump(manifest, default_flow_style=False),
         ACCESS_START + len(startup_reads))
  startup_reads.append(envdata.MANIFEST_PATH)

  for path, kind in sorted(stubs.items()):
    full = os.path.join(rootfs, path.lstrip("/"))
    if kind == "dir":
      if not os.path.isdir(full):
        os.makedirs(full)
    elif not os.path.exists(full):
      _write(rootfs, path, "", _OLD_ATIME)

  decoy_paths = []
  for i in range(decoys):
    make, directory, ext = rng.choice(_DECOYS)
    path = "{}/{}-{}{}".format(directory.format(rng.choice(_WORDS)),
                               rng.choice(_WORDS), i, ext)
    _write(rootfs, path, make(rng), _OLD_ATIME)
    decoy_paths.append(path)
  for i in range(extra_files):
    _write(rootfs, "/usr/lib/data/part-{:05d}.dat".format(i),
           "{:08x}\n".format(rng.getrandbits(32)), _OLD_ATIME)

  late_reads = sorted(rng.sample(decoy_paths, min(2, len(decoy_paths))))
  lines = ["{}\tr\t{}".format(ACCESS_START + i, p)
           for i, p in enumerate(startup_reads)]
  lines.append("{}\tw\t{}".format(ACCESS_START + len(startup_reads) - 1,
                                  "/var/log/startup.log"))
  after = ACCESS_START + active.DEFAULT_WINDOW_SECONDS + 5
  lines += ["{}\tr\t{}".format(after + i, p)
            for i, p in enumerate(late_reads)]
  util.atomic_write(instance_access_log(out_dir, instance_id),
                    "\n".join(lines) + "\n")
  return {
    "configs": configs,
    "decoys": sorted(decoy_paths),
    "accessed": sorted(startup_reads),
    "touched": sorted(startup_reads),
  }


def generate_corpus(out_dir,  # type: str
                    count=200,  # type: int
                    seed=1,  # type: int
                    nonstandard=0.5,  # type: float
                    decoys=25,  # type: int
                    inject=0,  # type: int
                    plant_violations=0,  # type: int
                    extra_files=0  # type: int
                    ):
  # type: (...) -> Dict[str, Any]
  """
  Generate `count` instances under `out_dir` and write `manifest.json`.

  The same arguments always produce byte-identical output.

  Args:
    out_dir: Output directory, created if missing.
    count: Number of instances.
    seed: Generation seed.
    nonstandard: Probability of a non-standard configuration location.
    decoys: Decoy files per instance.
    inject: Number of instances receiving one outlier value (see
      `INJECTION_TARGETS`).
    plant_violations: Number of other instances receiving one planted type
      violation (see `VIOLATION_PLANTS`), alternating the plant kinds.
    extra_files: Additional never-read data files per instance.

  Returns:
    The manifest document.

  Raises:
    ValueError: on out-of-range arguments.
  """
  if count < 0:
    raise ValueError("count must be non-negative, got {}".format(count))
  if not 0 <= nonstandard <= 1:
    raise ValueError("nonstandard must be in [0, 1], got {}".format(
      nonstandard))
  if inject < 0 or plant_violations < 0 or inject + plant_violations > count:
    raise ValueError("Cannot inject {} and plant {} errors into {} "
                     "instances".format(inject, plant_violations, count))
  rng = random.Random(seed)
  width = max(4, len(str(count)))
  ids = ["inst-{}".format(str(i + 1).zfill(width)) for i in range(count)]
  chosen = rng.sample(ids, inject + plant_violations)
  injections = {}
  for iid in sorted(chosen[:inject]):
    application, key, dominant, outliers = rng.choice(INJECTION_TARGETS)
    injections[iid] = {"application": application, "key": key,
                       "dominant": dominant, "value": rng.choice(outliers)}
  plants = {}
  for i, iid in enumerate(sorted(chosen[inject:])):
    kind, application, key, value = VIOLATION_PLANTS[i % len(VIOLATION_PLANTS)]
    plants[iid] = {"kind": kind, "application": application, "key": key,
                   "value": value}

  instances = collections.OrderedDict()
  for i, iid in enumerate(ids):
    overrides = {}
    for change in (injections.get(iid), plants.get(iid)):
      if change is not None:
        overrides.setdefault(change["application"], {})[change["key"]] = (
          change["value"])
    entry = generate_instance(out_dir, iid,
                              random.Random("{}:{}".format(seed, i)),
                              nonstandard, decoys, overrides, extra_files)
    if iid in injections:
      entry["injection"] = injections[iid]
    if iid in plants:
      entry["violation"] = plants[iid]
    instances[iid] = entry
    logger.debug("Generated %s", iid)

  manifest = {
    "format_version": util.FORMAT_VERSION,
    "parameters": {"count": count, "seed": seed, "nonstandard": nonstandard,
                   "decoys": decoys, "inject": inject,
                   "plant_violations": plant_violations,
                   "extra_files": extra_files},
    "reference_time": REFERENCE_TIME,
    "instances": instances,
  }
  util.atomic_write(os.path.join(out_dir, "manifest.json"),
                    json.dumps(manifest, indent=2, sort_keys=True) + "\n")
  logger.info("Generated %d instances under %s", count, out_dir)
  return manifest


def load_manifest(path):
  # type: (str) -> Dict[str, Any]
  """
  Read a generation manifest (a corpus directory or its `manifest.json`).

  Raises:
    FormatVersionError: if the manifest has another format version.
  """
  if os.path.isdir(path):
    path = os.path.join(path, "manifest.json")
  with open(path, "r", encoding="utf-8") as f:
    manifest = json.load(f)
  if manifest.get("format_version") != util.FORMAT_VERSION:
    raise util.FormatVersionError(
      "Manifest '{}' has format_version {}; expected {}".format(
        path, manifest.get("format_version"), util.FORMAT_VERSION))
  return manifest


def planted_files(manifest, out_dir):
  # type: (Dict[str, Any], str) -> List[Tuple[str, str, str, str]]
  """`(instance_id, application, snapshot path, host path)` of every
  generated configuration file."""
  out = []
  for iid in sorted(manifest["instances"]):
    for c in manifest["instances"][iid]["configs"]:
      out.append((iid, c["application"], c["path"],
                  os.path.join(instance_root(out_dir, iid),
                               c["path"].lstrip("/"))))
  return out
