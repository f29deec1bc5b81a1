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
parsers.py

Native parsers that turn configuration file content into intermediate
`ConfigTree`s. Each parser keeps hierarchy, entry order and raw arguments;
key disambiguation happens later in `confex.disambiguate`.

Every parser raises `ConfigSyntaxError` on input it does not accept. The
discovery phase uses that as its syntax gate, so the parsers are strict
wherever the formats leave room for doubt.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import logging
import re
from typing import Iterator, List, Optional, Sequence, Tuple

from confex import util
from confex.tree import ConfigNode, ConfigTree, TreeFormat

__all__ = [
  "DIRECTIVE_KEY",
  "ARG_KEY",
  "PASSWD_SCHEMA",
  "GROUP_SCHEMA",
  "APPLICATION_FORMATS",
  "ConfigSyntaxError",
  "parse_httpd",
  "parse_nginx",
  "parse_ini",
  "parse_fstab_table",
  "parse_colon_table",
  "parse_services",
  "parse_content",
  "parse_file",
  "syntax_check",
  "format_for",
  "render_tree",
]

logger = logging.getLogger(__name__)

# Keys of the generic nodes in pre-disambiguation httpd trees.
DIRECTIVE_KEY = "directive"
ARG_KEY = "arg"

PASSWD_SCHEMA = ("name", "password", "uid", "gid", "gecos", "home", "shell")
GROUP_SCHEMA = ("name", "password", "gid", "members")

APPLICATION_FORMATS = {
  "httpd": TreeFormat.HTTPD,
  "nginx": TreeFormat.NGINX,
  "mysql": TreeFormat.INI,
  "fstab": TreeFormat.FSTAB_TABLE,
  "passwd": TreeFormat.COLON_TABLE,
  "group": TreeFormat.COLON_TABLE,
  "services": TreeFormat.SERVICES_TABLE,
}

_COLON_SCHEMAS = {
  "passwd": PASSWD_SCHEMA,
  "group": GROUP_SCHEMA,
}


class ConfigSyntaxError(ValueError):
  """Raised when content does not follow the syntax of its format."""

  def __init__(self, line_number, message):
    if line_number is None:
      text = message
    else:
      text = "line {}: {}".format(line_number, message)
    super(ConfigSyntaxError, self).__init__(text)
    self.line_number = line_number


def _logical_lines(content):
  # type: (str) -> Iterator[Tuple[int, str]]
  """Yield (first physical line number, text), joining `\\` continuations."""
  pending = []
  start = None
  for line_number, line in enumerate(content.splitlines(), 1):
    if start is None:
      start = line_number
    if line.endswith("\\"):
      pending.append(line[:-1])
      continue
    pending.append(line)
    yield start, "".join(pending)
    pending = []
    start = None
  if pending:
    yield start, "".join(pending)


################################################################################
# httpd

_HTTPD_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-]*$")
_HTTPD_TOKEN_RE = re.compile(r'\s*(?:"((?:[^"\\]|\\.)*)"|([^\s"]+))')
_HTTPD_OPEN_RE = re.compile(r"^<([^\s/>][^\s>]*)(\s.*)?>$")
_HTTPD_CLOSE_RE = re.compile(r"^</([^\s>]+)\s*>$")


def _tokenize_httpd(text, line_number):
  # type: (str, int) -> List[str]
  tokens = []
  pos = 0
  while pos < len(text):
    if not text[pos:].strip():
      break
    m = _HTTPD_TOKEN_RE.match(text, pos)
    if m is None:
      raise ConfigSyntaxError(line_number, "unterminated quoted argument")
    tokens.append(m.group(1) if m.group(1) is not None else m.group(2))
    pos = m.end()
  return tokens


def _check_httpd_name(name, line_number):
  if not _HTTPD_NAME_RE.match(name):
    raise ConfigSyntaxError(line_number,
                            "invalid directive name {!r}".format(name))


def parse_httpd(content, source_path=None):
  # type: (str, Optional[str]) -> ConfigTree
  """
  Parse Apache httpd configuration text.

  Each directive line becomes a `directive` node whose value is the directive
  name, with one `arg` child per argument. `<Section args>` blocks become
  section nodes keyed by the section name, holding `arg` children for the
  section arguments followed by the nested nodes.

  Args:
    content: File content, as text or bytes.
    source_path: Path recorded on the returned tree.

  Returns:
    The pre-disambiguation `ConfigTree`.

  Raises:
    ConfigSyntaxError: on unbalanced or mismatched section tags, invalid
      directive names or unterminated quotes.
  """
  content = util.decode_text(content)
  root = ConfigNode("", is_section=True)
  stack = [(root, None, 0)]
  for line_number, line in _logical_lines(content):
    text = line.strip()
    if not text or text.startswith("#"):
      continue
    if text.startswith("</"):
      m = _HTTPD_CLOSE_RE.match(text)
      if m is None:
        raise ConfigSyntaxError(line_number, "malformed closing tag")
      if len(stack) == 1:
        raise ConfigSyntaxError(
          line_number, "closing tag </{}> without open section".format(
            m.group(1)))
      section, _, _ = stack[-1]
      if m.group(1).lower() != section.key.lower():
        raise ConfigSyntaxError(
          line_number, "</{}> closes <{}>".format(m.group(1), section.key))
      stack.pop()
      continue
    if text.startswith("<"):
      m = _HTTPD_OPEN_RE.match(text)
      if m is None:
        raise ConfigSyntaxError(line_number, "malformed section tag")
      _check_httpd_name(m.group(1), line_number)
      section = ConfigNode(m.group(1), is_section=True)
      for arg in _tokenize_httpd(m.group(2) or "", line_number):
        section.add_child(ConfigNode(ARG_KEY, arg))
      stack[-1][0].add_child(section)
      stack.append((section, m.group(1), line_number))
      continue
    tokens = _tokenize_httpd(text, line_number)
    _check_httpd_name(tokens[0], line_number)
    directive = ConfigNode(DIRECTIVE_KEY, tokens[0])
    for arg in tokens[1:]:
      directive.add_child(ConfigNode(ARG_KEY, arg))
    stack[-1][0].add_child(directive)
  if len(stack) > 1:
    _, name, line_number = stack[-1]
    raise ConfigSyntaxError(line_number, "<{}> is never closed".format(name))
  return ConfigTree(root, TreeFormat.HTTPD, source_path)


def _quote_httpd(value):
  if (value == "" or re.search(r'[\s"]', value) or value.endswith("\\")):
    return '"{}"'.format(value)
  return value


def _render_httpd(node, depth, out):
  indent = "  " * depth
  for c in node.children:
    if c.is_section:
      args = [a.value for a in c.children
              if a.key == ARG_KEY and not a.is_section]
      body = ConfigNode("", is_section=True)
      body.set_children([a.copy() for a in c.children
                         if not (a.key == ARG_KEY and not a.is_section)])
      head = " ".join([c.key] + [_quote_httpd(a) for a in args])
      out.append("{}<{}>".format(indent, head))
      _render_httpd(body, depth + 1, out)
      out.append("{}</{}>".format(indent, c.key))
    else:
      words = [c.value] + [_quote_httpd(a.value) for a in c.children]
      out.append(indent + " ".join(words))


################################################################################
# nginx

_NGINX_SPECIAL = "{};"
_NGINX_QUOTES = "\"'"


def _tokenize_nginx(content):
  # type: (str) -> Iterator[Tuple[str, bool, int]]
  """Yield (token, is_punctuation, line_number)."""
  i = 0
  n = len(content)
  line = 1
  while i < n:
    ch = content[i]
    if ch == "\n":
      line += 1
      i += 1
    elif ch.isspace():
      i += 1
    elif ch == "#":
      while i < n and content[i] != "\n":
        i += 1
    elif ch in _NGINX_SPECIAL:
      yield ch, True, line
      i += 1
    elif ch in _NGINX_QUOTES:
      start_line = line
      i += 1
      buf = []
      while i < n and content[i] != ch:
        c = content[i]
        if c == "\\" and i + 1 < n:
          c = content[i + 1]
          i += 1
        if c == "\n":
          line += 1
        buf.append(c)
        i += 1
      if i >= n:
        raise ConfigSyntaxError(start_line, "unterminated quoted string")
      i += 1
      yield "".join(buf), False, start_line
    else:
      start = i
      while (i < n and not content[i].isspace()
             and content[i] not in _NGINX_SPECIAL
             and content[i] not in _NGINX_QUOTES):
        i += 1
      yield content[start:i], False, line


def parse_nginx(content, source_path=None):
  # type: (str, Optional[str]) -> ConfigTree
  """
  Parse nginx configuration text.

  `name args;` becomes a node keyed by `name` whose value is the arguments
  joined with single spaces (None when there are none). `name args { ... }`
  becomes a section node keyed by `name` with `arg` children.

  Raises:
    ConfigSyntaxError: on a missing `;`, an empty statement or unbalanced
      braces.
  """
  content = util.decode_text(content)
  root = ConfigNode("", is_section=True)
  stack = [(root, 0)]
  words = []
  words_line = None
  for token, punctuation, line in _tokenize_nginx(content):
    if not punctuation:
      if not words:
        words_line = line
      words.append(token)
    elif token == ";":
      if not words:
        raise ConfigSyntaxError(line, "empty statement")
      value = " ".join(words[1:]) if len(words) > 1 else None
      stack[-1][0].add_child(ConfigNode(words[0], value))
      words = []
    elif token == "{":
      if not words:
        raise ConfigSyntaxError(line, "block without a name")
      section = ConfigNode(words[0], is_section=True)
      for arg in words[1:]:
        section.add_child(ConfigNode(ARG_KEY, arg))
      stack[-1][0].add_child(section)
      stack.append((section, line))
      words = []
    else:
      if words:
        raise ConfigSyntaxError(words_line, "missing ';' after '{}'".format(
          " ".join(words)))
      if len(stack) == 1:
        raise ConfigSyntaxError(line, "unexpected '}'")
      stack.pop()
  if words:
    raise ConfigSyntaxError(words_line, "missing ';' after '{}'".format(
      " ".join(words)))
  if len(stack) > 1:
    raise ConfigSyntaxError(stack[-1][1], "unbalanced '{'")
  return ConfigTree(root, TreeFormat.NGINX, source_path)


def _quote_nginx(value):
  if value == "" or re.search(r"[\s{};\"'\\#]", value):
    return '"{}"'.format(value.replace("\\", "\\\\").replace('"', '\\"'))
  return value


def _render_nginx(node, depth, out):
  indent = "    " * depth
  for c in node.children:
    if c.is_section:
      args = [_quote_nginx(a.value) for a in c.children
              if a.key == ARG_KEY and not a.is_section]
      body = ConfigNode("", is_section=True)
      body.set_children([a.copy() for a in c.children
                         if not (a.key == ARG_KEY and not a.is_section)])
      out.append("{}{} {{".format(indent, " ".join([c.key] + args)))
      _render_nginx(body, depth + 1, out)
      out.append(indent + "}")
    elif c.value is None:
      out.append("{}{};".format(indent, c.key))
    else:
      words = [_quote_nginx(w) for w in c.value.split(" ")]
      out.append("{}{} {};".format(indent, c.key, " ".join(words)))


################################################################################
# INI (MySQL option files)

_INI_SECTION_RE = re.compile(r"^\[\s*([^\]]*?)\s*\]$")
_INI_INCLUDE_RE = re.compile(r"^(!include|!includedir)\s+(\S.*)$")
_INI_PAIR_RE = re.compile(r"^([A-Za-z0-9_.\-]+)\s*=\s*(.*)$")
_INI_BARE_RE = re.compile(r"^([A-Za-z0-9_.\-]+)$")
_INI_INCLUDE_KEYS = ("!include", "!includedir")


def _unquote_ini(value):
  if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
    return value[1:-1]
  return value


def parse_ini(content, source_path=None):
  # type: (str, Optional[str]) -> ConfigTree
  """
  Parse an INI-style option file (MySQL `my.cnf` and friends).

  `[section]` headers open section nodes; `key = value` and bare `key` lines
  become leaves of the current section (bare keys have no value), and
  `!include` / `!includedir` lines become leaves keyed by the directive.
  Lines starting with `;` or `#` are comments. Surrounding quotes on values
  are removed.

  Raises:
    ConfigSyntaxError: for a line that is none of the above.
  """
  content = util.decode_text(content)
  root = ConfigNode("", is_section=True)
  current = root
  for line_number, line in _logical_lines(content):
    text = line.strip()
    if not text or text[0] in ";#":
      continue
    m = _INI_SECTION_RE.match(text)
    if m is not None:
      if not m.group(1):
        raise ConfigSyntaxError(line_number, "empty section name")
      current = root.add_child(ConfigNode(m.group(1), is_section=True))
      continue
    m = _INI_INCLUDE_RE.match(text)
    if m is not None:
      current.add_child(ConfigNode(m.group(1), m.group(2).strip()))
      continue
    m = _INI_PAIR_RE.match(text)
    if m is not None:
      current.add_child(ConfigNode(m.group(1), _unquote_ini(m.group(2))))
      continue
    m = _INI_BARE_RE.match(text)
    if m is not None:
      current.add_child(ConfigNode(m.group(1)))
      continue
    raise ConfigSyntaxError(line_number, "not a section, option or include: "
                                         "{!r}".format(text))
  return ConfigTree(root, TreeFormat.INI, source_path)


def _render_ini_leaf(n):
  if n.key in _INI_INCLUDE_KEYS:
    return "{} {}".format(n.key, n.value)
  if n.value is None:
    return n.key
  value = n.value
  if (value != value.strip() or value.endswith("\\")
      or _unquote_ini(value) != value):
    value = '"{}"'.format(value)
  return "{} = {}".format(n.key, value)


def _render_ini(tree, out):
  for c in tree.root.children:
    if c.is_section:
      out.append("[{}]".format(c.key))
      for leaf in c.children:
        out.append(_render_ini_leaf(leaf))
    else:
      out.append(_render_ini_leaf(c))


################################################################################
# Tables

def parse_fstab_table(content, source_path=None):
  # type: (str, Optional[str]) -> ConfigTree
  """
  Parse an fstab-style table.

  Each row becomes a section node keyed by its first column, with leaves
  `file` and `vfstype`, one leaf per mount option (`k=v` options become key
  `k` with value `v`, flags have no value), then `dump` and `passno` when
  present.

  Raises:
    ConfigSyntaxError: for rows with fewer than 4 or more than 6 columns.
  """
  content = util.decode_text(content)
  root = ConfigNode("", is_section=True)
  for line_number, line in enumerate(content.splitlines(), 1):
    text = line.strip()
    if not text or text.startswith("#"):
      continue
    cols = text.split()
    if not 4 <= len(cols) <= 6:
      raise ConfigSyntaxError(line_number, "expected 4 to 6 columns, got "
                                           "{}".format(len(cols)))
    row = root.add_child(ConfigNode(cols[0], is_section=True))
    row.add_child(ConfigNode("file", cols[1]))
    row.add_child(ConfigNode("vfstype", cols[2]))
    for option in cols[3].split(","):
      if not option:
        continue
      if "=" in option:
        k, v = option.split("=", 1)
        row.add_child(ConfigNode(k, v))
      else:
        row.add_child(ConfigNode(option))
    for name, value in zip(("dump", "passno"), cols[4:]):
      row.add_child(ConfigNode(name, value))
  return ConfigTree(root, TreeFormat.FSTAB_TABLE, source_path)


def parse_colon_table(content,  # type: str
                      schema,  # type: Sequence[str]
                      source_path=None,  # type: Optional[str]
                      strict=True  # type: bool
                      ):
  # type: (...) -> ConfigTree
  """
  Parse a colon-separated table such as `/etc/passwd` or `/etc/group`.

  Each row becomes a section node keyed by its first field, with one leaf per
  schema field. Colons beyond the schema's field count stay in the last
  field. Blank lines and `#` comment lines are skipped.

  Args:
    content: Table text.
    schema: Ordered field names, e.g. `PASSWD_SCHEMA`.
    source_path: Path recorded on the returned tree.
    strict: If False, rows with too few fields are skipped with a warning
      instead of raising.

  Raises:
    ValueError: if `schema` is empty.
    ConfigSyntaxError: on a row with too few fields (strict mode).
  """
  if not schema:
    raise ValueError("Empty colon-table schema")
  content = util.decode_text(content)
  root = ConfigNode("", is_section=True)
  for line_number, line in enumerate(content.splitlines(), 1):
    if not line.strip() or line.lstrip().startswith("#"):
      continue
    fields = line.split(":", len(schema) - 1)
    if len(fields) != len(schema):
      message = "expected {} fields, got {}".format(len(schema), len(fields))
      if strict:
        raise ConfigSyntaxError(line_number, message)
      logger.warning("%s line %d skipped: %s", source_path or "<table>",
                     line_number, message)
      continue
    row = root.add_child(ConfigNode(fields[0], is_section=True))
    for name, value in zip(schema, fields):
      row.add_child(ConfigNode(name, value))
  return ConfigTree(root, TreeFormat.COLON_TABLE, source_path)


_SERVICE_PORT_RE = re.compile(r"^(\d+)/([A-Za-z0-9_\-]+)$")


def parse_services(content, source_path=None):
  # type: (str, Optional[str]) -> ConfigTree
  """Parse `/etc/services`: `name port/protocol [aliases...] [# comment]`."""
  content = util.decode_text(content)
  root = ConfigNode("", is_section=True)
  for line_number, line in enumerate(content.splitlines(), 1):
    text = line.split("#", 1)[0].strip()
    if not text:
      continue
    parts = text.split()
    m = _SERVICE_PORT_RE.match(parts[1]) if len(parts) > 1 else None
    if m is None:
      raise ConfigSyntaxError(line_number, "expected 'name port/protocol'")
    row = root.add_child(ConfigNode(parts[0], is_section=True))
    row.add_child(ConfigNode(m.group(2), m.group(1)))
    for alias in parts[2:]:
      row.add_child(ConfigNode("alias", alias))
  return ConfigTree(root, TreeFormat.SERVICES_TABLE, source_path)


################################################################################
# Registry

def format_for(application, file_format=None):
  # type: (str, Optional[str]) -> str
  """Tree format used for `application`, or `file_format` when given."""
  if file_format is not None:
    if file_format not in TreeFormat.ALL:
      raise ValueError("Unknown file format '{}'".format(file_format))
    return file_format
  if application not in APPLICATION_FORMATS:
    raise ValueError("No parser registered for application '{}'".format(
      application))
  return APPLICATION_FORMATS[application]


def parse_content(content, file_format, source_path=None, schema=None):
  # type: (str, str, Optional[str], Optional[Sequence[str]]) -> ConfigTree
  """Parse `content` with the parser for `file_format`."""
  if file_format == TreeFormat.HTTPD:
    return parse_httpd(content, source_path)
  elif file_format == TreeFormat.NGINX:
    return parse_nginx(content, source_path)
  elif file_format == TreeFormat.INI:
    return parse_ini(content, source_path)
  elif file_format == TreeFormat.FSTAB_TABLE:
    return parse_fstab_table(content, source_path)
  elif file_format == TreeFormat.COLON_TABLE:
    if schema is None:
      raise ValueError("colon_table parsing needs a schema")
    return parse_colon_table(content, schema, source_path)
  elif file_format == TreeFormat.SERVICES_TABLE:
    return parse_services(content, source_path)
  raise ValueError("Unknown file format '{}'".format(file_format))


def parse_file(application, content, source_path=None, file_format=None):
  # type: (str, str, Optional[str], Optional[str]) -> ConfigTree
  """Parse a labeled configuration file of `application`."""
  return parse_content(content, format_for(application, file_format),
                       source_path, _COLON_SCHEMAS.get(application))


def syntax_check(application, content, file_format=None):
  # type: (str, str, Optional[str]) -> bool
  """True if `content` parses as a configuration file of `application`."""
  try:
    parse_file(application, content, file_format=file_format)
  except ConfigSyntaxError as e:
    logger.debug("Syntax check for %s failed: %s", application, e)
    return False
  return True


def render_tree(tree):
  # type: (ConfigTree) -> str
  """
  Render a pre-disambiguation httpd, nginx or INI tree back to source text.

  Comments and original spacing are not kept; parsing the result yields a
  tree equal to `tree`.
  """
  out = []
  if tree.format == TreeFormat.HTTPD:
    _render_httpd(tree.root, 0, out)
  elif tree.format == TreeFormat.NGINX:
    _render_nginx(tree.root, 0, out)
  elif tree.format == TreeFormat.INI:
    _render_ini(tree, out)
  else:
    raise ValueError("Cannot render trees of format '{}'".format(tree.format))
  return "".join(l + "\n" for l in out)
