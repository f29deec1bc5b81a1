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
"""Tests for confex.tree."""
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import unittest

import confex
from confex.tree import ConfigNode, ConfigTree


def _sample_tree():
  root = ConfigNode("", is_section=True)
  root.add_child(ConfigNode("directive", "ServerRoot",
                            [ConfigNode("arg", "/var/www")]))
  root.add_child(ConfigNode("directive", "Listen", [ConfigNode("arg", "80")]))
  section = root.add_child(ConfigNode(
    "IfModule", children=[ConfigNode("arg", "unixd_module")],
    is_section=True))
  section.add_child(ConfigNode("directive", "User",
                               [ConfigNode("arg", "daemon")]))
  return ConfigTree(root, confex.TreeFormat.HTTPD, "/etc/httpd/httpd.conf")


class TreeTest(unittest.TestCase):

  def setUp(self):
    self.tree = _sample_tree()

  def test_ordinals(self):
    """Test for ConfigNode.ordinal among same-key siblings."""
    ordinals = [(c.key, c.ordinal) for c in self.tree.root.children]
    self.assertEqual(ordinals, [("directive", 1), ("directive", 2),
                                ("IfModule", 1)])

  def test_path(self):
    """Test for ConfigNode.path."""
    user = self.tree.root.children[2].children[1]
    self.assertEqual(user.path(), "/IfModule[1]/directive[1]")
    self.assertEqual(user.children[0].path(),
                     "/IfModule[1]/directive[1]/arg[1]")
    self.assertIs(user.parent, self.tree.root.children[2])

  def test_walk_and_leaves(self):
    """Test for ConfigTree.walk and ConfigTree.leaves."""
    self.assertEqual(len(self.tree), 8)
    self.assertEqual([n.value for n in self.tree.leaves()],
                     ["/var/www", "80", "unixd_module", "daemon"])
    self.assertEqual(self.tree.root.children[0].child_values("arg"),
                     ["/var/www"])

  def test_children_are_read_only(self):
    """Test that children can only change through add_child."""
    with self.assertRaises(TypeError):
      self.tree.root.children[0] = ConfigNode("x")
    n = ConfigNode("x")
    self.tree.root.add_child(n)
    with self.assertRaises(ValueError):
      self.tree.root.add_child(n)
    with self.assertRaises(TypeError):
      ConfigNode(3)
    with self.assertRaises(TypeError):
      ConfigNode("x", 80)

  def test_copy(self):
    """Test for ConfigTree.copy and tree equality."""
    copy = self.tree.copy()
    self.assertEqual(copy, self.tree)
    self.assertIsNot(copy.root, self.tree.root)
    copy.root.add_child(ConfigNode("directive", "Timeout"))
    self.assertNotEqual(copy, self.tree)

  def test_set_children(self):
    """Test for ConfigNode.set_children."""
    section = self.tree.root.children[2]
    old = section.children[0]
    section.set_children([ConfigNode("arg", "a"), ConfigNode("arg", "b")])
    self.assertIsNone(old.parent)
    self.assertEqual([c.ordinal for c in section.children], [1, 2])

  def test_ordinals_after_appends_and_removal(self):
    """Test that ordinals stay sequential across appends and removals."""
    root = ConfigNode("", is_section=True)
    nodes = [root.add_child(ConfigNode("k" if i % 3 else "s", str(i)))
             for i in range(300)]
    self.assertEqual([c.ordinal for c in root.children if c.key == "s"],
                     list(range(1, 101)))
    self.assertEqual(nodes[-1].ordinal, 200)
    root.remove_child(nodes[0])
    root.remove_child(nodes[1])
    self.assertIsNone(nodes[0].parent)
    self.assertEqual([c.ordinal for c in root.children if c.key == "s"],
                     list(range(1, 100)))
    self.assertEqual([c.ordinal for c in root.children if c.key == "k"],
                     list(range(1, 200)))
    tail = root.add_child(ConfigNode("s", "tail"))
    self.assertEqual(tail.ordinal, 100)
    self.assertEqual(tail.path(), "/s[100]")
    with self.assertRaises(ValueError):
      root.remove_child(nodes[0])

  def test_dump(self):
    """Test for confex.dump_tree."""
    expected = ("directive[1] (ServerRoot)\n"
                "  arg[1] (/var/www)\n"
                "directive[2] (Listen)\n"
                "  arg[1] (80)\n"
                "IfModule[1]/\n"
                "  arg[1] (unixd_module)\n"
                "  directive[1] (User)\n"
                "    arg[1] (daemon)\n")
    self.assertEqual(confex.dump_tree(self.tree), expected)
    self.assertEqual(str(self.tree), expected)

  def test_load_dump(self):
    """Test for confex.load_dump."""
    text = confex.dump_tree(self.tree)
    loaded = confex.load_dump(text, confex.TreeFormat.HTTPD)
    self.assertEqual(loaded, self.tree)
    with self.assertRaises(ValueError):
      confex.load_dump("a[1]\n    b[1]\n")
    with self.assertRaises(ValueError):
      confex.load_dump("a[2]\n")
    with self.assertRaises(ValueError):
      confex.load_dump("no ordinal here\n")

  def test_unknown_format(self):
    """Test for the format check of ConfigTree."""
    with self.assertRaises(ValueError):
      ConfigTree(None, "xml")


if __name__ == "__main__":
  unittest.main()
