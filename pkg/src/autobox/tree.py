"""Versioned parse trees.

Every structural or textual field of a node is an append-only log of
(version, value) pairs, so the tree can be read as of any retained
version: heuristics inspect the structure from just before the current
parse ran, and undo reverts whole keypress units by popping log entries.

A Tree owns one document in one language.  Its frontier (BOS, the token
and box leaves, EOS) is mirrored in a plain list with a prefix-sum
offset table for O(log n) offset lookups; the mirror is rebuilt whenever
leaves change and after every revert.
"""

import bisect
import itertools

from .errors import EditRangeError

KIND_NT = "nt"
KIND_TOKEN = "token"
KIND_LBOX = "lbox"

BOS_TYPE = "$bos"
EOS_TYPE = "$eos"
ROOT_TYPE = "Root"

UNCOMMITTED = "uncommitted"
COMMITTED = "committed"

_ids = itertools.count(1)


class Clock:
    """Monotonic version counter shared by every tree in a session."""

    def __init__(self):
        self.version = 0

    def bump(self):
        self.version += 1
        return self.version


def _log_read(log, v):
    # Logs are short except on hot nodes; binary search keeps both fine.
    if not log:
        return None, False
    last = log[-1]
    if last[0] <= v:
        return last[1], True
    i = bisect.bisect_right(log, (v, _HI)) - 1
    if i < 0:
        return None, False
    return log[i][1], True


class _Hi:
    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return True


_HI = _Hi()


class Node:
    """A parse-tree node: nonterminal, token, or language box.

    Tokens have mutable (versioned) type and value and no children; a
    box is a terminal to its owning tree whose value is its inner tree's
    text.  noinsert is deliberately unversioned: it must survive undo.
    """

    __slots__ = ("id", "kind", "tree", "_type", "_value", "_children",
                 "_parent", "_error", "_isolated", "_box_state",
                 "lookahead", "noinsert", "changed", "pre_state", "box")

    def __init__(self, kind, type_, tree, value=None):
        self.id = next(_ids)
        self.kind = kind
        self.tree = tree
        self._type = []
        self._value = []
        self._children = []
        self._parent = []
        self._error = []
        self._isolated = []
        self._box_state = []
        self.lookahead = 0
        self.noinsert = False
        self.changed = False
        self.pre_state = None
        self.box = None
        v = tree.clock.version
        tree._append(self, "_type", v, type_)
        if kind == KIND_TOKEN:
            tree._append(self, "_value", v, value if value is not None else "")

    # -- versioned reads ----------------------------------------------------

    def type_at(self, v):
        return _log_read(self._type, v)[0]

    @property
    def type(self):
        return self._type[-1][1] if self._type else None

    def value_at(self, v):
        if self.kind == KIND_LBOX:
            return self.box.inner.text
        return _log_read(self._value, v)[0] or ""

    @property
    def value(self):
        if self.kind == KIND_LBOX:
            return self.box.inner.text
        return self._value[-1][1] if self._value else ""

    def children_at(self, v):
        return _log_read(self._children, v)[0] or ()

    @property
    def children(self):
        return self._children[-1][1] if self._children else ()

    def parent_at(self, v):
        return _log_read(self._parent, v)[0]

    @property
    def parent(self):
        return self._parent[-1][1] if self._parent else None

    def error_at(self, v):
        return bool(_log_read(self._error, v)[0])

    @property
    def error(self):
        return bool(self._error[-1][1]) if self._error else False

    @property
    def isolated(self):
        return bool(self._isolated[-1][1]) if self._isolated else False

    @property
    def box_state(self):
        return self._box_state[-1][1] if self._box_state else None

    def is_terminal(self):
        return self.kind != KIND_NT

    def is_sentinel(self):
        return self.type in (BOS_TYPE, EOS_TYPE)

    # -- traversal ----------------------------------------------------------

    def next_terminal(self):
        """Next leaf in the current frontier; None past EOS."""
        return self.tree.neighbour(self, +1)

    def prev_terminal(self):
        """Previous leaf in the current frontier; None before BOS."""
        return self.tree.neighbour(self, -1)

    def preorder_next(self, v):
        """Preorder successor at version v (first child, else up-right)."""
        kids = self.children_at(v)
        if kids:
            return kids[0]
        return self.skip_subtree_next(v)

    def skip_subtree_next(self, v):
        """Successor at version v ignoring this node's own subtree."""
        node = self
        while node is not None:
            parent = node.parent_at(v)
            if parent is None:
                return None
            sibs = parent.children_at(v)
            try:
                i = sibs.index(node)
            except ValueError:
                return None
            if i + 1 < len(sibs):
                return sibs[i + 1]
            node = parent
        return None

    def ancestors_at(self, v):
        node = self.parent_at(v)
        while node is not None:
            yield node
            node = node.parent_at(v)

    def __repr__(self):
        if self.kind == KIND_NT:
            return "<nt %s #%d>" % (self.type, self.id)
        return "<%s %s %r #%d>" % (self.kind, self.type, self.value[:20], self.id)


class Tree:
    """One document in one language, with full version history."""

    def __init__(self, lang, clock=None):
        self.lang = lang
        self.clock = clock or Clock()
        self.text = ""
        self.touch_log = []
        self.error_set = set()
        self.isolated_set = set()
        self.root = Node(KIND_NT, ROOT_TYPE, self)
        self.bos = Node(KIND_TOKEN, BOS_TYPE, self, "")
        self.eos = Node(KIND_TOKEN, EOS_TYPE, self, "")
        self.set_children(self.root, (self.bos, self.eos))
        self.frontier = [self.bos, self.eos]
        self._findex = {self.bos.id: 0, self.eos.id: 1}
        self._offsets = [0, 0]
        self._offsets_dirty = False

    # -- journaled writes ---------------------------------------------------

    def _append(self, node, field, v, value):
        log = getattr(node, field)
        if log and log[-1][0] == v:
            log[-1] = (v, value)
        else:
            log.append((v, value))
            self.touch_log.append((v, node, field))

    def write(self, node, field, value):
        self._append(node, field, self.clock.version, value)

    def set_children(self, node, children):
        self.write(node, "_children", tuple(children))
        for c in children:
            self.write(c, "_parent", node)

    def set_error(self, node, flag):
        if node.error != flag:
            self.write(node, "_error", flag)
        if flag:
            self.error_set.add(node)
        else:
            self.error_set.discard(node)

    def set_isolated(self, node, flag):
        if node.isolated != flag:
            self.write(node, "_isolated", flag)
        if flag:
            self.isolated_set.add(node)
        else:
            self.isolated_set.discard(node)

    # -- frontier -----------------------------------------------------------

    def tokens(self):
        return self.frontier[1:-1]

    def refresh_frontier(self, leaves=None):
        """Replace the frontier mirror (sentinels included)."""
        if leaves is None:
            leaves = [n for n in self.preorder() if n.kind != KIND_NT]
        self.frontier = leaves
        self._findex = {n.id: i for i, n in enumerate(leaves)}
        self._box_leaves = [n for n in leaves if n.kind == KIND_LBOX]
        self._offsets_dirty = True

    def box_leaves(self):
        return self._box_leaves

    def mark_offsets_dirty(self):
        self._offsets_dirty = True

    def _refresh_offsets(self):
        offs = []
        pos = 0
        for n in self.frontier:
            offs.append(pos)
            pos += len(n.value)
        self._offsets = offs
        self._offsets_dirty = False

    def index_of(self, node):
        return self._findex.get(node.id)

    def offset_of(self, node):
        if self._offsets_dirty:
            self._refresh_offsets()
        return self._offsets[self._findex[node.id]]

    def end_of(self, node):
        return self.offset_of(node) + len(node.value)

    def neighbour(self, node, step):
        i = self._findex.get(node.id)
        if i is None:
            return None
        j = i + step
        if 0 <= j < len(self.frontier):
            return self.frontier[j]
        return None

    def token_at(self, pos):
        """The leaf whose span contains pos (first leaf with end > pos)."""
        if self._offsets_dirty:
            self._refresh_offsets()
        if pos < 0 or pos > len(self.text):
            raise EditRangeError("position %d out of range" % pos)
        i = bisect.bisect_right(self._offsets, pos) - 1
        # Zero-width leaves share an offset; find one that actually covers pos.
        while i < len(self.frontier) - 1 and self._offsets[i] + len(self.frontier[i].value) <= pos:
            i += 1
        return self.frontier[i]

    def preorder(self, v=None):
        if v is None:
            v = self.clock.version
        out = []
        stack = [self.root]
        while stack:
            n = stack.pop()
            out.append(n)
            kids = n.children_at(v)
            if kids:
                stack.extend(reversed(kids))
        return out

    def frontier_text(self, v=None):
        if v is None:
            return "".join(n.value for n in self.frontier)
        return "".join(n.value_at(v) for n in self.preorder(v) if n.kind != KIND_NT)

    # -- undo ---------------------------------------------------------------

    def revert_to(self, v):
        """Discard every write after version v and rebuild mirrors."""
        log = self.touch_log
        while log and log[-1][0] > v:
            _, node, field = log.pop()
            getattr(node, field).pop()
        self.refresh_frontier()
        self.text = "".join(n.value for n in self.frontier)
        self.error_set = {n for n in self.preorder() if n.error}
        self.isolated_set = {n for n in self.preorder() if n.kind == KIND_NT and n.isolated}

    def boxes(self):
        return [n for n in self.frontier if n.kind == KIND_LBOX]
