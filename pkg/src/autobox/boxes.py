"""Language boxes: nested trees, the candidates recogniser, and parse-stack
recreation.

A box is a leaf of its outer tree whose value is the frontier of a
complete inner tree.  Box surgery (insert/remove/resize) always keeps the
outer frontier equal to the outer text by trimming or provisionally
replacing boundary tokens and then re-lexing the boundary region, so the
ordinary relex/reparse machinery absorbs any lexing differences between
the two languages.
"""

from .errors import StaleCandidateError, EditRangeError
from .grammar import ERROR_TYPE
from .lalr import StackSim
from .lexing import LOOKAHEAD
from .incremental import apply_edit, relex, incremental_parse, changed_parent_walk
from .tree import (Node, Tree, KIND_NT, KIND_TOKEN, KIND_LBOX,
                   UNCOMMITTED, COMMITTED)

AUTOMATIC = "automatic"
MANUAL = "manual"

RECOGNISER_CAP = 1000


class LanguageBox:
    """A terminal-from-outside node holding a nested parse tree."""

    def __init__(self, node, inner, lang, origin, trigger=None):
        self.node = node
        self.inner = inner
        self.lang = lang
        self.origin = origin
        self.trigger = trigger

    @property
    def state(self):
        return self.node.box_state

    @property
    def tree(self):
        return self.node.tree

    def start(self):
        return self.node.tree.offset_of(self.node)

    def end(self):
        return self.node.tree.end_of(self.node)

    def __repr__(self):
        return "LanguageBox(%s, [%d,%d), %s)" % (
            self.lang.name, self.start(), self.end(), self.state)


class Candidate:
    """A proposed box: start leaf, end offset, inner language, LR stack.

    stack is the outer parser's state list with everything strictly
    before the start leaf consumed; offsets are tree-local characters.
    """

    __slots__ = ("start", "start_offset", "end_offset", "lang", "sym",
                 "source", "stack", "version", "tree")

    def __init__(self, start, start_offset, end_offset, lang, sym, source,
                 stack, version, tree):
        self.start = start
        self.start_offset = start_offset
        self.end_offset = end_offset
        self.lang = lang
        self.sym = sym
        self.source = source
        self.stack = stack
        self.version = version
        self.tree = tree

    def key(self):
        return (self.start_offset, self.end_offset, self.lang.name)

    def __repr__(self):
        return "Candidate(%s [%d,%d) via %s)" % (
            self.lang.name, self.start_offset, self.end_offset, self.source)


class RecogniserStats:
    """Cap hits are surfaced so pathological scans are visible."""

    def __init__(self):
        self.scans = 0
        self.cap_hits = 0


def box_boundary(tree, from_off, skip=None):
    """Offset of the first box leaf at or after from_off (else text end)."""
    for leaf in tree.frontier:
        if leaf.kind == KIND_LBOX and leaf is not skip:
            off = tree.offset_of(leaf)
            if off >= from_off:
                return off
    return len(tree.text)


def recognise_ends(tree, start_off, lang, comp, limit_off=None, skip=None,
                   cap=RECOGNISER_CAP, stats=None):
    """End offsets of every prefix from start_off valid in lang.

    Grows the scan one token at a time under lang's own lexer, reusing
    the parser state between tokens; records an end at each accepted,
    non-layout point; stops on a parse error at any real token (an error
    at end-of-input just ends the scan), at a box boundary, or at cap.
    """
    if stats is not None:
        stats.scans += 1
    text = tree.text
    if limit_off is None:
        limit_off = box_boundary(tree, start_off, skip)
    sim = StackSim(lang.tables)
    ends = []
    o = start_off
    first = True
    count = 0
    while o < limit_off:
        tok = lang.lexer.lex_at(text, o, limit_off)
        if first:
            if not comp.hint_allows(lang.name, tok.type):
                return []
            first = False
        count += 1
        if count > cap:
            if stats is not None:
                stats.cap_hits += 1
            break
        if not sim.feed(tok.type):
            break
        o = tok.end
        if not lang.is_whitespace(tok.type) and tok.type != ERROR_TYPE \
                and sim.at_accept():
            ends.append(o)
    return ends


def recreate_parsing_stack(tree, target, v):
    """The LR state stack a from-scratch parse has just before target.

    Walks the version-v structure from the root: ancestors of target are
    descended into, everything else is consumed whole through the goto
    table (or broken down when context disagrees).  Returns a state list,
    or None if the context before target does not parse.
    """
    tables = tree.lang.tables
    path = set()
    a = target.parent_at(v)
    while a is not None:
        path.add(a.id)
        a = a.parent_at(v)
    if not path:
        return None
    sim = StackSim(tables)

    def leftmost_terminal(n):
        stack = [n]
        while stack:
            x = stack.pop()
            if x.kind != KIND_NT:
                return x
            stack.extend(reversed(x.children_at(v)))
        return None

    node = tree.root.children_at(v)[0] if tree.root.children_at(v) else None
    while node is not None and node is not target:
        if node.kind != KIND_NT:
            if node.is_sentinel():
                node = node.skip_subtree_next(v)
                continue
            if not sim.feed(node.type_at(v)):
                return None
            node = node.skip_subtree_next(v)
        elif node.id in path:
            kids = node.children_at(v)
            node = kids[0] if kids else node.skip_subtree_next(v)
        else:
            la = leftmost_terminal(node)
            if la is None:
                node = node.skip_subtree_next(v)
                continue
            if node.changed or not sim.shift_nonterminal_for(node.type,
                                                            la.type_at(v)):
                kids = node.children_at(v)
                if kids:
                    node = kids[0]
                    continue
                return None
            node = node.skip_subtree_next(v)
    if node is None:
        return None
    # "Immediately before shifting target": pending reductions keyed by
    # the target's type have already run in a from-scratch parse.
    if not sim.reduce_for(node.type_at(v)):
        return None
    return list(sim.states)


def covered_leaves(tree, start_off, end_off):
    """Leaves starting inside [start_off, end_off), with overhang length."""
    out = []
    overhang = 0
    for leaf in tree.tokens():
        off = tree.offset_of(leaf)
        if off >= end_off:
            break
        if off >= start_off:
            out.append(leaf)
            leaf_end = off + len(leaf.value)
            if leaf_end > end_off:
                overhang = leaf_end - end_off
    return out, overhang


def insert_box(tree, cand, origin=AUTOMATIC, trigger=None):
    """Excise [start, end) into a fresh inner tree behind a box leaf.

    The caller is responsible for reparsing the outer tree afterwards.
    """
    if cand.version != tree.clock.version:
        raise StaleCandidateError("candidate computed at version %d, tree at %d"
                                  % (cand.version, tree.clock.version))
    tree.clock.bump()
    content = tree.text[cand.start_offset:cand.end_offset]
    inner = Tree(cand.lang, tree.clock)
    if content:
        apply_edit(inner, 0, 0, content)
    incremental_parse(inner)

    node = Node(KIND_LBOX, cand.sym, tree)
    node.lookahead = 0
    box = LanguageBox(node, inner, cand.lang, origin, trigger)
    node.box = box
    tree.clock.bump()
    tree.write(node, "_box_state", UNCOMMITTED)

    covered, overhang = covered_leaves(tree, cand.start_offset, cand.end_offset)
    if any(leaf.kind == KIND_LBOX for leaf in covered):
        raise EditRangeError("candidate span overlaps an existing box")
    trimmed = None
    if overhang:
        trimmed = covered.pop()
        tree.write(trimmed, "_value", tree.text[cand.end_offset:
                                                cand.end_offset + overhang])
        trimmed.changed = True
        changed_parent_walk(tree, trimmed)
    if covered:
        _replace_leaves(tree, covered, [node])
    else:
        # Empty span (or a single trimmed leaf): slot the box in by its
        # left neighbour.
        anchor = _leaf_before(tree, cand.start_offset)
        _insert_leaves_after(tree, anchor, [node])
    node.changed = True
    changed_parent_walk(tree, node)
    relex(tree, cand.end_offset, 0, "")
    return box


def remove_box(tree, box):
    """Splice the inner frontier text back into the outer document."""
    tree.clock.bump()
    node = box.node
    content = box.inner.text
    stub = Node(KIND_TOKEN, ERROR_TYPE, tree, content)
    stub.lookahead = LOOKAHEAD
    pos = tree.offset_of(node)
    _replace_leaves(tree, [node], [stub])
    stub.changed = True
    changed_parent_walk(tree, stub)
    relex(tree, pos, 0, "")
    return tree.clock.version


def resize_box(tree, box, new_end):
    """Move the box's right edge to new_end (inner-valid by contract)."""
    tree.clock.bump()
    node = box.node
    start = tree.offset_of(node)
    cur_end = start + len(node.value)
    if new_end > cur_end:
        chunk = tree.text[cur_end:new_end]
        covered, overhang = covered_leaves(tree, cur_end, new_end)
        if any(leaf.kind == KIND_LBOX for leaf in covered):
            raise EditRangeError("resize would swallow another box")
        trimmed = None
        if overhang:
            trimmed = covered.pop()
            tree.write(trimmed, "_value",
                       tree.text[new_end:new_end + overhang])
            trimmed.changed = True
            changed_parent_walk(tree, trimmed)
        if covered:
            _replace_leaves(tree, covered, [])
        apply_edit(box.inner, len(box.inner.text), 0, chunk)
        incremental_parse(box.inner)
    elif new_end < cur_end:
        cut = new_end - start
        chunk = box.inner.text[cut:]
        apply_edit(box.inner, cut, len(chunk), "")
        incremental_parse(box.inner)
        stub = Node(KIND_TOKEN, ERROR_TYPE, tree, chunk)
        stub.lookahead = LOOKAHEAD
        _insert_leaves_after(tree, node, [stub])
        stub.changed = True
        changed_parent_walk(tree, stub)
    node.changed = True
    changed_parent_walk(tree, node)
    tree.mark_offsets_dirty()
    relex(tree, new_end, 0, "")
    return tree.clock.version


def _leaf_before(tree, off):
    """Last frontier leaf ending at or before off (BOS at the far left)."""
    best = tree.bos
    for leaf in tree.frontier[1:-1]:
        if tree.offset_of(leaf) + len(leaf.value) <= off:
            best = leaf
        else:
            break
    return best


def _replace_leaves(tree, old, new):
    """Swap a run of frontier leaves for new ones (structure + mirror)."""
    front = tree.frontier
    if old:
        i = tree.index_of(old[0])
        j = tree.index_of(old[-1]) + 1
    else:
        raise ValueError("nothing to replace")
    anchor = old[0]
    parent = anchor.parent
    kids = list(parent.children)
    at = kids.index(anchor)
    old_ids = {n.id for n in old}
    kids[at:at + 1] = new
    tree.set_children(parent, tuple(c for c in kids if c.id not in old_ids or c in new))
    by_parent = {}
    for n in old[1:]:
        p = n.parent
        if p is not None and p is not parent:
            by_parent.setdefault(p.id, (p, []))[1].append(n)
    for p, _nodes in by_parent.values():
        tree.set_children(p, tuple(c for c in p.children if c.id not in old_ids))
        p.changed = True
        changed_parent_walk(tree, p)
    for n in old:
        tree.error_set.discard(n)
    tree.refresh_frontier(front[:i] + list(new) + front[j:])


def _insert_leaves_after(tree, anchor, new):
    parent = anchor.parent
    kids = list(parent.children)
    at = kids.index(anchor) + 1
    kids[at:at] = new
    tree.set_children(parent, tuple(kids))
    front = tree.frontier
    i = tree.index_of(anchor) + 1
    tree.refresh_frontier(front[:i] + list(new) + front[i:])


def boxes_in(tree):
    """LanguageBox records for every box leaf currently in tree."""
    return [leaf.box for leaf in tree.frontier if leaf.kind == KIND_LBOX]


def all_boxes(tree):
    """Boxes of tree and, recursively, of its boxes' inner trees."""
    out = []
    for box in boxes_in(tree):
        out.append(box)
        out.extend(all_boxes(box.inner))
    return out


def commit_on_cursor_exit(outer_tree, old_cursor, new_cursor):
    """Commit every uncommitted box containing old_cursor but not new_cursor.

    Containment is strict: a cursor sitting exactly on a boundary is
    outside.  Offsets are absolute over the outer tree; nested boxes are
    checked in the coordinates of their own host tree.
    """
    committed = []

    def walk(tree, base):
        for box in boxes_in(tree):
            s = base + box.start()
            e = base + box.end()
            inside_old = s < old_cursor < e
            inside_new = s < new_cursor < e
            if inside_old and not inside_new and box.state == UNCOMMITTED:
                tree.write(box.node, "_box_state", COMMITTED)
                committed.append(box)
            walk(box.inner, s)

    walk(outer_tree, 0)
    return committed
