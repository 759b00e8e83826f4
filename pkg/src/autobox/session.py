"""Editor sessions: one document, its trees-of-trees, and the per-keypress
pipeline.

Each edit is routed to the innermost box containing it, re-lexed and
reparsed there, and then the disambiguation pipeline runs: insertion
candidates at fresh syntax errors, then removal rules, then edge resizing.
At most one tree mutation is applied per keypress; several surviving
choices are presented instead of applied.  A keypress and the automatic
mutation it triggered form a single undo unit.
"""

import itertools

from .errors import EditRangeError, StaleCandidateError, AutoboxError
from .tree import Tree, Clock, KIND_LBOX, UNCOMMITTED, COMMITTED
from .incremental import apply_edit, incremental_parse
from .boxes import (insert_box, remove_box, resize_box, boxes_in, all_boxes,
                    commit_on_cursor_exit, RecogniserStats, AUTOMATIC, MANUAL,
                    Candidate, recreate_parsing_stack)
from .heuristics import (AutoboxConfig, Decision, consider, cnds_parse_tree,
                         cnds_stack, cnds_line, combine_all, resolve_stacks,
                         decide, auto_remove, auto_resize)

_box_ids = itertools.count(1)


class Session:
    """A single editing session over one composition."""

    def __init__(self, composition, config=None):
        self.comp = composition
        self.cfg = config or AutoboxConfig()
        self.clock = Clock()
        self.outer = Tree(composition.outer, self.clock)
        incremental_parse(self.outer)
        self.cursor = 0
        self.last_decision = Decision(Decision.NONE)
        self.pending = None
        self.undo_units = []
        self.stats = RecogniserStats()
        self.search_count = 0

    # -- document access ------------------------------------------------------

    @property
    def text(self):
        return self.outer.text

    def load(self, text):
        """Bulk-load a base document; parses but runs no disambiguation."""
        apply_edit(self.outer, 0, len(self.outer.text), text)
        out = incremental_parse(self.outer)
        self.undo_units.clear()
        return out

    def locate(self, pos, span=0):
        """(tree, base) owning [pos, pos+span): innermost box strictly
        containing pos; spans may touch but not cross box boundaries."""
        tree = self.outer
        base = 0
        while True:
            inner = None
            for box in boxes_in(tree):
                s = base + box.start()
                e = base + box.end()
                if s < pos < e:
                    if pos + span > e:
                        raise EditRangeError("edit crosses a language-box boundary")
                    inner = (box.inner, s)
                    break
            if inner is None:
                for box in boxes_in(tree):
                    s = base + box.start()
                    if pos <= s < pos + span:
                        raise EditRangeError("edit crosses a language-box boundary")
                return tree, base
            tree, base = inner

    # -- the keypress pipeline -------------------------------------------------

    def key(self, ch):
        """Type ch at the cursor and run the full pipeline."""
        return self.edit(self.cursor, 0, ch)

    def edit(self, pos, del_len, insert):
        if self.cursor != pos:
            commit_on_cursor_exit(self.outer, self.cursor, pos)
        start_version = self.clock.version
        self.pending = None
        tree, base = self.locate(pos, del_len)
        apply_edit(tree, pos - base, del_len, insert)
        outcome = incremental_parse(tree)
        self._dirty_hosts(tree)
        decision = self._autobox(tree, base, outcome)
        self.cursor = pos + len(insert)
        self.last_decision = decision
        self.undo_units.append({
            "version": start_version,
            "cursor": pos,
            "trigger": decision.trigger if decision.kind == Decision.INSERT else None,
        })
        return decision

    def move(self, pos):
        if pos < 0 or pos > len(self.text):
            raise EditRangeError("cursor position %d out of range" % pos)
        commit_on_cursor_exit(self.outer, self.cursor, pos)
        self.cursor = pos

    def undo(self):
        """Revert the last keypress unit (including any automatic box work).

        Undoing a unit that auto-inserted a box flags its trigger node so
        the same error never re-inserts one.
        """
        if not self.undo_units:
            raise AutoboxError("nothing to undo")
        unit = self.undo_units.pop()
        # Deepest trees first so box values are right when hosts rebuild.
        trees = [b.inner for b in reversed(all_boxes(self.outer))] + [self.outer]
        for t in trees:
            t.revert_to(unit["version"])
        trigger = unit["trigger"]
        if trigger is not None:
            trigger.noinsert = True
        self.cursor = unit["cursor"]
        self.pending = None
        self.last_decision = Decision(Decision.NONE)
        self._dirty_hosts(self.outer)
        self.outer.text = self.outer.frontier_text()
        return unit["version"]

    def choose(self, cand_id):
        """Apply one option from the last present/present_resize decision."""
        if self.pending is None:
            raise StaleCandidateError("no candidates to choose from")
        mode, payload = self.pending
        start_version = self.clock.version
        if mode == "insert":
            by_id = {i: c for i, c in payload}
            if cand_id not in by_id:
                raise StaleCandidateError("unknown candidate id %d" % cand_id)
            cand = by_id[cand_id]
            if cand.version != cand.tree.clock.version:
                raise StaleCandidateError("document changed since candidates were computed")
            box = insert_box(cand.tree, cand, AUTOMATIC, trigger=self.last_decision.trigger)
            self._register(box)
            incremental_parse(cand.tree)
            self._dirty_hosts(cand.tree)
            self.undo_units.append({"version": start_version, "cursor": self.cursor,
                                    "trigger": self.last_decision.trigger})
        else:
            box, extents = payload
            by_id = dict(extents)
            if cand_id not in by_id:
                raise StaleCandidateError("unknown extent id %d" % cand_id)
            host = box.node.tree
            resize_box(host, box, by_id[cand_id])
            incremental_parse(host)
            self._dirty_hosts(host)
            self.undo_units.append({"version": start_version, "cursor": self.cursor,
                                    "trigger": None})
        self.pending = None
        self.last_decision = Decision(Decision.NONE)

    def insert_manual_box(self, start_off, end_off, lang_id):
        """Wrap [start_off, end_off) in a box of lang_id (user command)."""
        tree, base = self.locate(start_off, end_off - start_off)
        lang = self.comp.languages[lang_id]
        sym = next((s for s, l in self.comp.members_of(tree.lang)
                    if l.name == lang_id), None)
        if sym is None:
            raise AutoboxError("%s has no box symbol for %s" % (tree.lang.name, lang_id))
        start_version = self.clock.version
        local = start_off - base
        leaf = tree.token_at(local) if local < len(tree.text) else None
        stack = recreate_parsing_stack(tree, leaf, tree.clock.version) \
            if leaf is not None else [0]
        cand = Candidate(leaf, local, end_off - base, lang, sym, "manual",
                         stack or [0], tree.clock.version, tree)
        box = insert_box(tree, cand, MANUAL)
        self._register(box)
        incremental_parse(tree)
        self._dirty_hosts(tree)
        self.undo_units.append({"version": start_version, "cursor": self.cursor,
                                "trigger": None})
        return box

    def mark_uncommitted(self, box_id):
        box = self.box_by_id(box_id)
        if box is None:
            raise AutoboxError("no box with id %d" % box_id)
        box.node.tree.write(box.node, "_box_state", UNCOMMITTED)

    # -- pipeline internals ----------------------------------------------------

    def _autobox(self, tree, base, outcome):
        decision = self._insertion_pass(tree, outcome)
        if decision.kind == Decision.INSERT:
            cand = decision.candidates[0]
            box = insert_box(tree, cand, AUTOMATIC, trigger=decision.trigger)
            self._register(box)
            incremental_parse(tree)
            self._dirty_hosts(tree)
            return decision
        if decision.kind == Decision.PRESENT:
            ids = list(enumerate(decision.candidates, start=1))
            self.pending = ("insert", ids)
            return decision
        removals = auto_remove(self.outer, self.comp, self.cfg)
        if removals:
            for d in removals:
                host = d.box.node.tree
                remove_box(host, d.box)
                incremental_parse(host)
                self._dirty_hosts(host)
            return removals[0]
        resizes = auto_resize(self.outer, self.comp, self.cfg, self.stats)
        for d in resizes:
            if d.kind == Decision.RESIZE:
                host = d.box.node.tree
                resize_box(host, d.box, d.new_end)
                incremental_parse(host)
                self._dirty_hosts(host)
                return d
            ids = list(enumerate(d.extents, start=1))
            self.pending = ("resize", (d.box, ids))
            return d
        return decision

    def _insertion_pass(self, tree, outcome):
        triggers = consider(outcome)
        members = self.comp.members_of(tree.lang)
        if not triggers or not members:
            return Decision(Decision.NONE)
        self.search_count += 1
        v = tree.clock.version - 1
        cfg = self.cfg
        cands = []
        for t in triggers:
            if "parse_tree" in cfg.active:
                cands.extend(cnds_parse_tree(tree, t, v, members, self.comp,
                                             cfg, self.stats))
            if "stack" in cfg.active:
                pairs = outcome.error_stacks.get(t.id, [])
                cands.extend(cnds_stack(tree, pairs, members, self.comp,
                                        cfg, self.stats))
            if "line" in cfg.active:
                cands.extend(cnds_line(tree, t, v, members, self.comp,
                                       cfg, self.stats))
        cands = resolve_stacks(tree, cands, v)
        survivors = combine_all(tree, cands, cfg)
        return decide(tree, survivors, triggers[0])

    def _dirty_hosts(self, tree):
        # Inner edits change box widths: host text mirrors and offsets of
        # every enclosing tree go stale.  Sync bottom-up so box values
        # (inner texts) are fresh when hosts re-join their frontiers.
        def sync(t):
            for box in boxes_in(t):
                sync(box.inner)
            t.text = t.frontier_text()
            t.mark_offsets_dirty()

        sync(self.outer)

    def _register(self, box):
        box.id = next(_box_ids)
        return box

    # -- state reporting --------------------------------------------------------

    def box_by_id(self, box_id):
        for box in all_boxes(self.outer):
            if getattr(box, "id", None) == box_id:
                return box
        return None

    def box_list(self):
        out = []

        def walk(tree, b):
            for box in boxes_in(tree):
                s = b + box.start()
                e = b + box.end()
                if not hasattr(box, "id"):
                    self._register(box)
                out.append({"id": box.id, "start": s, "end": e,
                            "lang": box.lang.name, "state": box.state})
                walk(box.inner, s)

        walk(self.outer, 0)
        return out

    def error_list(self):
        out = []

        def walk(tree, b):
            for n in tree.error_set:
                if tree.index_of(n) is not None:
                    out.append(b + tree.offset_of(n))
                elif n.kind == "nt":
                    # Isolated regions carry the mark for their whole span.
                    leaf = next((c for c in n.children
                                 if tree.index_of(c) is not None), None)
                    if leaf is not None:
                        out.append(b + tree.offset_of(leaf))
            for box in boxes_in(tree):
                walk(box.inner, b + box.start())

        walk(self.outer, 0)
        return [{"pos": p} for p in sorted(out)]

    def candidate_list(self):
        if self.pending is None:
            return []
        mode, payload = self.pending
        out = []
        if mode == "insert":
            for i, c in payload:
                b = self._base_of(c.tree)
                out.append({"id": i, "start": b + c.start_offset,
                            "end": b + c.end_offset, "lang": c.lang.name})
        else:
            box, extents = payload
            b = self._base_of(box.node.tree)
            for i, e in extents:
                out.append({"id": i, "start": b + box.start(),
                            "end": b + e, "lang": box.lang.name})
        return out

    def _base_of(self, tree):
        def find(t, b):
            if t is tree:
                return b
            for box in boxes_in(t):
                r = find(box.inner, b + box.start())
                if r is not None:
                    return r
            return None
        r = find(self.outer, 0)
        return 0 if r is None else r

    def snapshot(self):
        return {
            "type": "state",
            "text": self.text,
            "boxes": self.box_list(),
            "errors": self.error_list(),
            "candidates": self.candidate_list(),
        }
