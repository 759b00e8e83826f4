"""Incremental lexing and LR parsing over versioned trees.

Editing model per keystroke: apply_edit splices the text mirror, re-lexes
the damaged neighbourhood (extended left through recorded lookaheads and
right until the token stream re-synchronises with the old one), and marks
the path from every touched token to the root.  incremental_parse then
re-derives structure, shifting undamaged subtrees wholesale through the
goto table and descending only where change marks or context mismatches
force it.

Errors are isolated: when the parse fails at a token, the innermost
enclosing user nonterminal (as of the pre-parse version) is flattened to
its current tokens and marked opaque, and the parse restarts; opaque
regions shift by their old type and are never re-inspected until a later
edit lands inside them.  That containment is what lets the consideration
logic treat every reported error as new.
"""

from collections import deque

from .errors import EditRangeError
from .grammar import GrammarSpec, ERROR_TYPE
from .lalr import END, SHIFT, REDUCE, ACCEPT, StackSim
from .tree import Node, KIND_NT, KIND_TOKEN, KIND_LBOX


class ParseOutcome:
    """Result of one incremental parse.

    error_nodes lists terminals newly marked during this parse, in
    document order; error_stacks maps node id -> the (state, node) parse
    stack captured at the moment that error was found.  accepted is true
    iff the whole tree is currently error-free.
    """

    def __init__(self):
        self.accepted = False
        self.error_nodes = []
        self.error_stacks = {}
        self.stack = []
        self.shifted_terminals = 0

    def __repr__(self):
        return "ParseOutcome(accepted=%s, errors=%d)" % (
            self.accepted, len(self.error_nodes))


def apply_edit(tree, pos, del_len, insert):
    """Splice text into the document and re-lex the damaged region."""
    if pos < 0 or pos > len(tree.text):
        raise EditRangeError("edit position %d outside document of length %d"
                             % (pos, len(tree.text)))
    if del_len < 0 or pos + del_len > len(tree.text):
        raise EditRangeError("deletion of %d at %d overruns document" % (del_len, pos))
    v = tree.clock.bump()
    relex(tree, pos, del_len, insert)
    return v


def relex(tree, pos, del_len, insert):
    """Re-lex around a splice; returns the set of changed/created tokens.

    The damaged region starts at the leftmost token whose recorded
    lookahead reaches the splice and ends where freshly lexed tokens
    realign with the old stream (a box leaf is a hard boundary on both
    sides).  Token nodes are reused in order across the replaced range so
    flags tied to node identity survive retyping.
    """
    lexer = tree.lang.lexer
    front = tree.frontier
    eos_idx = len(front) - 1
    old_starts = [tree.offset_of(n) for n in front]

    new_text = tree.text[:pos] + insert + tree.text[pos + del_len:]
    delta = len(insert) - del_len
    splice_old_end = pos + del_len
    splice_new_end = pos + len(insert)
    tree.text = new_text

    # Leftmost leaf that could see the splice.
    i = eos_idx
    for k in range(1, eos_idx):
        if old_starts[k] + len(front[k].value) > pos:
            i = k
            break
    while i > 1 and front[i - 1].kind != KIND_LBOX and \
            old_starts[i - 1] + len(front[i - 1].value) + front[i - 1].lookahead > pos:
        i -= 1
    if i < eos_idx and front[i].kind == KIND_LBOX:
        raise EditRangeError("edit crosses a language-box boundary")

    # Window ends at the next box leaf (or EOS).
    limit_idx = eos_idx
    for k in range(i, eos_idx):
        if front[k].kind == KIND_LBOX:
            limit_idx = k
            break
    endpos = (old_starts[limit_idx] + delta) if limit_idx != eos_idx else len(new_text)
    start_off = old_starts[i] if i < eos_idx else pos
    start_off = min(start_off, pos)

    new_toks = []
    sync_idx = None
    o = start_off
    k = i
    while o < endpos:
        tok = lexer.lex_at(new_text, o, endpos)
        if o >= splice_new_end:
            while k < limit_idx and old_starts[k] < splice_old_end:
                k += 1
            while k < limit_idx and old_starts[k] + delta < o:
                k += 1
            if (k < limit_idx and old_starts[k] + delta == o
                    and front[k].type == tok.type and front[k].value == tok.value):
                sync_idx = k
                break
        new_toks.append(tok)
        o = tok.end

    replaced_upto = sync_idx if sync_idx is not None else limit_idx
    old_replaced = front[i:replaced_upto]

    changed = set()
    reused = []
    m = min(len(old_replaced), len(new_toks))
    for idx in range(m):
        node = old_replaced[idx]
        lt = new_toks[idx]
        if node.type != lt.type or node.value != lt.value:
            if node.type != lt.type:
                tree.write(node, "_type", lt.type)
            if node.value != lt.value:
                tree.write(node, "_value", lt.value)
            changed.add(node)
        node.lookahead = lt.lookahead
        reused.append(node)

    fresh = []
    for lt in new_toks[m:]:
        n = Node(KIND_TOKEN, lt.type, tree, lt.value)
        n.lookahead = lt.lookahead
        fresh.append(n)
        changed.add(n)

    dead = old_replaced[m:]
    for n in dead:
        tree.error_set.discard(n)

    # Detach dead leaves from their (current) parents.
    if dead:
        dead_ids = {n.id for n in dead}
        by_parent = {}
        for n in dead:
            p = n.parent
            if p is not None:
                by_parent.setdefault(p.id, (p, []))[1].append(n)
        for p, _nodes in by_parent.values():
            tree.set_children(p, tuple(c for c in p.children if c.id not in dead_ids))
            p.changed = True
            changed_parent_walk(tree, p)

    # Attach fresh leaves next to their left neighbour.
    if fresh:
        anchor = reused[-1] if reused else front[i - 1]
        parent = anchor.parent
        kids = list(parent.children)
        at = kids.index(anchor) + 1
        kids[at:at] = fresh
        tree.set_children(parent, tuple(kids))

    for n in changed:
        n.changed = True
        changed_parent_walk(tree, n)

    tree.refresh_frontier(front[:i] + reused + fresh + front[replaced_upto:])
    return changed


def changed_parent_walk(tree, node):
    """Mark node's ancestor path changed, re-opening isolation regions."""
    p = node.parent
    while p is not None:
        if p.isolated:
            tree.set_isolated(p, False)
            if p.error:
                tree.set_error(p, False)
        elif p.changed:
            break
        p.changed = True
        p = p.parent


class _Restart(Exception):
    pass


class _StopPass(Exception):
    pass


def incremental_parse(tree):
    """Reparse subtrees with changes in them; see module docstring."""
    return _ParsePass(tree).run()


class _ParsePass:
    def __init__(self, tree):
        self.tree = tree
        self.tables = tree.lang.tables
        self.outcome = ParseOutcome()
        self.seen_errors = set()

    def run(self):
        tree = self.tree
        self.v = tree.clock.bump()
        self.vlex = self.v - 1
        self.broken_opaques = set()
        if tree.root.isolated and not tree.root.changed:
            self.outcome.accepted = False
            return self.outcome
        for _ in range(64):
            self._mark = len(tree.touch_log)
            try:
                self._attempt()
                break
            except _Restart:
                # The aborted attempt re-parented nodes into structure that
                # will never be attached; undo everything it wrote, then
                # apply the isolation that fired, on the clean state.
                self._rollback(self._mark)
                err, anc = self._pending
                if err is not None:
                    tree.set_error(err, True)
                self._isolate(anc)
                continue
            except _StopPass:
                break
        else:
            self._flatten_root()
        self.outcome.accepted = not tree.error_set
        self.outcome.stack = list(zip(self.states, self.nodes))
        return self.outcome

    def _rollback(self, mark):
        tree = self.tree
        log = tree.touch_log
        while len(log) > mark:
            _, node, field = log.pop()
            getattr(node, field).pop()
            if field == "_error":
                (tree.error_set.add if node.error
                 else tree.error_set.discard)(node)
            elif field == "_isolated":
                (tree.isolated_set.add if node.isolated
                 else tree.isolated_set.discard)(node)

    # -- one traversal ------------------------------------------------------

    def _attempt(self):
        tree = self.tree
        self.states = [0]
        self.nodes = [None]
        self.reused = [False]
        self.q = q = deque()
        for c in tree.root.children_at(self.vlex):
            if c is not tree.bos:
                q.append(c)
        while q:
            node = q.popleft()
            if node.kind != KIND_NT:
                if node is tree.eos:
                    if self._finish():
                        return
                    continue   # recovery re-queued input; keep consuming
                self._feed(node)
            elif node.isolated and not node.changed:
                self._shift_opaque(node)
            elif node.changed or node.isolated:
                if node.isolated:
                    tree.set_isolated(node, False)
                    if node.error:
                        tree.set_error(node, False)
                q.extendleft(reversed(node.children_at(self.vlex)))
            else:
                self._shift_subtree(node)
        raise AssertionError("EOS never reached")

    def _shift_subtree(self, node):
        la = self._leftmost_terminal(node, self.vlex)
        if la is None:
            return   # empty subtree: reductions re-derive it
        s = self._goto_for(node.type, la.type)
        if s is None:
            self.q.extendleft(reversed(node.children_at(self.vlex)))
            return
        node.pre_state = self.states[-1]
        self._push(s, node, True)

    def _shift_opaque(self, node):
        la = self._leftmost_terminal(node, self.v)
        s = self._goto_for(node.type, la.type if la is not None else None)
        if s is None:
            # The surrounding context no longer accepts this region as-is:
            # re-expose it and parse its tokens honestly.  Recovery may
            # re-isolate, but never into this same node again this pass.
            self.broken_opaques.add(node.id)
            self.tree.set_isolated(node, False)
            if node.error:
                self.tree.set_error(node, False)
            self.q.extendleft(reversed(node.children))
            return
        node.pre_state = self.states[-1]
        self._push(s, node, False)

    def _goto_for(self, nt_type, la_type):
        """Make nt_type shiftable, reducing by la_type only as needed.

        Checking goto before every reduction matters: reducing first can
        derive an empty nt_type and strand the real subtree.
        """
        goto = self.tables.goto
        action = self.tables.action
        for _ in range(64):
            s = goto.get((self.states[-1], nt_type))
            if s is not None:
                return s
            if la_type is None:
                return None
            act = action.get((self.states[-1], la_type))
            if act is None or act[0] != REDUCE:
                return None
            self._reduce(act[1])
        return None

    def _feed(self, t):
        action = self.tables.action
        while True:
            act = action.get((self.states[-1], t.type))
            if act is None:
                self._recover(t)
                return
            if act[0] == SHIFT:
                t.pre_state = self.states[-1]
                self._push(act[1], t, False)
                t.changed = False
                if t.error:
                    self.tree.set_error(t, False)
                self.outcome.shifted_terminals += 1
                return
            if act[0] == REDUCE:
                self._reduce(act[1])
            else:
                self._recover(t)
                return

    def _finish(self):
        """Reduce to acceptance at end of input; False if recovery
        re-queued input for the main loop to continue with."""
        tree = self.tree
        action = self.tables.action
        while True:
            act = action.get((self.states[-1], END))
            if act is None:
                self._recover(tree.eos)
                return False
            if act[0] == ACCEPT:
                top = self.nodes[-1]
                tree.set_children(tree.root, (tree.bos, top, tree.eos))
                if tree.eos.error:
                    tree.set_error(tree.eos, False)
                tree.root.changed = False
                return True
            self._reduce(act[1])

    def _push(self, state, node, reused):
        self.states.append(state)
        self.nodes.append(node)
        self.reused.append(reused)

    def _reduce(self, pi):
        lhs, rhs = self.tables.prods[pi]
        k = len(rhs)
        kids = tuple(self.nodes[-k:]) if k else ()
        if k:
            del self.states[-k:]
            del self.nodes[-k:]
            del self.reused[-k:]
        nt = Node(KIND_NT, lhs, self.tree)
        self.tree.set_children(nt, kids)
        nt.pre_state = kids[0].pre_state if kids else self.states[-1]
        s = self.tables.goto[(self.states[-1], lhs)]
        self._push(s, nt, False)

    def _reduces(self, la_type):
        action = self.tables.action
        while True:
            act = action.get((self.states[-1], la_type))
            if act is None:
                return False
            if act[0] == REDUCE:
                self._reduce(act[1])
            else:
                return True

    def _leftmost_terminal(self, node, v):
        stack = [(node, v)]
        while stack:
            n, nv = stack.pop()
            if n.kind != KIND_NT:
                return n
            nv = self.v if n.isolated else nv
            kids = n.children_at(nv)
            # Try children left to right; empty subtrees yield nothing.
            for c in reversed(kids):
                stack.append((c, nv))
        return None

    # -- error recovery -----------------------------------------------------

    def _recover(self, t):
        tree = self.tree
        if self.reused[-1]:
            # Too-greedy subtree reuse at the boundary: unshift and retry
            # at finer granularity.
            node = self.nodes[-1]
            del self.states[-1], self.nodes[-1], self.reused[-1]
            self.q.appendleft(t)
            self.q.extendleft(reversed(node.children_at(self.vlex)))
            return
        if t.id not in self.seen_errors:
            self.seen_errors.add(t.id)
            t.pre_state = self.states[-1]
            self.outcome.error_nodes.append(t)
            # Resolve each entry's following terminal now: nodes built by
            # this attempt will not survive a restart.
            self.outcome.error_stacks[t.id] = [
                (s, n, self._terminal_after(n))
                for s, n in zip(self.states, self.nodes)]
        if t is tree.eos:
            tree.set_error(t, True)
            self._attach_remainder()
            raise _StopPass
        anc = self._isolation_ancestor(t)
        if anc is not None:
            self._pending = (t, anc)
            raise _Restart
        if self._span_isolate(t):
            return
        tree.set_error(t, True)
        self._flatten_root()
        raise _StopPass

    def _terminal_after(self, node):
        """First live frontier leaf after a stack entry's node."""
        tree = self.tree
        if node is None:
            return tree.bos.next_terminal()
        if node.kind != KIND_NT:
            return node.next_terminal()
        last = None
        stack = [node]
        while stack:
            x = stack.pop()
            if x.kind != KIND_NT:
                if tree.index_of(x) is not None:
                    last = x
                    break
                continue
            stack.extend(x.children)     # rightmost-first
        if last is None:
            return None
        return last.next_terminal()

    def _isolation_ancestor(self, t):
        for a in t.ancestors_at(self.vlex):
            if a is self.tree.root:
                return None
            if a.kind != KIND_NT or a.type == GrammarSpec.WS_NT or a.isolated \
                    or a.id in self.broken_opaques:
                continue
            return a
        return None

    def _isolate(self, anc):
        tree = self.tree
        toks = self._live_terminals(anc)
        tree.set_children(anc, tuple(toks))
        tree.set_isolated(anc, True)
        anc.changed = False
        for n in toks:
            n.changed = False

    def _span_isolate(self, t):
        """Wrap a span around the error in an opaque region, in place.

        Used when the pre-parse structure offers no enclosing region to
        revert to (e.g. the first parse of an invalid document).  We look
        for a pop depth d, a goto-shiftable nonterminal N at that depth,
        and a resume token r such that after shifting N the parse
        proceeds at r.  The error token itself is the preferred resume
        point: then the region is just the popped incomplete context (a
        placeholder for what is missing) and the text after the error is
        parsed honestly.  Falling back, tokens from t onward are swallowed
        until some later token resumes.  The claimed node type is a
        fiction, but the region is opaque until an edit lands inside it,
        at which point it is honestly re-parsed.
        """
        tables = self.tables
        gotoable = {}
        for (s, nt2) in tables.goto:
            gotoable.setdefault(s, []).append(nt2)
        is_ws = self.tree.lang.is_whitespace

        def try_fit(resume_type, skipped, consumed, min_pop):
            for d in range(min_pop, len(self.states)):
                s_d = self.states[-1 - d]
                for nt2 in sorted(gotoable.get(s_d, ())):
                    if nt2 == GrammarSpec.WS_NT:
                        continue
                    sim = StackSim(tables, self.states[:len(self.states) - d])
                    if not sim.shift_nonterminal(nt2):
                        continue
                    ok = sim.at_accept() if resume_type == END \
                        else sim.reduce_for(resume_type)
                    if not ok:
                        continue
                    self._apply_span(d, nt2, skipped, consumed,
                                     error_inside=bool(skipped))
                    return True
            return False

        # Best case: resume at the error token itself; the region is the
        # popped, incomplete left context.
        if t.type != ERROR_TYPE and try_fit(t.type, [], 0, min_pop=1):
            self.q.appendleft(t)
            return True

        skipped = [t]
        budget = 64
        while budget > 0:
            resume_type = None
            swallowable = False
            consumed = 0
            for item in self.q:
                if item is self.tree.eos:
                    resume_type = END
                    break
                if item.kind == KIND_NT:
                    la = self._leftmost_terminal(item, self.vlex)
                    if la is not None:
                        resume_type = la.type
                    break
                if is_ws(item.type) or item.type == ERROR_TYPE:
                    consumed += 1
                    continue
                resume_type = item.type
                swallowable = True
                break
            if resume_type is None:
                return False
            if try_fit(resume_type, skipped, consumed, min_pop=0):
                return True
            if not swallowable:
                return False
            for _ in range(consumed + 1):
                skipped.append(self.q.popleft())
            budget -= consumed + 1
        return False

    def _apply_span(self, d, nt_type, skipped, consumed, error_inside):
        tree = self.tree
        region = []
        if d:
            for node in self.nodes[-d:]:
                region.extend(self._live_terminals(node))
            del self.states[-d:], self.nodes[-d:], self.reused[-d:]
        region.extend(skipped)
        for _ in range(consumed):
            region.append(self.q.popleft())
        wrap = Node(KIND_NT, nt_type, tree)
        tree.set_children(wrap, tuple(region))
        tree.set_isolated(wrap, True)
        wrap.pre_state = self.states[-1]
        for n in region:
            n.changed = False
        if error_inside:
            # The error token sits inside the opaque region and keeps the
            # document's error state alive.
            for n in region:
                if n.id in self.seen_errors:
                    tree.set_error(n, True)
        else:
            # Resume-at-error: the region is the incomplete context; it
            # carries the mark itself.
            tree.set_error(wrap, True)
        s = self.tables.goto[(self.states[-1], nt_type)]
        self._push(s, wrap, False)

    def _live_terminals(self, node):
        # Latest structure everywhere: fresh stack nodes only have current
        # children, old subtrees' current children reflect the relex.
        # Interior nonterminals are dying into a flat region, so their
        # isolation/error marks die with them (their tokens keep theirs).
        out = []
        stack = [node]
        while stack:
            n = stack.pop()
            if n.kind != KIND_NT:
                if self.tree.index_of(n) is not None:
                    out.append(n)
                continue
            if n.isolated:
                self.tree.set_isolated(n, False)
            if n.error:
                self.tree.set_error(n, False)
            stack.extend(reversed(n.children))
        return out

    def _attach_remainder(self):
        tree = self.tree
        rest = [n for n in self.nodes[1:] if n is not None]
        tree.set_children(tree.root, tuple([tree.bos] + rest + [tree.eos]))
        tree.root.changed = False

    def _flatten_root(self):
        tree = self.tree
        # Everything below the root dies; marked interior nonterminals
        # must not keep the document's error state alive.
        for n in list(tree.isolated_set):
            tree.set_isolated(n, False)
        for n in list(tree.error_set):
            if n.kind == KIND_NT:
                tree.set_error(n, False)
        toks = [n for n in tree.frontier if n is not tree.bos and n is not tree.eos]
        tree.set_children(tree.root, tuple([tree.bos] + toks + [tree.eos]))
        tree.set_isolated(tree.root, True)
        tree.root.changed = False
        self.states = [0]
        self.nodes = [None]
