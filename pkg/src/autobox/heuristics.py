"""Default disambiguation: when to act and which box to insert/remove/resize.

Candidate search runs only at fresh syntax errors.  Three heuristics
propose (start, end, language) spans: walking the error's ancestors in
the pre-parse tree, walking the parse stack captured at the error, and
walking leftwards over the error's line.  Their union is then filtered
(a candidate must leave the first following non-layout token error-free),
ranked by how far the parse gets past the box, and everything short of
the maximal parse point is dropped.

All tentative work here runs on bare state stacks over the text; the
tree is never touched until a Decision is applied.
"""

from .grammar import ERROR_TYPE
from .lalr import StackSim
from .tree import KIND_NT, KIND_LBOX, BOS_TYPE, UNCOMMITTED
from .boxes import (Candidate, recognise_ends, recreate_parsing_stack,
                    boxes_in, all_boxes, RecogniserStats)

DEFAULT_RANK_TOKENS = 10

HEURISTIC_SETS = {
    "all": ("parse_tree", "stack", "line"),
    "parse_tree": ("parse_tree",),
    "stack": ("stack",),
    "line": ("line",),
}


class AutoboxConfig:
    def __init__(self, heuristic="all", rank_tokens=DEFAULT_RANK_TOKENS,
                 recogniser_cap=1000):
        if heuristic not in HEURISTIC_SETS:
            raise ValueError("unknown heuristic %r" % heuristic)
        self.heuristic = heuristic
        self.active = HEURISTIC_SETS[heuristic]
        self.rank_tokens = rank_tokens
        self.recogniser_cap = recogniser_cap


class Decision:
    """What the per-parse pipeline chose to do."""

    NONE = "none"
    INSERT = "insert"
    PRESENT = "present"
    REMOVE = "remove"
    RESIZE = "resize"
    PRESENT_RESIZE = "present_resize"

    def __init__(self, kind, candidates=(), box=None, new_end=None,
                 extents=(), trigger=None):
        if kind == Decision.PRESENT and len(candidates) < 2:
            raise ValueError("present needs at least two candidates")
        if kind == Decision.INSERT and len(candidates) != 1:
            raise ValueError("insert carries exactly one candidate")
        self.kind = kind
        self.candidates = list(candidates)
        self.box = box
        self.new_end = new_end
        self.extents = list(extents)
        self.trigger = trigger

    def __repr__(self):
        return "Decision(%s)" % self.kind


def consider(outcome):
    """Trigger nodes: errors newly marked by this parse, minus noinsert."""
    return [n for n in outcome.error_nodes if not n.noinsert]


# -- candidate heuristics -----------------------------------------------------

def cnds_parse_tree(tree, trigger, v, members, comp, cfg, stats=None):
    """Probe each pre-parse ancestor of the trigger as a box start."""
    cands = []
    node = trigger
    while node is not None:
        pre = node.pre_state
        if pre is not None:
            for sym, lang in members:
                if tree.lang.tables.can_shift_lbox(pre, sym):
                    start = _start_terminal(tree, node, v)
                    if start is not None:
                        _extend(cands, tree, start, lang, sym, "parse_tree",
                                comp, cfg, stats)
        node = node.parent_at(v)
    return cands


def cnds_stack(tree, stack_entries, members, comp, cfg, stats=None):
    """Probe the first terminal after each parse-stack entry, top down.

    Entries are (state, node, following-terminal) triples captured at the
    error; the terminal was resolved then because stack nodes need not
    survive error recovery.
    """
    cands = []
    tables = tree.lang.tables
    states = [s for s, _, _ in stack_entries]
    for i in range(len(stack_entries) - 1, -1, -1):
        state, node, t = stack_entries[i]
        prefix = states[:i + 1]
        for sym, lang in members:
            if not tables.can_shift_lbox(state, sym, prefix):
                continue
            start, lead_ws = _skip_layout(tree, t)
            if start is None:
                continue
            sim = StackSim(tables, list(prefix))
            ok = True
            for w in lead_ws:
                if not sim.feed(w.type):
                    ok = False
                    break
            if not ok:
                continue
            for end in recognise_ends(tree, tree.offset_of(start), lang, comp,
                                      cap=cfg.recogniser_cap, stats=stats):
                cands.append(Candidate(start, tree.offset_of(start), end, lang,
                                       sym, "stack", list(sim.states),
                                       tree.clock.version, tree))
    return cands


def cnds_line(tree, trigger, v, members, comp, cfg, stats=None):
    """Probe every terminal from the trigger back to its line start."""
    cands = []
    node = trigger
    while node is not None and node.type != BOS_TYPE and not _is_newline(tree, node):
        if node.kind != KIND_LBOX and not tree.lang.is_whitespace(node.type) \
                and not node.is_sentinel() and node.pre_state is not None:
            for sym, lang in members:
                if tree.lang.tables.can_shift_lbox(node.pre_state, sym):
                    _extend(cands, tree, node, lang, sym, "line", comp, cfg, stats)
        node = node.prev_terminal()
    return cands


def _extend(cands, tree, start, lang, sym, source, comp, cfg, stats):
    off = tree.offset_of(start)
    for end in recognise_ends(tree, off, lang, comp, cap=cfg.recogniser_cap,
                              stats=stats):
        cands.append(Candidate(start, off, end, lang, sym, source, None,
                               tree.clock.version, tree))


def _start_terminal(tree, node, v):
    """First usable box-start terminal at/under node (layout skipped)."""
    t = node
    if t.kind == KIND_NT:
        stack = [t]
        t = None
        while stack:
            x = stack.pop()
            if x.kind != KIND_NT:
                t = x
                break
            stack.extend(reversed(x.children_at(v)))
    start, _ = _skip_layout(tree, t)
    return start


def _skip_layout(tree, t):
    """Advance over whitespace; returns (start, skipped ws leaves)."""
    ws = []
    while t is not None:
        if t.is_sentinel() or t.kind == KIND_LBOX:
            return None, ws
        if tree.index_of(t) is None:
            return None, ws
        if tree.lang.is_whitespace(t.type):
            ws.append(t)
            t = t.next_terminal()
            continue
        return t, ws
    return None, ws


def _is_newline(tree, node):
    return tree.lang.is_whitespace(node.type) and "\n" in node.value


# -- continuation scans -------------------------------------------------------

class ScanResult:
    __slots__ = ("follow_ok", "first_err", "consumed_to")

    def __init__(self, follow_ok, first_err, consumed_to):
        self.follow_ok = follow_ok
        self.first_err = first_err
        self.consumed_to = consumed_to

    @property
    def horizon(self):
        return self.first_err if self.first_err is not None else self.consumed_to


def outer_token_stream(tree, from_off, dissolve=None):
    """(type, offset, length) over the text from from_off.

    Box leaves are yielded as their symbols and skipped over; a box being
    dissolved is lexed through as plain text instead.
    """
    spans = []
    for leaf in tree.frontier:
        if leaf.kind == KIND_LBOX and leaf is not (dissolve.node if dissolve else None):
            s = tree.offset_of(leaf)
            spans.append((s, s + len(leaf.value), leaf.type))
    text = tree.text
    lexer = tree.lang.lexer
    o = from_off
    si = 0
    while o < len(text):
        while si < len(spans) and spans[si][0] < o:
            si += 1
        if si < len(spans) and spans[si][0] == o:
            s, e, sym = spans[si]
            yield (sym, o, e - o)
            o = e
            si += 1
            continue
        endpos = spans[si][0] if si < len(spans) else len(text)
        tok = lexer.lex_at(text, o, endpos)
        yield (tok.type, o, len(tok.value))
        o = tok.end


def continuation_scan(tree, states, from_off, dissolve=None, token_budget=None,
                      stop_offset=None, content_end=None):
    """Parse forward from a state stack over the remaining text.

    follow_ok reports whether the first non-layout token at/after
    content_end (default from_off) parses; when the stream ends first,
    acceptance at end-of-input stands in for it.  first_err is the
    absolute offset of the first parse error, None if none was hit before
    the scan stopped.
    """
    lang = tree.lang
    sim = StackSim(lang.tables, list(states))
    follow_ok = None
    first_err = None
    consumed_to = from_off
    gate = content_end if content_end is not None else from_off
    fed = 0
    for ttype, off, length in outer_token_stream(tree, from_off, dissolve):
        layout = lang.is_whitespace(ttype)
        ok = sim.feed(ttype)
        if not ok:
            first_err = off
            if follow_ok is None:
                follow_ok = False
            break
        consumed_to = off + length
        fed += 1
        if not layout and off >= gate and follow_ok is None:
            follow_ok = True
        if token_budget is not None and fed >= token_budget:
            return ScanResult(follow_ok, first_err, consumed_to)
        if stop_offset is not None and consumed_to >= stop_offset:
            return ScanResult(follow_ok, first_err, consumed_to)
    else:
        if sim.at_accept():
            consumed_to = len(tree.text) + 1
        else:
            first_err = len(tree.text)
        # No token follows at all: the filter passes vacuously (a box at
        # the end of the file has nothing it could break).
        if follow_ok is None:
            follow_ok = True
    return ScanResult(follow_ok, first_err, consumed_to)


def insertion_scan(tree, cand, token_budget=None, stop_offset=None):
    sim = StackSim(tree.lang.tables, list(cand.stack))
    if not sim.feed(cand.sym):
        return ScanResult(False, cand.start_offset, cand.start_offset)
    return continuation_scan(tree, sim.states, cand.end_offset,
                             token_budget=token_budget, stop_offset=stop_offset)


# -- combining ----------------------------------------------------------------

def span_overlaps_box(tree, start_off, end_off):
    for box in boxes_in(tree):
        s = box.start()
        e = box.end()
        if start_off < e and end_off > s:
            return True
    return False


def combine_all(tree, cands, cfg):
    """Aggregate, filter on the follow token, rank by maximal parse point."""
    uniq = {}
    for c in cands:
        if c.end_offset <= c.start_offset:
            continue
        if c.stack is None:
            continue
        if span_overlaps_box(tree, c.start_offset, c.end_offset):
            continue
        uniq.setdefault(c.key(), c)
    cands = sorted(uniq.values(), key=lambda c: c.key())
    if not cands:
        return []

    survivors = []
    for c in cands:
        res = insertion_scan(tree, c, token_budget=max(cfg.rank_tokens, 1))
        if res.follow_ok:
            survivors.append(c)
    if not survivors:
        return []

    best_end = max(c.end_offset for c in survivors)
    chosen = min((c for c in survivors if c.end_offset == best_end),
                 key=lambda c: (c.start_offset, c.lang.name))
    maximal = insertion_scan(tree, chosen, token_budget=cfg.rank_tokens).horizon

    kept = []
    for c in survivors:
        res = insertion_scan(tree, c, stop_offset=maximal)
        if res.first_err is not None and res.first_err < maximal:
            continue
        if res.first_err is None and res.consumed_to < maximal:
            continue
        kept.append(c)
    return kept


def resolve_stacks(tree, cands, v):
    """Fill in stacks for parse-tree/line candidates via stack recreation."""
    cache = {}
    out = []
    for c in cands:
        if c.stack is not None:
            out.append(c)
            continue
        if c.start.id not in cache:
            cache[c.start.id] = recreate_parsing_stack(tree, c.start, v)
        c.stack = cache[c.start.id]
        if c.stack is not None:
            out.append(c)
    return out


def decide(tree, survivors, trigger):
    if not survivors:
        return Decision(Decision.NONE, trigger=trigger)
    if len(survivors) == 1:
        return Decision(Decision.INSERT, candidates=survivors, trigger=trigger)
    ordered = sorted(survivors,
                     key=lambda c: (c.start_offset, c.end_offset, c.lang.name))
    return Decision(Decision.PRESENT, candidates=ordered, trigger=trigger)


# -- removing and resizing ----------------------------------------------------

def removal_scan(tree, box, states):
    """(content_ok, follow_ok): box text read back as outer-language code."""
    end = box.end()
    res = continuation_scan(tree, states, box.start(), dissolve=box,
                            content_end=end,
                            stop_offset=None, token_budget=None)
    content_ok = res.first_err is None or res.first_err >= end
    follow_ok = bool(res.follow_ok)
    return content_ok, follow_ok


def box_in_outer_error(box):
    """Is the box node itself part of an outer-tree syntax error?

    True when the parse failed at the box or an enclosing region carries
    an error mark.  Merely sharing an isolated statement with some other
    error does not count: that would dissolve boxes whenever the user is
    mid-edit anywhere near them.
    """
    node = box.node
    if node.error:
        return True
    p = node.parent
    while p is not None:
        if p.error:
            return True
        p = p.parent
    return False


def auto_remove(tree, comp, cfg):
    """Removal decisions for every uncommitted box, rules in order:

    1. inner tree has an error and the content is valid outer code;
    2. the box is part of an outer syntax error and the content is valid
       outer code;
    3. content valid in both languages and removal keeps the first
       following non-layout token error-free (checked on every parse).
    """
    decisions = []
    for box in all_boxes(tree):
        if box.state != UNCOMMITTED:
            continue
        host = box.node.tree
        states = recreate_parsing_stack(host, box.node, host.clock.version)
        if states is None:
            continue
        content_ok, follow_ok = removal_scan(host, box, states)
        inner_err = bool(box.inner.error_set)
        if inner_err and content_ok:
            decisions.append(Decision(Decision.REMOVE, box=box))
        elif box_in_outer_error(box) and content_ok:
            decisions.append(Decision(Decision.REMOVE, box=box))
        elif not inner_err and content_ok and follow_ok:
            decisions.append(Decision(Decision.REMOVE, box=box))
    return decisions


def _edge_scan(host, box, new_end):
    """follow_ok for the outer text when box's right edge sits at new_end."""
    states = recreate_parsing_stack(host, box.node, host.clock.version)
    if states is None:
        return None
    sim = StackSim(host.lang.tables, list(states))
    if not sim.feed(box.node.type):
        return None
    return continuation_scan(host, sim.states, new_end,
                             content_end=max(new_end, box.end()))


def auto_resize(tree, comp, cfg, stats=None):
    """Grow error-free boxes rightwards, shrink erroring ones, one edge
    decision per box; several surviving extents are presented, not picked."""
    decisions = []
    for box in all_boxes(tree):
        if box.state != UNCOMMITTED:
            continue
        host = box.node.tree
        start = box.start()
        cur_end = box.end()
        inner_err = bool(box.inner.error_set)
        if not inner_err:
            ends = recognise_ends(host, start, box.lang, comp, skip=box.node,
                                  cap=cfg.recogniser_cap, stats=stats)
            grow = [e for e in ends if e > cur_end]
            valid = []
            for e in grow:
                res = _edge_scan(host, box, e)
                if res is not None and res.follow_ok:
                    valid.append(e)
        else:
            ends = recognise_ends(host, start, box.lang, comp, limit_off=cur_end,
                                  cap=cfg.recogniser_cap, stats=stats)
            shrink = [e for e in ends if e < cur_end]
            valid = []
            for e in shrink:
                res = _edge_scan(host, box, e)
                if res is None or not res.follow_ok:
                    continue
                if res.first_err is not None and res.first_err < cur_end:
                    continue
                valid.append(e)
        if not valid:
            continue
        if len(valid) == 1:
            decisions.append(Decision(Decision.RESIZE, box=box, new_end=valid[0]))
        else:
            decisions.append(Decision(Decision.PRESENT_RESIZE, box=box,
                                      extents=sorted(valid)))
    return decisions
