"""LALR(1) table construction and parse-stack simulation.

Tables are built over the whitespace-woven production set (see
GrammarSpec.woven_productions).  Construction computes the LR(0)
automaton, then iterates LR(1) closures over it until the per-item
lookahead sets reach a fixpoint; merging lookaheads by LR(0) core as we
go is what makes the result LALR(1) rather than canonical LR(1).

Any shift/reduce or reduce/reduce conflict rejects the grammar: the
incremental engine is deterministic-LR only, and a silently resolved
conflict would corrupt every heuristic built on top of the tables.
"""

from .errors import ConflictError

END = "$end"
AUG = "__start"

SHIFT = "s"
REDUCE = "r"
ACCEPT = "acc"


class LrTables:
    """Deterministic LALR(1) action/goto tables.

    action maps (state, terminal-or-lbox-symbol) to ("s", state),
    ("r", production index) or ("acc",); goto maps (state, nonterminal)
    to a state.  prods[i] is (lhs, rhs-tuple) with prods[0] the augmented
    start production.
    """

    def __init__(self, prods, action, goto, n_states, terminals, nonterminals):
        self.prods = prods
        self.action = action
        self.goto = goto
        self.n_states = n_states
        self.terminals = terminals
        self.nonterminals = nonterminals

    def can_shift_lbox(self, state, sym, stack=None):
        """Could a language box with symbol sym be shifted at state?

        Pure table query.  With a stack of states the reduce chain is
        resolved exactly; without one, a reduce entry is treated
        optimistically as shiftable (candidates it admits are validated
        downstream by the recogniser and the combine filter).
        """
        if sym not in self.terminals:
            return False
        act = self.action.get((state, sym))
        if act is None:
            return False
        if act[0] == SHIFT:
            return True
        if stack is None:
            return True
        sim = StackSim(self, list(stack))
        return sim.feed(sym, dry_run=True)

    def accepts(self, types):
        """Batch-recognise a sequence of terminal type names."""
        sim = StackSim(self)
        for t in types:
            if not sim.feed(t):
                return False
        return sim.at_accept()


class StackSim:
    """A bare LR parse stack over states only.

    Used for everything that must test "would this parse?" without
    touching a tree: the candidates recogniser, follow-token filtering,
    ranking scans, and removal/resize validity checks.
    """

    __slots__ = ("tables", "states")

    def __init__(self, tables, states=None):
        self.tables = tables
        self.states = states if states is not None else [0]

    def copy(self):
        return StackSim(self.tables, list(self.states))

    def feed(self, sym, dry_run=False):
        """Shift sym (reducing as needed first); False on parse error.

        dry_run leaves the stack unchanged and only reports feasibility.
        """
        states = list(self.states) if dry_run else self.states
        action = self.tables.action
        prods = self.tables.prods
        goto = self.tables.goto
        while True:
            act = action.get((states[-1], sym))
            if act is None:
                return False
            if act[0] == SHIFT:
                if not dry_run:
                    states.append(act[1])
                return True
            if act[0] == ACCEPT:
                return sym == END
            lhs, rhs = prods[act[1]]
            if len(rhs):
                del states[-len(rhs):]
            nxt = goto.get((states[-1], lhs))
            if nxt is None:
                return False
            states.append(nxt)

    def shift_nonterminal(self, nt):
        """Shift a completed subtree by its nonterminal type via goto."""
        nxt = self.tables.goto.get((self.states[-1], nt))
        if nxt is None:
            return False
        self.states.append(nxt)
        return True

    def shift_nonterminal_for(self, nt, la_type):
        """Shift nt, reducing by la_type only while goto is missing.

        Goto is checked before each reduction: reducing first could
        derive an empty nt and leave the real subtree unshiftable.
        """
        goto = self.tables.goto
        action = self.tables.action
        prods = self.tables.prods
        for _ in range(64):
            nxt = goto.get((self.states[-1], nt))
            if nxt is not None:
                self.states.append(nxt)
                return True
            if la_type is None:
                return False
            act = action.get((self.states[-1], la_type))
            if act is None or act[0] != REDUCE:
                return False
            lhs, rhs = prods[act[1]]
            if len(rhs):
                del self.states[-len(rhs):]
            g = goto.get((self.states[-1], lhs))
            if g is None:
                return False
            self.states.append(g)
        return False

    def reduce_for(self, sym):
        """Run the reduce chain a lookahead of sym would force; False on error.

        Unlike feed, stops before shifting sym itself.
        """
        action = self.tables.action
        prods = self.tables.prods
        goto = self.tables.goto
        while True:
            act = action.get((self.states[-1], sym))
            if act is None:
                return False
            if act[0] in (SHIFT, ACCEPT):
                return True
            lhs, rhs = prods[act[1]]
            if len(rhs):
                del self.states[-len(rhs):]
            nxt = goto.get((self.states[-1], lhs))
            if nxt is None:
                return False
            self.states.append(nxt)

    def at_accept(self):
        """Would the parse accept if input ended here?  Stack unchanged."""
        sim = self.copy()
        action = self.tables.action
        prods = self.tables.prods
        goto = self.tables.goto
        while True:
            act = action.get((sim.states[-1], END))
            if act is None:
                return False
            if act[0] == ACCEPT:
                return True
            if act[0] == SHIFT:
                return False
            lhs, rhs = prods[act[1]]
            if len(rhs):
                del sim.states[-len(rhs):]
            nxt = goto.get((sim.states[-1], lhs))
            if nxt is None:
                return False
            sim.states.append(nxt)


def build_lr_tables(spec):
    """Build conflict-free LALR(1) tables for a GrammarSpec.

    Raises ConflictError listing every conflict (with the offending state
    items) if the grammar is outside LALR(1).
    """
    user_prods = spec.woven_productions()
    prods = [(AUG, (spec.ROOT_NT,))] + user_prods
    nonterminals = {lhs for lhs, _ in prods}
    terminals = set()
    for _, rhs in prods:
        for sym in rhs:
            if sym not in nonterminals:
                terminals.add(sym)
    terminals.add(END)

    by_lhs = {}
    for i, (lhs, rhs) in enumerate(prods):
        by_lhs.setdefault(lhs, []).append(i)

    first = _first_sets(prods, nonterminals)

    def first_of_seq(seq, la):
        out = set()
        for sym in seq:
            if sym not in nonterminals:
                out.add(sym)
                return out
            out |= (first[sym] - {None})
            if None not in first[sym]:
                return out
        out.add(la)
        return out

    # LR(0) cores with accumulated lookaheads; states keyed by kernel core.
    # kernels[i]: dict (prod, dot) -> set(lookaheads)
    kernels = [{(0, 0): {END}}]
    core_index = {frozenset([(0, 0)]): 0}
    transitions = {}
    dirty = [0]

    def close(kernel):
        items = {k: set(v) for k, v in kernel.items()}
        work = list(items.items())
        while work:
            (pi, dot), las = work.pop()
            lhs, rhs = prods[pi]
            if dot >= len(rhs):
                continue
            nxt = rhs[dot]
            if nxt not in nonterminals:
                continue
            for la in las:
                gen = first_of_seq(rhs[dot + 1:], la)
                for pj in by_lhs.get(nxt, ()):
                    key = (pj, 0)
                    cur = items.setdefault(key, set())
                    new = gen - cur
                    if new:
                        cur |= new
                        work.append((key, new))
        return items

    while dirty:
        si = dirty.pop()
        closed = close(kernels[si])
        # Group shifted items by symbol.
        moves = {}
        for (pi, dot), las in closed.items():
            lhs, rhs = prods[pi]
            if dot < len(rhs):
                moves.setdefault(rhs[dot], {}).setdefault((pi, dot + 1), set()).update(las)
        for sym in sorted(moves):
            kern = moves[sym]
            core = frozenset(kern)
            ti = core_index.get(core)
            if ti is None:
                ti = len(kernels)
                core_index[core] = ti
                kernels.append({k: set(v) for k, v in kern.items()})
                dirty.append(ti)
            else:
                grew = False
                tk = kernels[ti]
                for k, las in kern.items():
                    missing = las - tk[k]
                    if missing:
                        tk[k] |= missing
                        grew = True
                if grew and ti not in dirty:
                    dirty.append(ti)
            transitions[(si, sym)] = ti

    action = {}
    goto = {}
    conflicts = []

    def render_item(pi, dot, las):
        lhs, rhs = prods[pi]
        out = list(rhs)
        out.insert(dot, ".")
        return "%s: %s  {%s}" % (lhs, " ".join(out) or "<empty>",
                                 ", ".join(sorted(las)))

    for si in range(len(kernels)):
        closed = close(kernels[si])
        item_strs = [render_item(pi, dot, las) for (pi, dot), las in sorted(closed.items())]
        for (pi, dot), las in closed.items():
            lhs, rhs = prods[pi]
            if dot < len(rhs):
                sym = rhs[dot]
                ti = transitions[(si, sym)]
                if sym in nonterminals:
                    goto[(si, sym)] = ti
                else:
                    prev = action.get((si, sym))
                    newact = (SHIFT, ti)
                    if prev is not None and prev != newact:
                        conflicts.append((si, sym, prev, newact, item_strs))
                    action[(si, sym)] = newact
            else:
                for la in las:
                    newact = (ACCEPT,) if pi == 0 else (REDUCE, pi)
                    prev = action.get((si, la))
                    if prev is not None and prev != newact:
                        conflicts.append((si, la, prev, newact, item_strs))
                        continue
                    action[(si, la)] = newact

    if conflicts:
        raise ConflictError(conflicts)
    return LrTables(prods, action, goto, len(kernels), frozenset(terminals),
                    frozenset(nonterminals))


def _first_sets(prods, nonterminals):
    first = {nt: set() for nt in nonterminals}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in prods:
            f = first[lhs]
            n = len(f)
            nullable = True
            for sym in rhs:
                if sym not in nonterminals:
                    f.add(sym)
                    nullable = False
                    break
                f |= (first[sym] - {None})
                if None not in first[sym]:
                    nullable = False
                    break
            if nullable:
                f.add(None)
            if len(f) != n:
                changed = True
    return first
