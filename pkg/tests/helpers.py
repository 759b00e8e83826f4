"""Shared test oracles and generators.

The oracles here deliberately take independent paths from the engine:
Earley membership works straight off the production list, and the batch
parser below is a from-scratch token-level LR loop that never reuses
subtrees, so structural equality against it is meaningful.
"""

import random

from autobox.composition import load_language
from autobox.grammar import parse_grammar_spec
from autobox.lalr import END, SHIFT, REDUCE, ACCEPT
from autobox.tree import Tree, KIND_NT
from autobox.incremental import apply_edit, incremental_parse


def earley_accepts(productions, start, tokens):
    """Earley membership test over raw (lhs, rhs) productions."""
    by_lhs = {}
    nonterminals = set()
    for lhs, rhs in productions:
        by_lhs.setdefault(lhs, []).append(tuple(rhs))
        nonterminals.add(lhs)

    n = len(tokens)
    # chart[i]: set of (lhs, rhs, dot, origin)
    chart = [set() for _ in range(n + 1)]
    for rhs in by_lhs.get(start, ()):
        chart[0].add((start, rhs, 0, 0))
    for i in range(n + 1):
        work = list(chart[i])
        while work:
            item = work.pop()
            lhs, rhs, dot, origin = item
            if dot < len(rhs):
                sym = rhs[dot]
                if sym in nonterminals:
                    for prod in by_lhs.get(sym, ()):
                        new = (sym, prod, 0, i)
                        if new not in chart[i]:
                            chart[i].add(new)
                            work.append(new)
                    # Magic completion for nullable symbols already finished here.
                    for other in list(chart[i]):
                        if other[0] == sym and other[2] == len(other[1]) and other[3] == i:
                            new = (lhs, rhs, dot + 1, origin)
                            if new not in chart[i]:
                                chart[i].add(new)
                                work.append(new)
                elif i < n and tokens[i] == sym:
                    nxt = (lhs, rhs, dot + 1, origin)
                    if nxt not in chart[i + 1]:
                        chart[i + 1].add(nxt)
            else:
                for prev in list(chart[origin]):
                    plhs, prhs, pdot, porigin = prev
                    if pdot < len(prhs) and prhs[pdot] == lhs:
                        new = (plhs, prhs, pdot + 1, porigin)
                        if new not in chart[i]:
                            chart[i].add(new)
                            work.append(new)
    return any(item[0] == start and item[2] == len(item[1]) and item[3] == 0
               for item in chart[n])


def batch_parse(lang, text):
    """From-scratch batch parse; returns (accepted, structure or None).

    Structure is nested tuples: ("nt", type, (children...)) and
    ("t", type, value).  Pure token-level LR with no subtree reuse.
    """
    tables = lang.tables
    toks = list(lang.lexer.lex(text))
    states = [0]
    forest = [None]

    def reduce(pi):
        lhs, rhs = tables.prods[pi]
        k = len(rhs)
        kids = tuple(forest[-k:]) if k else ()
        if k:
            del states[-k:]
            del forest[-k:]
        states.append(tables.goto[(states[-1], lhs)])
        forest.append(("nt", lhs, kids))

    for tok in toks + [None]:
        sym = tok.type if tok is not None else END
        while True:
            act = tables.action.get((states[-1], sym))
            if act is None:
                return False, None
            if act[0] == SHIFT:
                states.append(act[1])
                forest.append(("t", tok.type, tok.value))
                break
            if act[0] == ACCEPT:
                return True, forest[-1]
            reduce(act[1])
    return False, None


def tree_structure(tree):
    """Engine tree as comparable nested tuples (sentinels stripped)."""
    def conv(node):
        if node.kind != KIND_NT:
            return ("t", node.type, node.value)
        return ("nt", node.type, tuple(conv(c) for c in node.children))
    kids = tree.root.children
    inner = [c for c in kids if c is not tree.bos and c is not tree.eos]
    if len(inner) != 1:
        return ("nt", "Root", tuple(conv(c) for c in inner))
    return conv(inner[0])


def fresh_tree(lang_id, text=""):
    lang = load_language(lang_id)
    t = Tree(lang)
    if text:
        apply_edit(t, 0, 0, text)
    out = incremental_parse(t)
    return t, out


def grammar_from(text):
    return parse_grammar_spec(text)


# -- random material ----------------------------------------------------------

JAVA_SNIPPETS = [
    "int x = 1;", "x = y + 2;", "print(x);", "int a = f(1, 2);",
    "if (a < b) { x = 1; }", "while (x < 10) { x = x + 1; }",
    "str s = \"hi\";", "return x + 1;", "int q = (a + b) * c;",
    "{ int t = 0; }",
]

SQL_SNIPPETS = [
    "SELECT 1", "SELECT a, b FROM t", "SELECT max(x) FROM t WHERE a < 5",
    "SELECT * FROM items", "SELECT a + b * 2", "SELECT 'txt', 5",
]

EDIT_CHARS = "abxy01 ;=+(){}<\n\"star"


def random_program(rng, lang_id="minijava_sql", n=6):
    pool = JAVA_SNIPPETS if lang_id.startswith("minijava") else SQL_SNIPPETS
    if lang_id.startswith("minisql"):
        return rng.choice(SQL_SNIPPETS)
    return "\n".join(rng.choice(pool) for _ in range(n)) + "\n"


def random_edit(rng, text):
    """One random splice: (pos, del_len, insert)."""
    pos = rng.randrange(len(text) + 1)
    del_len = rng.randrange(min(4, len(text) - pos) + 1) if rng.random() < 0.4 else 0
    if rng.random() < 0.75:
        ins = "".join(rng.choice(EDIT_CHARS) for _ in range(rng.randrange(1, 4)))
    else:
        ins = rng.choice(JAVA_SNIPPETS + SQL_SNIPPETS)
    return pos, del_len, ins
