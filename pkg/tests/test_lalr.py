"""LALR table construction against independent membership oracles."""

import itertools
import random

import pytest

from autobox.errors import ConflictError
from autobox.grammar import parse_grammar_spec
from autobox.lalr import build_lr_tables, StackSim, END
from autobox.composition import load_language, load_composition, Hint, CompositionSpec

from helpers import earley_accepts

PARENS = '%name parens\nS: S "(" S ")" | ;\n'


def test_single_token_grammar_tables():
    spec = parse_grammar_spec('%name one\nS: "a";\n')
    tables = build_lr_tables(spec)
    assert tables.accepts(['"a"'])
    assert not tables.accepts([])
    assert not tables.accepts(['"a"', '"a"'])


def test_lalr_shift_reduce_conflict_is_reported():
    # After one "a", shifting another and reducing S -> "a" are both live.
    with pytest.raises(ConflictError) as ei:
        build_lr_tables(parse_grammar_spec('%name amb\nS: "a" S "a" | "a";\n'))
    assert ei.value.conflicts
    state, sym, a, b, items = ei.value.conflicts[0]
    assert sym == '"a"'
    assert items
    assert "state" in str(ei.value)


def test_lalr_reduce_reduce_conflict_is_reported():
    with pytest.raises(ConflictError) as ei:
        build_lr_tables(parse_grammar_spec(
            '%name rr\nS: A | B;\nA: "a";\nB: "a";\n'))
    kinds = {(a[0], b[0]) for _, _, a, b, _ in ei.value.conflicts}
    assert ("r", "r") in kinds


def test_right_recursive_list_is_lalr_clean():
    # Two-rule right recursion resolves on lookahead: shift "a", reduce at end.
    tables = build_lr_tables(parse_grammar_spec('%name ok\nS: "a" S | "a";\n'))
    assert tables.accepts(['"a"'] * 3)
    assert not tables.accepts([])


def test_balanced_parens_against_enumeration():
    spec = parse_grammar_spec(PARENS)
    tables = build_lr_tables(spec)
    assert tables.accepts(['"("', '"("', '")"', '")"', '"("', '")"'])
    prods = spec.productions
    for n in range(0, 9):
        for s in itertools.product(['"("', '")"'], repeat=n):
            assert tables.accepts(s) == earley_accepts(prods, "S", list(s)), s


def test_minisql_against_earley_random_strings():
    spec = load_language("minisql").spec
    tables = load_language("minisql").tables
    alphabet = ['"SELECT"', '"FROM"', '"WHERE"', '","', '"*"', '"+"',
                "INT", "IDENT", '"("', '")"']
    rng = random.Random(7)
    checked = 0
    for _ in range(400):
        n = rng.randrange(0, 9)
        s = [rng.choice(alphabet) for _ in range(n)]
        assert tables.accepts(s) == earley_accepts(spec.productions, "sql", s), s
        checked += 1
    # Seed a few known-positive strings so the comparison is not all-negative.
    for s in (['"SELECT"', "INT"],
              ['"SELECT"', '"*"', '"FROM"', "IDENT"],
              ['"SELECT"', "IDENT", '","', "INT", '"FROM"', "IDENT",
               '"WHERE"', "IDENT", '"<"', "INT"]):
        assert tables.accepts(s)
        assert earley_accepts(spec.productions, "sql", s)


def test_can_shift_lbox_enumeration():
    lang = load_language("minijava_sql")
    tables = lang.tables
    # Enumerate states: the box symbol is shiftable exactly where the
    # action table says shift (plus reduce-resolvable entries).
    direct = {s for s in range(tables.n_states)
              if tables.action.get((s, "<MiniSQL>"), ("",))[0] == "s"}
    assert direct, "no state shifts the box symbol at all"
    for s in direct:
        assert tables.can_shift_lbox(s, "<MiniSQL>")
    # Unknown symbol is never shiftable.
    for s in range(tables.n_states):
        assert not tables.can_shift_lbox(s, "<Nope>")


def test_can_shift_lbox_after_assignment():
    lang = load_language("minijava_sql")
    tables = lang.tables
    sim = StackSim(tables)
    for sym in ['"int"', "IDENT", '"="]'[:-1]]:
        assert sim.feed(sym)
    assert tables.can_shift_lbox(sim.states[-1], "<MiniSQL>", sim.states)


def test_can_shift_lbox_where_only_commas_expected():
    lang = load_language("minijava_sql")
    tables = lang.tables
    sim = StackSim(tables)
    # int f(int a   -> next we expect "," or ")", never a box.
    for sym in ['"int"', "IDENT", '"("', '"int"', "IDENT"]:
        assert sim.feed(sym)
    assert not tables.can_shift_lbox(sim.states[-1], "<MiniSQL>", sim.states)


def test_can_shift_lbox_is_pure():
    tables = load_language("minijava_sql").tables
    probes = [(s, "<MiniSQL>") for s in range(tables.n_states)]
    first = [tables.can_shift_lbox(s, sym) for s, sym in probes]
    second = [tables.can_shift_lbox(s, sym) for s, sym in probes]
    assert first == second


def test_stacksim_accept_detection():
    tables = load_language("minisql").tables
    sim = StackSim(tables)
    assert sim.feed('"SELECT"')
    assert not sim.at_accept()
    assert sim.feed("INT")
    assert sim.at_accept()
    assert sim.feed('"+"')
    assert not sim.at_accept()
    assert not sim.feed('"FROM"')


def test_hint_allows_allow_list():
    comp = load_composition_fixture("javahtml")
    assert comp.hint_allows("minihtml", "TAG_OPEN")
    assert comp.hint_allows("minihtml", "TAG_SELF")
    assert not comp.hint_allows("minihtml", "TEXT")
    assert not comp.hint_allows("minihtml", "IDENT")


def test_hint_absent_is_permissive():
    comp = load_composition_fixture("javasql")
    lang = load_language("minisql")
    for ttype in [t for t, _ in lang.spec.token_rules]:
        assert comp.hint_allows("minisql", ttype)


def test_hint_allow_list_set_equality():
    comp = load_composition_fixture("javahtml")
    html = load_language("minihtml")
    allowed = {t for t, _ in html.spec.token_rules
               if comp.hint_allows("minihtml", t)}
    assert allowed == {"TAG_OPEN", "TAG_SELF"}


def test_hint_cannot_have_both_lists():
    with pytest.raises(Exception):
        Hint(allow=["A"], deny=["B"])


def load_composition_fixture(name):
    import os
    import autobox
    path = os.path.join(os.path.dirname(autobox.__file__), "langs", name + ".cmp")
    return load_composition(path)
