"""Incremental relex/reparse against batch oracles."""

import random

import pytest

from autobox.composition import load_language
from autobox.errors import EditRangeError
from autobox.grammar import ERROR_TYPE
from autobox.tree import Tree
from autobox.incremental import apply_edit, incremental_parse

from helpers import (batch_parse, tree_structure, fresh_tree,
                     random_program, random_edit)


def lex_types_values(lang, text):
    return [(t.type, t.value) for t in lang.lexer.lex(text)]


def frontier_types_values(tree):
    return [(n.type, n.value) for n in tree.tokens()]


def assert_lex_matches_batch(tree):
    assert frontier_types_values(tree) == lex_types_values(tree.lang, tree.text)


def test_relex_comment_merge():
    t, _ = fresh_tree("minijava_sql", "int x = 1 / 2;\n")
    slash = t.text.index("/")
    apply_edit(t, slash + 1, 0, "/")
    incremental_parse(t)
    assert ("COMMENT", "// 2;") in frontier_types_values(t)
    assert_lex_matches_batch(t)


def test_relex_identity_fixed_point():
    t, _ = fresh_tree("minijava_sql", "int abc = 1;")
    from autobox.incremental import relex
    t.clock.bump()
    changed = relex(t, 6, 0, "x")   # abc -> abxc, still one IDENT
    assert len(changed) == 1
    assert next(iter(changed)).value == "abxc"
    assert_lex_matches_batch(t)


def test_relex_unterminated_string_absorbs_line():
    t, _ = fresh_tree("minijava_sql", "int s = 1;\nint t = 2;\n")
    pos = t.text.index("1")
    apply_edit(t, pos, 0, '"')
    incremental_parse(t)
    assert ("BADSTRING", '"1;') in frontier_types_values(t)
    assert_lex_matches_batch(t)
    # Closing the string later re-lexes back into a proper STRING.
    end_of_line = t.text.index("\n")
    apply_edit(t, end_of_line, 0, '"')
    incremental_parse(t)
    assert ("STRING", '"1;"') in frontier_types_values(t)
    assert_lex_matches_batch(t)


def test_single_token_edit_keeps_rest_of_tree():
    t, _ = fresh_tree("minijava_sql", "int x = 1;")
    tok = next(n for n in t.tokens() if n.value == "1")
    before = [n.id for n in t.tokens()]
    apply_edit(t, t.end_of(tok), 0, "2")
    out = incremental_parse(t)
    assert out.accepted
    assert tok.value == "12"
    assert [n.id for n in t.tokens()] == before
    assert tree_structure(t) == batch_parse(t.lang, t.text)[1]


def test_unlexable_character_becomes_error_token():
    t, _ = fresh_tree("minijava_sql", "int x = 1;")
    apply_edit(t, 8, 0, "§")
    out = incremental_parse(t)
    assert any(n.type == ERROR_TYPE for n in t.tokens())
    assert not out.accepted


def test_out_of_range_edit_rejected():
    t, _ = fresh_tree("minijava_sql", "abc")
    with pytest.raises(EditRangeError):
        apply_edit(t, 4, 0, "x")
    with pytest.raises(EditRangeError):
        apply_edit(t, 2, 5, "x")


def test_error_isolated_to_statement():
    base = "int a = 1;\nint x = ;\nint b = 2;\n"
    t, out = fresh_tree("minijava_sql", base)
    assert not out.accepted
    errs = [n.value for n in out.error_nodes]
    assert errs == [";"]
    # Statements before and after parse normally: fixing the hole heals all.
    apply_edit(t, base.index("= ;") + 2, 0, "7")
    out2 = incremental_parse(t)
    assert out2.accepted
    assert tree_structure(t) == batch_parse(t.lang, t.text)[1]


def test_old_errors_not_reconsidered():
    base = "int x = ;\nint tail = 1;\n"
    t, out = fresh_tree("minijava_sql", base)
    assert [n.value for n in out.error_nodes] == [";"]
    # Edits far from the isolated error never re-report it.
    apply_edit(t, len(t.text), 0, "int ok = 1;\n")
    out = incremental_parse(t)
    assert out.error_nodes == []
    assert not out.accepted   # the old isolated error is still there
    apply_edit(t, t.text.index("tail"), 4, "t2")
    out = incremental_parse(t)
    assert out.error_nodes == []


def test_adjacent_edit_does_retrigger():
    # Damage landing inside an isolated region re-parses it, so the same
    # position legitimately reports a fresh error.
    t, out = fresh_tree("minijava_sql", "int x = ;\nint tail = 1;\n")
    errnode = out.error_nodes[0]
    apply_edit(t, t.offset_of(errnode), 0, "=")   # still broken: "int x = =;"
    out = incremental_parse(t)
    assert not out.accepted
    assert out.error_nodes != []


def test_unchanged_tree_parse_is_free():
    t, out1 = fresh_tree("minijava_sql", "int x = 1;\n")
    out2 = incremental_parse(t)
    assert out2.accepted == out1.accepted
    assert out2.shifted_terminals == 0


def test_error_monotonicity_within_parse():
    base = "int a = 1;\nint b = 2;\nint c = 3;\n"
    t, _ = fresh_tree("minijava_sql", base)
    pos = t.text.index("2")
    apply_edit(t, pos, 1, "(")
    out = incremental_parse(t)
    for n in out.error_nodes:
        assert t.offset_of(n) >= pos


def test_incremental_matches_batch_on_chaotic_scripts():
    # Arbitrary splices: checks frontier fidelity, relex equality and the
    # accept flag on every keypress; structure whenever a doc is accepted.
    rng = random.Random(1234)
    lang = load_language("minijava_sql")
    for script in range(40):
        t, _ = fresh_tree("minijava_sql", random_program(rng))
        shadow = t.text
        for _ in range(rng.randrange(1, 25)):
            pos, dl, ins = random_edit(rng, shadow)
            shadow = shadow[:pos] + ins + shadow[pos + dl:]
            apply_edit(t, pos, dl, ins)
            out = incremental_parse(t)
            assert t.text == shadow
            assert t.frontier_text() == shadow
            assert_lex_matches_batch(t)
            ok, structure = batch_parse(lang, shadow)
            assert out.accepted == ok, repr(shadow)
            if ok:
                assert tree_structure(t) == structure, repr(shadow)


def test_incremental_matches_batch_on_structured_scripts():
    # Whole-statement insertions at line boundaries stay accepted, which
    # exercises subtree reuse and the structural-equality oracle densely.
    from helpers import JAVA_SNIPPETS
    rng = random.Random(99)
    lang = load_language("minijava_sql")
    for script in range(25):
        t, out = fresh_tree("minijava_sql", random_program(rng))
        assert out.accepted
        for _ in range(12):
            text = t.text
            starts = [0] + [i + 1 for i, c in enumerate(text) if c == "\n"]
            pos = rng.choice(starts)
            apply_edit(t, pos, 0, rng.choice(JAVA_SNIPPETS) + "\n")
            out = incremental_parse(t)
            assert out.accepted, repr(t.text)
            ok, structure = batch_parse(lang, t.text)
            assert ok
            assert tree_structure(t) == structure
