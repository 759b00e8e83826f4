"""Curated replay corpus: definitions and the one-shot file builder.

Each case is (composition, base name, hole text, fragment, intended
category).  Intents are design-time expectations; the frozen
expected.csv next to the manifest is authoritative for the acceptance
run and was produced by the replay itself after the intents were
reconciled (see test_corpus for the consistency checks that keep both
honest).

Run  python tests/corpus_def.py  to regenerate tests/data/corpus/.
"""

import json
import os

CORPUS_DIR = os.path.join(os.path.dirname(__file__), "data", "corpus")

BASES = {
    "base_javasql.mjava": (
        "int f(int a) {\n"
        "    int x = 100;\n"
        "    int y = a + 2;\n"
        "    print(x);\n"
        "}\n"
    ),
    "base_javasql2.mjava": (
        "int x = 7 + 9;\n"
        "int z = 5;\n"
    ),
    "base_javahtml.mjava": (
        "int g(int k) {\n"
        "    int v = 1;\n"
        "    print(90 < k);\n"
        "    print(80 < k);\n"
        "    int w = 2;\n"
        "    print(v);\n"
        "}\n"
    ),
    "base_luasql.mlua": (
        "x = 7\n"
        "print(x)\n"
        "local h = 'str'\n"
    ),
    "base_sqljava.msql": (
        "SELECT alpha, beta FROM tbl WHERE gamma < 10\n"
    ),
}

# (composition, base, hole, occurrence, fragment, intended category)
CASES = [
    # javasql: Java host, SQL guest
    ("javasql", "base_javasql.mjava", "100", 0, "SELECT dal FROM t", "complete_insertion"),
    ("javasql", "base_javasql.mjava", "100", 0,
     "SELECT max(dal), min(dal) FROM t WHERE a = 5", "complete_insertion"),
    ("javasql", "base_javasql.mjava", "100", 0, "SELECT 1 + 2", "complete_insertion"),
    ("javasql", "base_javasql.mjava", "100", 0, "SELECT 'txt' FROM t", "complete_insertion"),
    ("javasql", "base_javasql.mjava", "100", 0, "SELECT * FROM t", "complete_insertion"),
    ("javasql", "base_javasql.mjava", "a + 2", 0, "SELECT 9", "complete_insertion"),
    ("javasql", "base_javasql.mjava", "a + 2", 0, "SELECT 1, 2", "complete_insertion"),
    ("javasql", "base_javasql.mjava", "100", 0, "b * (c + 1)", "no_insertion_valid"),
    ("javasql", "base_javasql.mjava", "100", 0, "42", "no_insertion_valid"),
    ("javasql", "base_javasql.mjava", "100", 0, "x < 2", "no_insertion_valid"),
    ("javasql", "base_javasql.mjava", "a + 2", 0, "SELECT a FROM t + 1",
     "partial_insertion_no_errors"),
    ("javasql", "base_javasql.mjava", "a + 2", 0, "SELECT a FROM t WHERE",
     "partial_insertion_errors"),
    ("javasql", "base_javasql.mjava", "100", 0, "FROM t", "no_insertion_errors"),
    ("javasql", "base_javasql.mjava", "100", 0, "WHERE x", "no_insertion_errors"),
    ("javasql", "base_javasql2.mjava", "7", 0, "SELECT 5", "no_insertion_multi"),
    ("javasql", "base_javasql2.mjava", "9", 0, "SELECT 5", "complete_insertion"),

    # javahtml: Java host, HTML guest behind start-token hints.  Complete
    # insertions live in holes followed by a bare "<" on the same line:
    # the guest's lexer cannot match it, which stops the match-anything
    # TEXT token from swallowing the rest of the file.
    ("javahtml", "base_javahtml.mjava", "90", 0, "<b>hello</b>", "complete_insertion"),
    ("javahtml", "base_javahtml.mjava", "80", 0, "<img/>", "complete_insertion"),
    ("javahtml", "base_javahtml.mjava", "90", 0, "<ul><li/></ul>", "complete_insertion"),
    ("javahtml", "base_javahtml.mjava", "80", 0, "<i>y</i>", "complete_insertion"),
    ("javahtml", "base_javahtml.mjava", "90", 0, "<table><tr/></table>", "complete_insertion"),
    ("javahtml", "base_javahtml.mjava", "80", 0, "<a>text</a>", "complete_insertion"),
    # Without that guard the guest can absorb whole following lines, and
    # several viable extents are offered to the user instead.
    ("javahtml", "base_javahtml.mjava", "1", 0, "<img/>", "no_insertion_multi"),
    # ... or the box and its leftovers churn into residual errors.
    ("javahtml", "base_javahtml.mjava", "1", 0, "<i>u</i> + 1", "partial_insertion_errors"),
    ("javahtml", "base_javahtml.mjava", "1", 0, "wild words here", "no_insertion_errors"),
    ("javahtml", "base_javahtml.mjava", "1", 0, "<broken", "no_insertion_errors"),
    ("javahtml", "base_javahtml.mjava", "1", 0, "</b>", "no_insertion_errors"),
    ("javahtml", "base_javahtml.mjava", "1", 0, "9 9", "no_insertion_errors"),
    ("javahtml", "base_javahtml.mjava", "1", 0, "v + k", "no_insertion_valid"),
    ("javahtml", "base_javahtml.mjava", "1", 0, "k", "no_insertion_valid"),
    ("javahtml", "base_javahtml.mjava", "1", 0, "- v", "no_insertion_valid"),
    ("javahtml", "base_javahtml.mjava", "2", 0, "k * 2", "no_insertion_valid"),

    # luasql: Lua host (separator-free statements), SQL guest
    ("luasql", "base_luasql.mlua", "7", 0, "SELECT a, b FROM t", "complete_insertion"),
    ("luasql", "base_luasql.mlua", "7", 0, "SELECT one FROM t", "complete_insertion"),
    ("luasql", "base_luasql.mlua", "x", 1, "SELECT count(y) FROM t", "complete_insertion"),
    ("luasql", "base_luasql.mlua", "x", 1, "SELECT * FROM t", "complete_insertion"),
    ("luasql", "base_luasql.mlua", "x", 1, "SELECT 9", "complete_insertion"),
    ("luasql", "base_luasql.mlua", "7", 0, "3 + 4", "no_insertion_valid"),
    ("luasql", "base_luasql.mlua", "7", 0, "y", "no_insertion_valid"),
    ("luasql", "base_luasql.mlua", "7", 0, "(a + b) * 2", "no_insertion_valid"),
    ("luasql", "base_luasql.mlua", "7", 0, "8 * (x + 1)", "no_insertion_valid"),
    ("luasql", "base_luasql.mlua", "7", 0, "SELECT", "no_insertion_valid"),
    ("luasql", "base_luasql.mlua", "7", 0, "SELECT a FROM t + 1",
     "partial_insertion_no_errors"),
    ("luasql", "base_luasql.mlua", "7", 0, "FROM t", "no_insertion_errors"),
    ("luasql", "base_luasql.mlua", "7", 0, "do end", "no_insertion_errors"),
    ("luasql", "base_luasql.mlua", "7", 0, "]", "no_insertion_errors"),
    # An error surfacing on the line after the guest text defeats the
    # line-bounded search; these document that boundary honestly.
    ("luasql", "base_luasql.mlua", "7", 0, "SELECT one", "no_insertion_errors"),
    ("luasql", "base_luasql.mlua", "'str'", 0, "SELECT z", "no_insertion_errors"),
    # Box growth across the newline can swallow the next statement and
    # churn; the leftovers end in errors.
    ("luasql", "base_luasql.mlua", "7", 0, "SELECT 5 + 9", "partial_insertion_errors"),
    ("luasql", "base_luasql.mlua", "7", 0, "SELECT 'one', two", "partial_insertion_errors"),

    # sqljava: SQL host, Java-expression guest (heavy syntactic overlap)
    ("sqljava", "base_sqljava.msql", "alpha", 0, '"nm" + suffix', "complete_insertion"),
    ("sqljava", "base_sqljava.msql", "alpha", 0, '"a" == "b"', "complete_insertion"),
    ("sqljava", "base_sqljava.msql", "alpha", 0, "- delta", "complete_insertion"),
    # Two string literals produce two separate small boxes; the document
    # still ends valid.
    ("sqljava", "base_sqljava.msql", "alpha", 0, '"s1" + "s2"',
     "partial_insertion_no_errors"),
    # In WHERE position both the literal and the whole comparison are
    # viable boxes, so the choice is presented, not made.
    ("sqljava", "base_sqljava.msql", "10", 0, '"lim"', "no_insertion_multi"),
    ("sqljava", "base_sqljava.msql", "10", 0, '"x" == "y"', "no_insertion_multi"),
    ("sqljava", "base_sqljava.msql", "alpha", 0, "f(1)", "no_insertion_valid"),
    ("sqljava", "base_sqljava.msql", "alpha", 0, "x + 1", "no_insertion_valid"),
    ("sqljava", "base_sqljava.msql", "10", 0, "f(2) * 3", "no_insertion_valid"),
    ("sqljava", "base_sqljava.msql", "10", 0, "k", "no_insertion_valid"),
    ("sqljava", "base_sqljava.msql", "alpha", 0, "9", "no_insertion_valid"),
    ("sqljava", "base_sqljava.msql", "beta", 0, "beta * 2", "no_insertion_valid"),
    ("sqljava", "base_sqljava.msql", "alpha", 0, "call(a, b)", "no_insertion_valid"),
    ("sqljava", "base_sqljava.msql", "alpha", 0, "(x)", "no_insertion_valid"),
    ("sqljava", "base_sqljava.msql", "alpha", 0, "))", "no_insertion_errors"),
    ("sqljava", "base_sqljava.msql", "alpha", 0, ";;", "no_insertion_errors"),
]


def find_hole(base_text, hole, occurrence):
    pos = -1
    for _ in range(occurrence + 1):
        pos = base_text.index(hole, pos + 1)
    return pos


def manifest_entries():
    out = []
    for comp, base, hole, occ, fragment, intent in CASES:
        off = find_hole(BASES[base], hole, occ)
        out.append({
            "base_file": base,
            "offset": off,
            "span": len(hole),
            "fragment": fragment,
            "composition": comp,
        })
    return out


def write_corpus(expected=None):
    os.makedirs(CORPUS_DIR, exist_ok=True)
    for name, text in BASES.items():
        with open(os.path.join(CORPUS_DIR, name), "w", encoding="utf-8") as fh:
            fh.write(text)
    with open(os.path.join(CORPUS_DIR, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest_entries(), fh, indent=1)
        fh.write("\n")
    cats = expected if expected is not None else [c[-1] for c in CASES]
    with open(os.path.join(CORPUS_DIR, "expected.csv"), "w", encoding="utf-8") as fh:
        fh.write("test,composition,category\n")
        for i, (case, cat) in enumerate(zip(CASES, cats)):
            fh.write("%d,%s,%s\n" % (i, case[0], cat))


if __name__ == "__main__":
    write_corpus()
    print("corpus written to", CORPUS_DIR)
