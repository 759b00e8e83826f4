"""Composition files: which inner languages plug into which box symbols.

Format (UTF-8 text, '#' comments):

    outer minijava_sql;
    inner <MiniSQL> = minisql;
    inner <MiniHTML> = minihtml allow TAG_OPEN, TAG_SELF;

A hint is an allow-list or a deny-list of token types permitted as a
box's first token, never both.  Language ids resolve to "<id>.grm" files
next to the composition file, falling back to the grammars packaged with
the engine.
"""

import os
import re
import functools

from .errors import CompositionError
from .grammar import parse_grammar_spec
from .lexing import Lexer
from .lalr import build_lr_tables

_BUILTIN_DIR = os.path.join(os.path.dirname(__file__), "langs")


class Language:
    """A grammar bundled with its generated lexer and LALR tables."""

    def __init__(self, spec):
        self.spec = spec
        self.name = spec.name
        self.lexer = Lexer(spec.token_rules)
        self.tables = build_lr_tables(spec)
        self.whitespace_types = spec.whitespace_types

    def is_whitespace(self, token_type):
        return token_type in self.whitespace_types


class Hint:
    def __init__(self, allow=None, deny=None):
        if allow is not None and deny is not None:
            raise CompositionError("hint cannot have both allow and deny lists")
        self.allow = frozenset(allow) if allow is not None else None
        self.deny = frozenset(deny) if deny is not None else None

    def permits(self, token_type):
        if self.allow is not None:
            return token_type in self.allow
        if self.deny is not None:
            return token_type not in self.deny
        return True


class CompositionSpec:
    """An outer language plus the members reachable through box symbols.

    members maps lbox symbol -> inner language id; hints maps inner
    language id -> Hint.  Extra member entries beyond the outer grammar's
    own box symbols are allowed (they serve symbols of nested inner
    grammars).
    """

    def __init__(self, name, outer, members, hints):
        self.name = name
        self.outer = outer
        self.members = dict(members)
        self.hints = dict(hints)

    def hint_allows(self, lang, first_token_type):
        if lang not in self.members.values():
            raise CompositionError("%r is not a member of composition %r" % (lang, self.name))
        hint = self.hints.get(lang)
        if hint is None:
            return True
        return hint.permits(first_token_type)

    def lang_for(self, sym):
        return self.members.get(sym)


class Composition:
    """A CompositionSpec with all referenced Language objects loaded."""

    def __init__(self, spec, languages):
        self.spec = spec
        self.name = spec.name
        self.languages = languages            # id -> Language
        self.outer = languages[spec.outer]
        unknown = [sym for sym, lid in spec.members.items() if lid not in languages]
        if unknown:
            raise CompositionError("unresolved member languages for %s" % unknown)
        for sym in self.outer.spec.lbox_symbols:
            if sym not in spec.members:
                raise CompositionError(
                    "outer grammar references %s but composition %r has no member for it"
                    % (sym, spec.name))

    def members_of(self, lang):
        """(symbol, Language) pairs pluggable into lang's box symbols."""
        out = []
        for sym in sorted(lang.spec.lbox_symbols):
            lid = self.spec.members.get(sym)
            if lid is not None:
                out.append((sym, self.languages[lid]))
        return out

    def hint_allows(self, lang_id, first_token_type):
        return self.spec.hint_allows(lang_id, first_token_type)


def parse_composition_spec(text, name):
    outer = None
    members = {}
    hints = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"outer\s+([A-Za-z_][A-Za-z0-9_]*)\s*;", line)
        if m:
            outer = m.group(1)
            continue
        m = re.fullmatch(
            r"inner\s+(<[A-Za-z_][A-Za-z0-9_]*>)\s*=\s*([A-Za-z_][A-Za-z0-9_]*)"
            r"(?:\s+(allow|deny)\s+([A-Za-z_0-9, ]+))?\s*;", line)
        if m:
            sym, lang, mode, types = m.groups()
            if sym in members:
                raise CompositionError("duplicate member %s (line %d)" % (sym, lineno))
            members[sym] = lang
            if mode:
                tset = [t.strip() for t in types.split(",") if t.strip()]
                hints[lang] = Hint(allow=tset) if mode == "allow" else Hint(deny=tset)
            continue
        raise CompositionError("malformed composition line %d: %r" % (lineno, raw))
    if outer is None:
        raise CompositionError("composition %r has no outer language" % name)
    return CompositionSpec(name, outer, members, hints)


@functools.lru_cache(maxsize=64)
def _load_language_cached(path, mtime):
    with open(path, encoding="utf-8") as fh:
        return Language(parse_grammar_spec(fh.read()))


def load_language(lang_id, search_dirs=()):
    for d in list(search_dirs) + [_BUILTIN_DIR]:
        path = os.path.join(d, lang_id + ".grm")
        if os.path.exists(path):
            return _load_language_cached(path, os.path.getmtime(path))
    raise CompositionError("no grammar file for language %r" % lang_id)


def load_composition(path):
    """Load a composition file and every language it references."""
    name = os.path.splitext(os.path.basename(path))[0]
    with open(path, encoding="utf-8") as fh:
        spec = parse_composition_spec(fh.read(), name)
    search = [os.path.dirname(os.path.abspath(path))]
    languages = {}
    for lid in [spec.outer] + sorted(set(spec.members.values())):
        if lid not in languages:
            languages[lid] = load_language(lid, search)
    return Composition(spec, languages)
