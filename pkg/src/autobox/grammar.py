"""Grammar definition files and their in-memory form.

The file format is line-oriented:

    %name minijava
    %whitespace WS NL
    token NL /\\r?\\n/;
    token WS /[ \\t]+/;
    token IDENT /[A-Za-z_][A-Za-z0-9_]*/;
    program: stmt_list;
    stmt_list: stmt_list stmt | ;
    atom: IDENT | "(" expr ")" | <MiniSQL>;

Token rule order is significant: lexing is longest-match with ties broken
by declaration order.  Quoted literals in productions implicitly declare a
token rule for the escaped literal text; implicit literals are ordered
ahead of the explicit rules so keywords beat identifier-shaped rules on
equal-length matches.  Symbols in angle brackets are language-box symbols:
terminals of this grammar that the lexer never produces.
"""

import re

from .errors import GrammarError

# Token type assigned to characters no rule matches.  Not expressible as a
# grammar symbol name, so it can never collide or be parsed.
ERROR_TYPE = "$err"

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_LBOX_RE = re.compile(r"<[A-Za-z_][A-Za-z0-9_]*>")


def is_lbox_symbol(sym):
    return sym.startswith("<") and sym.endswith(">")


class GrammarSpec:
    """A validated grammar: lexer rules plus a context-free core.

    Fields:
      name              language id
      token_rules       ordered list of (type, pattern) pairs
      whitespace_types  token types treated as layout
      productions       list of (nonterminal, rhs-tuple)
      start_symbol      lhs of the first production
      lbox_symbols      terminals naming embeddable inner languages
    """

    def __init__(self, name, token_rules, whitespace_types, productions, lbox_symbols):
        self.name = name
        self.token_rules = list(token_rules)
        self.whitespace_types = frozenset(whitespace_types)
        self.productions = list(productions)
        self.start_symbol = productions[0][0] if productions else None
        self.lbox_symbols = frozenset(lbox_symbols)
        self.token_types = [t for t, _ in self.token_rules]
        self.nonterminals = frozenset(lhs for lhs, _ in self.productions)
        self._validate()

    def _validate(self):
        seen = set()
        for t, pat in self.token_rules:
            if t in seen:
                raise GrammarError("duplicate token type %r" % t)
            seen.add(t)
            try:
                re.compile(pat)
            except re.error as e:
                raise GrammarError("bad pattern for token %r: %s" % (t, e)) from e
        for w in self.whitespace_types:
            if w not in seen:
                raise GrammarError("whitespace type %r has no token rule" % w)
        if not self.productions:
            raise GrammarError("grammar %r has no productions" % self.name)
        toks = set(seen)
        for lhs, rhs in self.productions:
            for sym in rhs:
                if sym in self.nonterminals or sym in toks or sym in self.lbox_symbols:
                    continue
                raise GrammarError(
                    "undeclared symbol %r in production for %r" % (sym, lhs))
        if not self._productive(self.start_symbol):
            raise GrammarError(
                "start symbol %r derives no sentence" % self.start_symbol)

    def _productive(self, start):
        # Fixpoint: a nonterminal is productive once some alternative is all
        # terminals/lbox symbols/productive nonterminals.
        productive = set()
        changed = True
        while changed:
            changed = False
            for lhs, rhs in self.productions:
                if lhs in productive:
                    continue
                if all(sym in productive or sym not in self.nonterminals for sym in rhs):
                    productive.add(lhs)
                    changed = True
        return start in productive

    # -- layout weaving -----------------------------------------------------
    #
    # Whitespace is a real token in the parse tree (so the frontier always
    # concatenates to the document text), but user grammars are written
    # whitespace-agnostically.  We weave a nullable `__ws` nonterminal after
    # every terminal occurrence and in front of the start symbol; the LALR
    # tables are built over the woven grammar.

    WS_NT = "__ws"
    ROOT_NT = "__root"

    def woven_productions(self):
        prods = [(self.ROOT_NT, (self.WS_NT, self.start_symbol))]
        for lhs, rhs in self.productions:
            woven = []
            for sym in rhs:
                woven.append(sym)
                if sym not in self.nonterminals:
                    woven.append(self.WS_NT)
            prods.append((lhs, tuple(woven)))
        for w in sorted(self.whitespace_types):
            prods.append((self.WS_NT, (w, self.WS_NT)))
        prods.append((self.WS_NT, ()))
        return prods


def parse_grammar_spec(text):
    """Parse grammar-file contents into a validated GrammarSpec."""
    name = None
    whitespace = []
    token_rules = []
    literal_rules = []   # implicit rules from quoted production symbols
    productions = []
    lbox_symbols = set()

    # Productions may span lines; everything else is line-oriented.
    pending = None
    pending_line = 0
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if pending is not None:
            pending += " " + line
            if line.endswith(";"):
                lines.append((pending_line, pending))
                pending = None
            continue
        if (not line.startswith(("%", "token "))
                and ":" in line and not line.endswith(";")):
            pending = line
            pending_line = lineno
            continue
        lines.append((lineno, line))
    if pending is not None:
        raise GrammarError("unterminated production", pending_line, 1)

    for lineno, line in lines:
        if line.startswith("%name"):
            name = line[len("%name"):].strip()
            if not _NAME_RE.fullmatch(name):
                raise GrammarError("bad language id %r" % name, lineno, 1)
        elif line.startswith("%whitespace"):
            whitespace.extend(line[len("%whitespace"):].split())
        elif line.startswith("token "):
            token_rules.append(_parse_token_rule(line, lineno))
        else:
            lhs, alts = _parse_production(line, lineno)
            for alt in alts:
                rhs = []
                for sym in alt:
                    if sym.startswith('"'):
                        if sym not in (t for t, _ in literal_rules):
                            literal_rules.append((sym, re.escape(sym[1:-1])))
                        rhs.append(sym)
                    else:
                        if is_lbox_symbol(sym):
                            lbox_symbols.add(sym)
                        rhs.append(sym)
                productions.append((lhs, tuple(rhs)))

    if name is None:
        raise GrammarError("missing %name directive")
    return GrammarSpec(name, literal_rules + token_rules, whitespace, productions,
                       lbox_symbols)


def _strip_comment(line):
    # '#' starts a comment unless inside /.../ or "..." on the same line.
    out = []
    quote = None
    i = 0
    while i < len(line):
        c = line[i]
        if quote:
            if c == "\\" and i + 1 < len(line):
                out.append(line[i:i + 2])
                i += 2
                continue
            if c == quote:
                quote = None
        elif c in "/\"":
            quote = c
        elif c == "#":
            break
        out.append(c)
        i += 1
    return "".join(out)


def _parse_token_rule(line, lineno):
    m = re.fullmatch(r"token\s+([A-Za-z_][A-Za-z0-9_]*)\s+/((?:[^/\\]|\\.)*)/\s*;", line)
    if not m:
        raise GrammarError("malformed token rule: %r" % line, lineno, 1)
    ttype, pat = m.group(1), m.group(2).replace("\\/", "/")
    return ttype, pat


def _parse_production(line, lineno):
    m = re.match(r"([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(.*);\s*$", line)
    if not m:
        raise GrammarError("malformed production: %r" % line, lineno, 1)
    lhs, body = m.group(1), m.group(2)
    alts = []
    for alt in body.split("|"):
        syms = []
        for tok in re.findall(r'"(?:[^"\\]|\\.)*"|<[A-Za-z_][A-Za-z0-9_]*>|[A-Za-z_][A-Za-z0-9_]*', alt):
            syms.append(tok)
        leftovers = re.sub(r'"(?:[^"\\]|\\.)*"|<[A-Za-z_][A-Za-z0-9_]*>|[A-Za-z_][A-Za-z0-9_]*|\s+', "", alt)
        if leftovers:
            raise GrammarError("unexpected %r in production %r" % (leftovers, lhs),
                               lineno, 1)
        alts.append(syms)
    return lhs, alts
