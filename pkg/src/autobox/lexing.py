"""Longest-match lexer runtime.

Matching is longest-match across rules with declaration order breaking
ties; within one rule Python regex semantics apply.  Characters that no
rule matches become one-character tokens of ERROR_TYPE so an editor can
hold arbitrary text.

Every emitted token carries the lookahead distance the lexer needed
beyond the token's end to commit to it.  With regex-backed rules we use
the conservative constant 1 (the lexer always inspects the character
after a token to stop extending it), which is exactly what the damage
computation in the incremental lexer needs for these token sets.
"""

import re

from .grammar import ERROR_TYPE

LOOKAHEAD = 1


class LexedToken:
    __slots__ = ("type", "value", "start", "lookahead")

    def __init__(self, type_, value, start, lookahead=LOOKAHEAD):
        self.type = type_
        self.value = value
        self.start = start
        self.lookahead = lookahead

    @property
    def end(self):
        return self.start + len(self.value)

    def __repr__(self):
        return "LexedToken(%r, %r, %d)" % (self.type, self.value, self.start)

    def __eq__(self, other):
        return (isinstance(other, LexedToken)
                and (self.type, self.value, self.start) ==
                    (other.type, other.value, other.start))


class Lexer:
    def __init__(self, token_rules):
        self.rules = [(t, re.compile(p)) for t, p in token_rules]

    def lex_at(self, text, pos, endpos=None):
        """Return the single token starting at pos, or None at endpos."""
        if endpos is None:
            endpos = len(text)
        if pos >= endpos:
            return None
        best_type = None
        best_len = 0
        for ttype, pat in self.rules:
            m = pat.match(text, pos, endpos)
            if m is not None:
                n = m.end() - pos
                if n > best_len:
                    best_type, best_len = ttype, n
        if best_len == 0:
            return LexedToken(ERROR_TYPE, text[pos], pos)
        return LexedToken(best_type, text[pos:pos + best_len], pos)

    def lex(self, text, pos=0, endpos=None):
        """Iterate tokens from pos to endpos."""
        while True:
            tok = self.lex_at(text, pos, endpos)
            if tok is None:
                return
            yield tok
            pos = tok.end
