"""Exception types shared across the engine."""


class AutoboxError(Exception):
    """Base class for all engine errors."""


class GrammarError(AutoboxError):
    """A grammar file is syntactically or semantically invalid."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = "%s (line %d, col %d)" % (message, line, col if col is not None else 0)
        super().__init__(message)


class ConflictError(AutoboxError):
    """The grammar is outside the deterministic-LR class.

    Carries every conflict found so grammar authors can fix them in one
    round trip.  Each conflict is (state, symbol, action_a, action_b, items).
    """

    def __init__(self, conflicts):
        self.conflicts = conflicts
        lines = ["grammar has %d LALR(1) conflict(s):" % len(conflicts)]
        for state, sym, a, b, items in conflicts:
            lines.append("  state %d on %r: %s vs %s" % (state, sym, a, b))
            for it in items:
                lines.append("    %s" % it)
        super().__init__("\n".join(lines))


class CompositionError(AutoboxError):
    """A composition file is invalid or references unknown pieces."""


class EditRangeError(AutoboxError):
    """An edit names a position or span outside the current document."""


class VersionError(AutoboxError):
    """A read targets a version that no longer exists."""


class StaleCandidateError(AutoboxError):
    """A candidate was applied after the document changed under it."""
