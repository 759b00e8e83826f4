"""Incremental parsing engine for composed languages.

Automatic language boxes: as the user types, embedded-language regions
are inserted, removed, and resized by default-disambiguation heuristics
layered on an incremental LR parser.
"""

from .errors import (AutoboxError, GrammarError, ConflictError,
                     CompositionError, EditRangeError, StaleCandidateError)
from .grammar import GrammarSpec, parse_grammar_spec
from .lalr import LrTables, build_lr_tables
from .composition import (CompositionSpec, Composition, Language,
                          parse_composition_spec, load_composition, load_language)
from .tree import Tree, Node, Clock
from .incremental import apply_edit, relex, incremental_parse, ParseOutcome

__version__ = "0.1.0"
