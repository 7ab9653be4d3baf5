"""Expectation-based Minimalist Grammars: top-down derivation for parsing and generation."""

from .derivation import Derivation, Token, derive, generate, linearize
from .grammar import (
    AgrFeature,
    Category,
    ExpectFeature,
    Grammar,
    GrammarError,
    LexicalItem,
    ParameterSet,
    Polarity,
    dump_grammar,
    load_grammar,
    lookup,
    read_grammar,
    refines,
)
from .ops import op_unify
from .output import format_trace, format_tsv, parse_tsv, to_dependencies, to_trace
from .parsing import ParseConfig, ParseForest, Strategy, parse

__all__ = [
    "AgrFeature", "Category", "Derivation", "ExpectFeature", "Grammar", "GrammarError",
    "LexicalItem", "ParameterSet", "ParseConfig", "ParseForest", "Polarity", "Strategy",
    "Token", "derive", "dump_grammar", "format_trace", "format_tsv", "generate", "linearize",
    "load_grammar", "lookup", "op_unify", "parse", "parse_tsv", "read_grammar", "refines",
    "to_dependencies", "to_trace",
]
