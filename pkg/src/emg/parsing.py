"""Search over the shared derivation for parsing.

Branch points are homophones of the current word, phonetically empty items,
attachment of a word higher up (closing a lower expectation with an empty
item), and delayed expectations.  Branches are expanded depth first in
declaration order, lowest attachment first.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .derivation import (
    DEFAULT_MAX_EMPTY,
    Derivation,
    SearchStats,
    Token,
    explore,
    suspension_options,
)
from .grammar import ExpectFeature, Grammar, LexicalItem, refines
from .output import DependencyGraph, to_dependencies

Scorer = Callable[[LexicalItem, ExpectFeature], float]


def uniform_score(item: LexicalItem, expectation: ExpectFeature) -> float:
    return 0.0


class Strategy(enum.Enum):
    EXHAUSTIVE = "exhaustive"
    BEAM = "beam"


@dataclass
class ParseConfig:
    strategy: Strategy = Strategy.EXHAUSTIVE
    beam_width: int = 1
    priming: bool = True
    max_empty: int = DEFAULT_MAX_EMPTY
    eager_empty: bool = False
    delayed_expectation: bool | None = None  # None: the grammar's setting
    max_branches: int | None = None
    score: Scorer = uniform_score

    def __post_init__(self):
        if self.beam_width < 1:
            raise ValueError("beam width must be >= 1")
        if self.max_empty < 0:
            raise ValueError("max_empty must be >= 0")


@dataclass
class Analysis:
    derivation: Derivation
    graph: DependencyGraph

    @property
    def steps(self):
        return self.derivation.steps


@dataclass
class ParseForest:
    analyses: list[Analysis] = field(default_factory=list)
    explored: int = 0
    abandoned: int = 0
    leaves: int = 0
    failure: str | None = None
    deepest_failure: Derivation | None = None

    def __len__(self) -> int:
        return len(self.analyses)

    def __bool__(self) -> bool:
        return bool(self.analyses)


def prime_filter(candidates: Sequence[LexicalItem], expectation: ExpectFeature,
                 priming: bool = True) -> list[LexicalItem]:
    """Keep the candidates whose label fits the pending expectation."""
    if not priming:
        return list(candidates)
    return [c for c in candidates if refines(c.label, expectation.category)]


def open_sites(state: Derivation) -> list[ExpectFeature]:
    """Pending expectations above the current one, innermost first."""
    sites = list(state.cn.expect[1:])
    node = state.cn.parent
    while node is not None:
        sites.extend(node.expect)
        node = node.parent
    return sites


def attachment_sites(state: Derivation, item: LexicalItem) -> list[ExpectFeature]:
    """Every open expectation ``item`` could attach to, lowest first."""
    sites = [state.cn.expect[0], *open_sites(state)] if state.cn.expect else []
    return [s for s in sites if refines(item.label, s.category)]


def _branch(state: Derivation, token: Token) -> Derivation | None:
    child = state.clone()
    return child if child.merge_input(token) else None


def postulate_empty(state: Derivation, g: Grammar, budget: int = DEFAULT_MAX_EMPTY) -> list[Derivation]:
    """One branch per empty item fitting the pending expectation."""
    if not state.cn.expect or state.empties >= budget:
        return []
    expectation = state.cn.expect[0]
    out = []
    for item in g.lookup_empty(expectation.category):
        child = _branch(state, Token(item))
        if child is not None:
            out.append(child)
    return out


def attachment_variants(state: Derivation, incoming: LexicalItem,
                        budget: int = DEFAULT_MAX_EMPTY) -> list[Derivation]:
    """Attach ``incoming`` here, or close this expectation empty and let it go higher.

    The higher-site branches are returned with the empty item merged; the
    incoming item is offered to them next.
    """
    out = []
    low = _branch(state, Token(incoming)) if state.can_merge(incoming) else None
    if low is not None:
        out.append(low)
    if len(attachment_sites(state, incoming)) > (1 if state.can_merge(incoming) else 0):
        out.extend(postulate_empty(state, state.grammar, budget))
    return out


def suspend_expectation(state: Derivation, item: LexicalItem, index: int) -> Derivation | None:
    """Merge ``item`` with its ``index``-th expectation delayed until it is re-merged."""
    if not state.params.delayed_expectation:
        return None
    return _branch(state, Token(item, index))


def _proposer(g: Grammar, words: Sequence[str], cfg: ParseConfig):
    def propose(d: Derivation, expectation: ExpectFeature) -> list[Token]:
        overt: list[LexicalItem] = []
        if d.consumed < len(words):
            overt = prime_filter(g.lookup(words[d.consumed]), expectation, cfg.priming)
        options = [Token(item, s) for item in overt for s in suspension_options(d, item)]
        if d.empties < cfg.max_empty:
            empties = g.lookup_empty(expectation.category)
            if empties and (
                cfg.eager_empty
                or d.consumed >= len(words)
                or not any(d.can_merge(item) for item in overt)
                or any(attachment_sites(d, item)[1:] for item in overt if d.can_merge(item))
            ):
                options += [Token(item, s) for item in empties for s in suspension_options(d, item)]
        if cfg.strategy is Strategy.BEAM:
            ranked = sorted(options, key=lambda t: -cfg.score(t.item, expectation))
            options = ranked[: cfg.beam_width]
        return options

    return propose


def parse(g: Grammar, sentence: Sequence[str] | str, cfg: ParseConfig | None = None) -> ParseForest:
    """All (or the best ``beam_width``) analyses of ``sentence``."""
    cfg = cfg or ParseConfig()
    if cfg.delayed_expectation is not None and cfg.delayed_expectation != g.params.delayed_expectation:
        g = g.with_params(delayed_expectation=cfg.delayed_expectation)
    words = sentence.split() if isinstance(sentence, str) else list(sentence)

    starts = []
    for root in g.roots():
        if root.is_empty:
            starts.append(Derivation(g, root))
        elif words and root.phon == words[0]:
            starts.append(Derivation(g, root))
    stats = SearchStats()
    limit = cfg.beam_width if cfg.strategy is Strategy.BEAM else None
    found, stats = explore(starts, _proposer(g, words, cfg),
                           lambda d: d.consumed == len(words),
                           max_branches=cfg.max_branches, limit=limit, stats=stats)
    seen: dict = {}
    for d in found:
        graph = to_dependencies(d)
        seen.setdefault(graph.key(), Analysis(d, graph))
    analyses = [seen[k] for k in sorted(seen)]
    return ParseForest(analyses, stats.explored, stats.abandoned, stats.leaves,
                       None if analyses else stats.best_failure(), stats.deepest)


def accepts(g: Grammar, sentence: Sequence[str] | str, cfg: ParseConfig | None = None) -> bool:
    return bool(parse(g, sentence, cfg))
