"""Dependency structures and word-by-word memory-load traces."""

from __future__ import annotations

from dataclasses import dataclass

from .derivation import Derivation, Status, Step, StepKind
from .grammar import Polarity

EMPTY_FORM = "_"


@dataclass(frozen=True)
class DepToken:
    index: int
    form: str
    is_empty: bool
    mem_load: int | None = None


@dataclass(frozen=True)
class DependencyGraph:
    tokens: tuple[DepToken, ...]
    edges: tuple[tuple[int, int, str], ...]  # (head, dependent, relation)
    status: str = "SUCCESS"

    def key(self):
        return (tuple((t.index, t.form) for t in self.tokens), self.edges)

    def heads(self, index: int) -> list[tuple[int, str]]:
        return [(h, r) for h, d, r in self.edges if d == index]

    def named_edges(self) -> set[tuple[str, str, str]]:
        form = {t.index: t.form for t in self.tokens}
        return {(form[h], form[d], r) for h, d, r in self.edges}

    @property
    def roots(self) -> list[int]:
        """Tokens with no selecting head."""
        return [t.index for t in self.tokens
                if not any(r.startswith(Polarity.SELECT.value) for _, r in self.heads(t.index))]


def _indexer(d: Derivation) -> dict[int, int]:
    overt = sorted((n for n in d.nodes if n.origin is None and n.position is not None),
                   key=lambda n: n.position)
    index = {n.uid: i for i, n in enumerate(overt, 1)}
    for i, n in enumerate(d.empty_nodes, len(overt) + 1):
        index[n.uid] = i
    return index


def per_word_loads(d: Derivation) -> list[int]:
    """Memory load after each overt word, once its memory re-merges are done."""
    loads: dict[int, int] = {}
    if d.consumed and d.root.position == 0:
        loads[1] = 0
    for step in d.steps:
        if step.words:
            loads[step.words] = step.mem_load
    return [loads.get(i, 0) for i in range(1, d.consumed + 1)]


def to_dependencies(d: Derivation) -> DependencyGraph:
    index = _indexer(d)
    loads = per_word_loads(d)
    tokens = []
    for node in d.nodes:
        if node.origin is not None:
            continue
        i = index[node.uid]
        if node.item.is_empty:
            tokens.append(DepToken(i, EMPTY_FORM, True))
        else:
            tokens.append(DepToken(i, node.item.phon, False, loads[node.position]
                                   if node.position < len(loads) else None))
    edges = []
    for node in d.nodes:
        for feature, child in node.dependents:
            edges.append((index[node.source.uid], index[child.source.uid], str(feature)))
    status = "SUCCESS" if d.status is Status.SUCCESS else f"FAIL({d.reason})"
    return DependencyGraph(tuple(sorted(tokens, key=lambda t: t.index)), tuple(sorted(edges)), status)


def format_tsv(graph: DependencyGraph) -> str:
    lines = [f"# status: {graph.status}"]
    for tok in graph.tokens:
        heads = graph.heads(tok.index)
        head = "|".join(str(h) for h, _ in heads) or "0"
        rel = "|".join(r for _, r in heads) or "root"
        load = "_" if tok.mem_load is None else str(tok.mem_load)
        lines.append(f"{tok.index}\t{tok.form}\t{head}\t{rel}\t{load}")
    return "\n".join(lines) + "\n"


def parse_tsv(text: str) -> DependencyGraph:
    status = "SUCCESS"
    tokens, edges = [], []
    for raw in text.splitlines():
        if not raw.strip():
            continue
        if raw.startswith("#"):
            if raw.startswith("# status:"):
                status = raw.split(":", 1)[1].strip()
            continue
        index, form, head, rel, load = raw.split("\t")
        i = int(index)
        tokens.append(DepToken(i, form, form == EMPTY_FORM, None if load == "_" else int(load)))
        if head != "0":
            for h, r in zip(head.split("|"), rel.split("|")):
                edges.append((int(h), i, r))
    return DependencyGraph(tuple(tokens), tuple(sorted(edges)), status)


@dataclass(frozen=True)
class WordRow:
    form: str
    mem_load: int
    retained_since: int | None  # 1-based index of the oldest word still held


@dataclass(frozen=True)
class TraceReport:
    steps: tuple[Step, ...]
    per_word: tuple[WordRow, ...]
    status: str


def per_word_retention(d: Derivation) -> list[int | None]:
    since: dict[int, int | None] = {}
    for step in d.steps:
        if step.words:
            since[step.words] = step.oldest
    return [since.get(i) for i in range(1, d.consumed + 1)]


def to_trace(d: Derivation) -> TraceReport:
    words = d.words
    loads = per_word_loads(d)
    since = per_word_retention(d)
    rows = tuple(WordRow(w, l, s) for w, l, s in zip(words, loads, since))
    status = "SUCCESS" if d.ok else f"FAIL({d.reason})"
    return TraceReport(tuple(d.steps), rows, status)


def format_trace(report: TraceReport) -> str:
    lines = [f"# status: {report.status}"]
    for i, step in enumerate(report.steps, 1):
        lines.append(f"{i}\t{step.kind.value}\t{step.detail}\t{step.mem_load}")
    lines.append("# word\tform\tmemload\tretained_since")
    for i, row in enumerate(report.per_word, 1):
        since = "_" if row.retained_since is None else str(row.retained_since)
        lines.append(f"# {i}\t{row.form}\t{row.mem_load}\t{since}")
    return "\n".join(lines) + "\n"
