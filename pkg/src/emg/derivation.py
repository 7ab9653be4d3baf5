"""Top-down derivation shared by generation and parsing.

A :class:`Derivation` is one branch: a tree rooted in a start-category item,
a current node, and a log of steps.  It advances deterministically (memory
re-merges first, then ascent out of closed nodes) until it needs the next
input item; choosing that item is the caller's business.  ``derive`` feeds a
fixed item sequence, ``generate`` and :mod:`emg.parsing` branch over
candidates with :func:`explore`.
"""

from __future__ import annotations

import copy
import enum
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .grammar import (
    ExpectFeature,
    Grammar,
    LexicalItem,
    Linearization,
    Polarity,
    ProbeMode,
    refines,
)
from .ops import Node, label_matches, op_inherit, op_merge, op_move, op_success

DEFAULT_MAX_EMPTY = 3
DEFAULT_MAX_BRANCHES = 200_000


class StepKind(enum.Enum):
    MERGE_INPUT = "MERGE_INPUT"
    MERGE_MEMORY = "MERGE_MEMORY"
    MOVE = "MOVE"
    INHERIT = "INHERIT"
    SUCCESS_CHECK = "SUCCESS_CHECK"
    ASCEND = "ASCEND"
    POSTULATE_EMPTY = "POSTULATE_EMPTY"
    SUSPEND = "SUSPEND"
    RESUME = "RESUME"


class Status(enum.Enum):
    RUNNING = "RUNNING"
    SUCCESS = "SUCCESS"
    FAIL = "FAIL"


@dataclass(frozen=True)
class Step:
    kind: StepKind
    detail: str
    mem_load: int
    words: int  # overt tokens consumed when the step was taken
    oldest: int | None = None  # 1-based word index of the oldest held item


@dataclass(frozen=True)
class Token:
    """One input choice: a lexical item, optionally delaying one of its expectations."""

    item: LexicalItem
    suspend: int | None = None

    def __str__(self) -> str:
        s = str(self.item)
        return s if self.suspend is None else f"{s} (delay #{self.suspend})"


class SearchLimitExceeded(RuntimeError):
    pass


STOP = "STOP"


class Derivation:
    def __init__(self, grammar: Grammar, root_item: LexicalItem):
        if not refines(root_item.label, grammar.params.start):
            raise ValueError(f"root {root_item} does not carry the start category")
        self.grammar = grammar
        self.params = grammar.params
        self.root = Node(root_item, self.params.memory_policy, position=None)
        self.cn = self.root
        self.nodes: list[Node] = [self.root]
        self.steps: list[Step] = []
        self.choices: list[Token] = []
        self.consumed = 0
        self.empties = 0
        self.empty_nodes: list[Node] = []
        self.status = Status.RUNNING
        self.reason: str | None = None
        if root_item.is_empty:
            self.empty_nodes.append(self.root)
        else:
            self.root.position = 0
            self.consumed = 1

    # -- bookkeeping -------------------------------------------------------

    @property
    def failed(self) -> bool:
        return self.status is Status.FAIL

    @property
    def ok(self) -> bool:
        return self.status is Status.SUCCESS

    def mem_load(self) -> int:
        return sum(len(n.mem) for n in self.nodes)

    def oldest_held(self) -> int | None:
        positions = [slot.source.position for n in self.nodes for slot in n.mem
                     if slot.source.position is not None]
        return min(positions) + 1 if positions else None

    def _log(self, kind: StepKind, detail: str) -> None:
        self.steps.append(Step(kind, detail, self.mem_load(), self.consumed, self.oldest_held()))

    def fail(self, reason: str) -> None:
        self.status = Status.FAIL
        self.reason = reason

    def clone(self) -> Derivation:
        memo = {id(self.grammar): self.grammar}
        for item in self.grammar.items:
            memo[id(item)] = item
        return copy.deepcopy(self, memo)

    @property
    def words(self) -> list[str]:
        overt = sorted((n for n in self.nodes if n.origin is None and n.position is not None),
                       key=lambda n: n.position)
        return [n.item.phon for n in overt]

    # -- the loop ----------------------------------------------------------

    def advance(self) -> ExpectFeature | None:
        """Run until the next input item is needed.

        Returns the pending expectation, or ``None`` when the tree is closed
        or the branch failed.
        """
        while self.status is Status.RUNNING:
            cn = self.cn
            if cn.expect:
                if self._merge_from_memory():
                    continue
                if self.failed:
                    return None
                return cn.expect[0]
            if not self._check_success(cn):
                return None
            if cn is self.root:
                return None
            self.cn = cn.parent
            self._log(StepKind.ASCEND, f"{cn.describe()} -> {self.cn.describe()}")
        return None

    def _check_success(self, node: Node) -> bool:
        ok = op_success(node)
        self._log(StepKind.SUCCESS_CHECK, f"{node.describe()} {'ok' if ok else STOP}")
        if not ok:
            held = ", ".join(s.describe() for s in node.mem)
            self.fail(f"{STOP}: unlicensed {held} at right edge {node.describe()}")
        return ok

    def _merge_from_memory(self) -> bool:
        cn = self.cn
        feature = cn.expect[0]
        for i in cn.mem.probe_order():
            slot = cn.mem.slots[i]
            if feature.polarity is Polarity.SELECT:
                if op_merge(cn, slot, True, self.params):
                    cn.mem.pop(i)
                    node = slot
                    break
            else:
                # licensing does not consume the label: the slot stays put
                node = slot.stripped_copy()
                if op_merge(cn, node, True, self.params):
                    slot.agr = dict(node.agr)
                    slot.suspended = []
                    break
            if self.params.probe is ProbeMode.PREFIX:
                return False
        else:
            return False
        self.nodes.append(node)
        self._log(StepKind.MERGE_MEMORY, f"{cn.describe()} {feature} {node.describe()}")
        self._after_merge(cn, node, feature, from_memory=True)
        return True

    def _will_move(self, cn: Node, node: Node, feature: ExpectFeature, from_memory: bool) -> bool:
        if not node.expected:
            return False
        if feature.polarity is Polarity.LICENSE:
            # retained in place when re-licensed from memory; an input item
            # licensed by the last expectation has nothing left to license it
            return not from_memory and bool(cn.expect)
        return True

    def _after_merge(self, cn: Node, node: Node, feature: ExpectFeature, from_memory: bool) -> None:
        if from_memory and node.suspended:
            node.expect = list(node.suspended)
            node.suspended = []
            self._log(StepKind.RESUME, f"{node.describe()}")
        if self._will_move(cn, node, feature, from_memory):
            copy_ = op_move(cn, node)
            self._log(StepKind.MOVE, f"{copy_.describe()} -> mem of {cn.describe()}")
        elif node.expected and feature.polarity is Polarity.LICENSE and from_memory:
            self._log(StepKind.MOVE, f"{node.describe()} retained in mem of {cn.describe()}")
        if op_inherit(cn, node):
            self._log(StepKind.INHERIT,
                      f"last expectation: mem of {cn.describe()} -> {node.describe()}"
                      f" ({len(node.mem)} slot(s))")
        elif cn.mem:
            self._log(StepKind.INHERIT, f"blocked: {node.describe()} is a nested expansion")
        if node.expect:
            self.cn = node
        else:
            self._check_success(node)

    def can_merge(self, item: LexicalItem) -> bool:
        """Would ``item`` merge with the pending expectation (label and agreement)?"""
        cn = self.cn
        if not cn.expect:
            return False
        probe = Node(item, self.params.memory_policy)
        if not label_matches(cn, probe):
            return False
        from .ops import op_agree
        holder = Node(cn.item, self.params.memory_policy)
        holder.agr = dict(cn.agr)
        return op_agree(holder, probe, False, self.params)

    def merge_input(self, token: Token | LexicalItem) -> bool:
        """Merge the next input item under the pending expectation."""
        if isinstance(token, LexicalItem):
            token = Token(token)
        cn = self.cn
        if self.status is not Status.RUNNING or not cn.expect:
            raise RuntimeError("no pending expectation to merge into")
        feature = cn.expect[0]
        item = token.item
        node = Node(item, self.params.memory_policy,
                    position=None if item.is_empty else self.consumed)
        if token.suspend is not None:
            if not self.params.delayed_expectation:
                self.fail("delayed expectation is switched off")
                return False
            if not 0 <= token.suspend < len(node.expect):
                raise ValueError(f"no expectation #{token.suspend} on {item}")
            node.suspended = [node.expect.pop(token.suspend)]
        if not label_matches(cn, node):
            self.fail(f"label mismatch: {cn.describe()} expects {feature}, got {node.describe()}")
            return False
        if not op_merge(cn, node, False, self.params):
            self.fail(f"agreement failure: {cn.describe()} {feature} {node.describe()}")
            return False
        self.choices.append(token)
        self.nodes.append(node)
        if item.is_empty:
            self.empties += 1
            self.empty_nodes.append(node)
            self._log(StepKind.POSTULATE_EMPTY, f"{cn.describe()} {feature} {node.describe()}")
        else:
            self.consumed += 1
            self._log(StepKind.MERGE_INPUT, f"{cn.describe()} {feature} {node.describe()}")
        if node.suspended:
            self._log(StepKind.SUSPEND, f"{node.suspended[0]} of {node.describe()}")
            if not self._will_move(cn, node, feature, False):
                self.fail(f"delayed {node.suspended[0]} can never be resumed")
                return False
        self._after_merge(cn, node, feature, from_memory=False)
        return not self.failed

    def finish(self) -> bool:
        """Final sweep once input is exhausted and the tree is closed."""
        if self.status is not Status.RUNNING:
            return self.ok
        for node in self.nodes:
            if node.expect:
                self.fail(f"leftover expectations: {node.describe()}")
                return False
            if node.suspended:
                self.fail(f"unresumed delayed expectation on {node.describe()}")
                return False
            if node.mem:
                held = ", ".join(s.describe() for s in node.mem)
                self.fail(f"{STOP}: unlicensed {held} in {node.describe()} at end")
                return False
        self.status = Status.SUCCESS
        return True


def derive(g: Grammar, root_item: LexicalItem, tokens: Iterable[Token | LexicalItem]) -> Derivation:
    """Run the derivation over a fixed sequence of items (empty ones included).

    An overt root item counts as the first word and is not repeated in
    ``tokens``.
    """
    d = Derivation(g, root_item)
    pending = list(tokens)
    i = 0
    while True:
        expectation = d.advance()
        if d.failed:
            break
        if expectation is None:
            if i < len(pending):
                d.fail(f"leftover input: {len(pending) - i} item(s)")
            else:
                d.finish()
            break
        if i >= len(pending):
            d.fail(f"leftover expectations: {d.cn.describe()} still expects {expectation}")
            break
        if not d.merge_input(pending[i]):
            break
        i += 1
    return d


def linearize(tree: Derivation | Node, linearization: Linearization | None = None) -> list[str]:
    """Spell out overt forms.

    DEFAULT emits each item before its dependents; HEAD_MEDIAL emits an item
    with several expectations after its first dependent.  Memory copies and
    empty items are silent.
    """
    if isinstance(tree, Derivation):
        if linearization is None:
            linearization = tree.params.linearization
        tree = tree.root
    linearization = linearization or Linearization.DEFAULT
    out: list[str] = []

    def visit(node: Node) -> None:
        deps = [child for _, child in node.dependents]
        medial = (linearization is Linearization.HEAD_MEDIAL and node.origin is None
                  and len(node.item.expect) > 1 and deps)
        if medial:
            visit(deps[0])
            deps = deps[1:]
        if node.phon is not None:
            out.append(node.phon)
        for child in deps:
            visit(child)

    visit(tree)
    return out


def suspension_options(d: Derivation, item: LexicalItem) -> list[int | None]:
    """Delay choices worth branching on for ``item`` at the pending expectation."""
    if not d.params.delayed_expectation or not item.expect:
        return [None]
    cn = d.cn
    feature = cn.expect[0]
    survives = len(item.expected) > 1 or feature.polarity is Polarity.LICENSE
    if feature.polarity is Polarity.LICENSE and len(cn.expect) == 1:
        survives = False
    if not survives:
        return [None]
    return [None, *range(len(item.expect))]


@dataclass
class SearchStats:
    explored: int = 0
    abandoned: int = 0
    leaves: int = 0
    failures: list[tuple[int, str]] = field(default_factory=list)
    deepest: Derivation | None = None

    def best_failure(self) -> str | None:
        if not self.failures:
            return None
        return max(self.failures, key=lambda f: f[0])[1]


Proposer = Callable[[Derivation, ExpectFeature], Sequence[Token]]


def max_branches_default() -> int:
    value = os.environ.get("EMG_MAX_BRANCHES")
    return int(value) if value else DEFAULT_MAX_BRANCHES


def explore(
    starts: Sequence[Derivation],
    propose: Proposer,
    closed: Callable[[Derivation], bool],
    *,
    max_branches: int | None = None,
    limit: int | None = None,
    stats: SearchStats | None = None,
) -> tuple[list[Derivation], SearchStats]:
    """Depth-first search over input choices.

    ``closed(d)`` decides whether a derivation whose tree closed may finish
    (e.g. all input consumed).  Branches are expanded in proposal order.
    """
    if max_branches is None:
        max_branches = max_branches_default()
    stats = stats or SearchStats()
    done: list[Derivation] = []
    stack = list(reversed(starts))
    stats.explored += len(starts)

    def dead(d: Derivation) -> None:
        stats.abandoned += 1
        stats.leaves += 1
        stats.failures.append((d.consumed, d.reason or "failed"))
        if stats.deepest is None or d.consumed > stats.deepest.consumed:
            stats.deepest = d

    while stack:
        d = stack.pop()
        expectation = d.advance()
        if d.failed:
            dead(d)
            continue
        if expectation is None:
            if closed(d) and d.finish():
                stats.leaves += 1
                done.append(d)
                if limit is not None and len(done) >= limit:
                    break
            else:
                if not d.failed:
                    d.fail(f"leftover input after word {d.consumed}")
                dead(d)
            continue
        options = propose(d, expectation)
        if not options:
            d.fail(f"no candidate for {expectation} at word {d.consumed + 1}")
            dead(d)
            continue
        children = []
        for token in options:
            stats.explored += 1
            if stats.explored > max_branches:
                raise SearchLimitExceeded(
                    f"search exceeded {max_branches} branches (set EMG_MAX_BRANCHES to raise)")
            probe = Node(token.item)
            if not label_matches(d.cn, probe):
                stats.abandoned += 1
                stats.leaves += 1
                stats.failures.append((d.consumed, f"label mismatch: {d.cn.describe()} "
                                                   f"expects {expectation}, got {probe.describe()}"))
                continue
            child = d.clone() if len(options) > 1 else d
            if child.merge_input(token):
                children.append(child)
            else:
                dead(child)
        stack.extend(reversed(children))
    return done, stats


@dataclass(frozen=True)
class Generated:
    sentence: tuple[str, ...]
    derivation: Derivation

    @property
    def text(self) -> str:
        return " ".join(self.sentence)


def generate(g: Grammar, max_len: int, *, max_empty: int = DEFAULT_MAX_EMPTY,
             max_branches: int | None = None) -> list[Generated]:
    """Enumerate every sentence of at most ``max_len`` overt words.

    The proposer only offers items whose label fits the pending expectation.
    Results are sorted by sentence and deduplicated by dependency structure.
    """
    from .output import to_dependencies

    if max_len < 0:
        raise ValueError("max_len must be >= 0")

    def propose(d: Derivation, expectation: ExpectFeature) -> list[Token]:
        out = []
        for item in g.items:
            if not refines(item.label, expectation.category):
                continue
            if item.is_empty and d.empties >= max_empty:
                continue
            if not item.is_empty and d.consumed >= max_len:
                continue
            out.extend(Token(item, s) for s in suspension_options(d, item))
        return out

    starts = [Derivation(g, r) for r in g.roots()
              if r.is_empty or max_len >= 1]
    found, _ = explore(starts, propose, lambda d: True, max_branches=max_branches)
    seen = {}
    for d in found:
        key = (tuple(linearize(d, Linearization.DEFAULT)), to_dependencies(d).key())
        seen.setdefault(key, d)
    return [Generated(k[0], d) for k, d in sorted(seen.items(), key=lambda kv: kv[0])]
