"""Structure-building operations over derivation nodes.

MERGE, AGREE, UNIFY, MOVE, INHERIT and SUCCESS, plus the per-node memory
buffer they share.  Failures are reported as return values; they drive
backtracking in the search layer and are not exceptional.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping

from .grammar import (
    AgrFeature,
    Category,
    ExpectFeature,
    LexicalItem,
    MemoryPolicy,
    ParameterSet,
    Polarity,
    agr_dict,
    refines,
)

_ids = itertools.count()


class MemoryBuffer:
    """Ordered store of stripped node copies.

    Slots are kept in insertion order; the policy only decides the order in
    which they are probed (FIFO: oldest first, LIFO: newest first).
    """

    def __init__(self, policy: MemoryPolicy = MemoryPolicy.FIFO, slots=()):
        self.policy = policy
        self.slots: list[Node] = list(slots)

    def push(self, node: Node, index: int | None = None) -> None:
        if node.phon is not None or not node.expected:
            raise ValueError("only stripped copies with pending labels go to memory")
        if index is None:
            self.slots.append(node)
        else:
            self.slots.insert(index, node)

    def pop(self, index: int) -> Node:
        if not self.slots:
            raise IndexError("pop from an empty memory buffer")
        return self.slots.pop(index)

    def probe_order(self) -> list[int]:
        idx = list(range(len(self.slots)))
        return idx if self.policy is MemoryPolicy.FIFO else idx[::-1]

    def extend(self, other: MemoryBuffer) -> None:
        self.slots.extend(other.slots)

    def clear(self) -> None:
        self.slots.clear()

    def __len__(self) -> int:
        return len(self.slots)

    def __iter__(self):
        return iter(self.slots)

    def __bool__(self) -> bool:
        return bool(self.slots)

    def __repr__(self) -> str:
        return f"MemoryBuffer({self.policy.value}, {self.slots!r})"


def push(m: MemoryBuffer, n: Node) -> None:
    m.push(n)


def pop(m: MemoryBuffer, index: int) -> Node:
    return m.pop(index)


class Node:
    """An in-derivation instance of a lexical item.

    ``origin`` is set on memory copies and points at the node that was
    first merged from the input; copies have no phonology.
    """

    def __init__(
        self,
        item: LexicalItem,
        policy: MemoryPolicy = MemoryPolicy.FIFO,
        *,
        origin: Node | None = None,
        position: int | None = None,
    ):
        self.uid = next(_ids)
        self.item = item
        self.expected: list[Category] = list(item.expected)
        self.expect: list[ExpectFeature] = list(item.expect)
        self.agr: dict[str, str | None] = agr_dict(item.agr)
        self.mem = MemoryBuffer(policy)
        self.parent: Node | None = None
        self.dependents: list[tuple[ExpectFeature, Node]] = []
        self.suspended: list[ExpectFeature] = []
        self.origin = origin
        self.position = position

    @property
    def label(self) -> Category | None:
        return self.expected[0] if self.expected else None

    @property
    def phon(self) -> str | None:
        return None if self.origin is not None else self.item.phon

    @property
    def source(self) -> Node:
        return self.origin if self.origin is not None else self

    def stripped_copy(self) -> Node:
        copy = Node(self.item, self.mem.policy, origin=self.source)
        copy.expected = list(self.expected)
        copy.expect = []
        copy.agr = dict(self.agr)
        copy.suspended = list(self.suspended)
        return copy

    def describe(self) -> str:
        name = self.item.phon or "_"
        if self.origin is not None:
            name = f"<{name}>"
        feats = ",".join(map(str, self.expected)) or "-"
        exp = " ".join(map(str, self.expect))
        return f"[{feats} {name}{' ' + exp if exp else ''}]"

    def __repr__(self) -> str:
        return f"Node{self.describe()}"


def _as_map(features) -> dict[str, str | None]:
    if isinstance(features, Mapping):
        return dict(features)
    return agr_dict(features)


def unify_maps(a: Mapping[str, str | None], b: Mapping[str, str | None]):
    """Attribute-wise unification; ``None`` on a value clash."""
    out = dict(a)
    for attr, value in b.items():
        if attr not in out or out[attr] is None:
            out[attr] = value
        elif value is not None and value != out[attr]:
            return None
    return out


def op_unify(a: Iterable[AgrFeature], b: Iterable[AgrFeature]) -> frozenset[AgrFeature] | None:
    """Unify two agreement feature sets.

    A valued feature is more specific than the bare attribute, so
    ``{num} + {num.pl} = {num.pl}``; distinct attributes simply combine.
    Returns ``None`` when both sides value an attribute differently.
    """
    out = unify_maps(_as_map(a), _as_map(b))
    if out is None:
        return None
    return frozenset(AgrFeature(k, v) for k, v in out.items())


def _active_entry(label, params: ParameterSet, from_memory: bool):
    if label is None:
        return None
    entry = params.agr_entry(label)
    if entry is None or (entry.moved_only and not from_memory):
        return None
    return entry


def op_agree(n1: Node, n2: Node, from_memory: bool, params: ParameterSet) -> bool:
    # both categories must be agreement categories; moved-only entries count
    # only when n2 comes out of memory
    e1 = _active_entry(n1.item.label, params, from_memory)
    e2 = _active_entry(n2.label, params, from_memory)
    if e1 is None or e2 is None:
        return True
    governed = e1.attributes | e2.attributes
    a = {k: v for k, v in n1.agr.items() if k in governed}
    b = {k: v for k, v in n2.agr.items() if k in governed}
    unified = unify_maps(a, b)
    if unified is None:
        return False
    n1.agr.update(unified)
    n2.agr.update(unified)
    return True


def label_matches(n1: Node, n2: Node) -> bool:
    return bool(n1.expect) and n2.label is not None and refines(n2.label, n1.expect[0].category)


def op_merge(n1: Node, n2: Node, from_memory: bool, params: ParameterSet) -> bool:
    """Merge ``n2`` under ``n1``'s first expectation.

    SELECT (=X) consumes n2's label, LICENSE (+X) leaves it in place so the
    item must be moved.  Nothing is changed when the merge fails.
    """
    if not label_matches(n1, n2):
        return False
    if not op_agree(n1, n2, from_memory, params):
        return False
    feature = n1.expect.pop(0)
    if feature.polarity is Polarity.SELECT:
        n2.expected.pop(0)
    n1.dependents.append((feature, n2))
    n2.parent = n1
    return True


def op_move(cn: Node, n2: Node) -> Node | None:
    """Push a stripped copy of ``n2`` into ``cn``'s buffer if it still has a label."""
    if not n2.expected:
        return None
    copy = n2.stripped_copy()
    cn.mem.push(copy)
    # suspended expectations now travel with the copy only
    n2.suspended = []
    return copy


def op_inherit(parent: Node, child: Node) -> bool:
    """Hand the buffer down through the last expectation; nested expansions get nothing."""
    if parent.expect:
        return False
    child.mem.extend(parent.mem)
    parent.mem.clear()
    return True


def op_success(n: Node) -> bool:
    """False (STOP) when a right-edge node still holds unlicensed items."""
    if n.expect:
        return True
    return not n.mem
