"""Categories, features, lexical items and the grammar file format.

A grammar file is line oriented::

    # comment
    @start C
    @agr D,A,N {num, gen}
    @agr V.pp^M {num, gen}
    @param memory fifo
    the :: D {num.s} =N
    _ :: C +D =T

``_`` (or ``ε``) marks a phonetically empty item.
"""

from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

log = logging.getLogger(__name__)

EMPTY_FORMS = ("_", "ε")

_SEGMENT = re.compile(r"[A-Za-z0-9_]+\Z")


class GrammarError(ValueError):
    """Raised for malformed grammar sources."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


@dataclass(frozen=True, order=True)
class Category:
    path: tuple[str, ...]

    def __post_init__(self):
        if not self.path:
            raise ValueError("a category needs at least one segment")
        for seg in self.path:
            if not _SEGMENT.match(seg):
                raise ValueError(f"bad category segment {seg!r}")

    @classmethod
    def parse(cls, text: str) -> Category:
        return cls(tuple(text.split(".")))

    def __str__(self) -> str:
        return ".".join(self.path)


def refines(a: Category, b: Category) -> bool:
    """True iff ``a`` is ``b`` or a sub-category of it (V.pp refines V)."""
    return a.path[: len(b.path)] == b.path


@dataclass(frozen=True, order=True)
class AgrFeature:
    attribute: str
    value: str | None = None

    @classmethod
    def parse(cls, text: str) -> AgrFeature:
        attr, _, value = text.partition(".")
        if not attr or not _SEGMENT.match(attr) or (value and not _SEGMENT.match(value)):
            raise ValueError(f"bad agreement feature {text!r}")
        return cls(attr, value or None)

    def __str__(self) -> str:
        return self.attribute if self.value is None else f"{self.attribute}.{self.value}"


def agr_dict(features: Iterable[AgrFeature]) -> dict[str, str | None]:
    """Attribute -> value map; at most one value per attribute."""
    out: dict[str, str | None] = {}
    for f in features:
        if f.attribute in out and out[f.attribute] != f.value:
            raise ValueError(f"two values for attribute {f.attribute!r}")
        out[f.attribute] = f.value
    return out


def format_agr(agr: Mapping[str, str | None]) -> str:
    return ", ".join(str(AgrFeature(a, v)) for a, v in sorted(agr.items()))


class Polarity(enum.Enum):
    SELECT = "="
    LICENSE = "+"


@dataclass(frozen=True)
class ExpectFeature:
    polarity: Polarity
    category: Category

    @classmethod
    def parse(cls, text: str) -> ExpectFeature:
        return cls(Polarity(text[0]), Category.parse(text[1:]))

    def __str__(self) -> str:
        return f"{self.polarity.value}{self.category}"


@dataclass(frozen=True)
class LexicalItem:
    phon: str | None
    expected: tuple[Category, ...]
    expect: tuple[ExpectFeature, ...] = ()
    agr: frozenset[AgrFeature] = frozenset()

    def __post_init__(self):
        if not self.expected:
            raise ValueError("every lexical item needs a label")
        agr_dict(self.agr)

    @property
    def label(self) -> Category:
        return self.expected[0]

    @property
    def is_empty(self) -> bool:
        return self.phon is None

    def __str__(self) -> str:
        phon = "_" if self.phon is None else self.phon
        parts = [phon, "::", ",".join(map(str, self.expected))]
        if self.agr:
            parts.append("{" + ", ".join(sorted(map(str, self.agr))) + "}")
        parts.extend(map(str, self.expect))
        return " ".join(parts)


class Linearization(enum.Enum):
    DEFAULT = "default"
    HEAD_MEDIAL = "head_medial"


class MemoryPolicy(enum.Enum):
    FIFO = "fifo"
    LIFO = "lifo"


class ProbeMode(enum.Enum):
    PREFIX = "prefix"
    FIRST_MATCH = "first_match"


@dataclass(frozen=True)
class AgrEntry:
    attributes: frozenset[str]
    moved_only: bool = False


@dataclass(frozen=True)
class ParameterSet:
    start: Category
    agr: Mapping[Category, AgrEntry] = field(default_factory=dict)
    delayed_expectation: bool = False
    linearization: Linearization = Linearization.DEFAULT
    memory_policy: MemoryPolicy = MemoryPolicy.FIFO
    probe: ProbeMode = ProbeMode.PREFIX

    def agr_entry(self, label: Category) -> AgrEntry | None:
        """The entry keyed by the most refined category that ``label`` refines."""
        best = None
        for key, entry in self.agr.items():
            if refines(label, key) and (best is None or len(key.path) > len(best[0].path)):
                best = (key, entry)
        return best[1] if best else None


_SWITCHES = {
    "delayed_expectation": ("delayed_expectation", {"on": True, "off": False}),
    "memory": ("memory_policy", {p.value: p for p in MemoryPolicy}),
    "linearization": ("linearization", {p.value: p for p in Linearization}),
    "probe": ("probe", {p.value: p for p in ProbeMode}),
}


@dataclass(frozen=True)
class Grammar:
    items: tuple[LexicalItem, ...]
    params: ParameterSet
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        index: dict[str, list[LexicalItem]] = {}
        for item in self.items:
            if item.phon is not None:
                index.setdefault(item.phon, []).append(item)
        object.__setattr__(self, "_index", {k: tuple(v) for k, v in index.items()})

    def lookup(self, form: str) -> list[LexicalItem]:
        return list(self._index.get(form, ()))

    def lookup_empty(self, category: Category | None = None) -> list[LexicalItem]:
        return [
            item for item in self.items
            if item.is_empty and (category is None or refines(item.label, category))
        ]

    @property
    def forms(self) -> list[str]:
        return sorted(self._index)

    @property
    def categories(self) -> frozenset[Category]:
        cats = {self.params.start, *self.params.agr}
        for item in self.items:
            cats.update(item.expected)
            cats.update(f.category for f in item.expect)
        return frozenset(cats)

    def roots(self) -> list[LexicalItem]:
        return [item for item in self.items if refines(item.label, self.params.start)]

    def with_params(self, **changes) -> Grammar:
        from dataclasses import replace
        return Grammar(self.items, replace(self.params, **changes), self.warnings)


def lookup(g: Grammar, form: str) -> list[LexicalItem]:
    return g.lookup(form)


def lookup_empty(g: Grammar, category: Category | None = None) -> list[LexicalItem]:
    return g.lookup_empty(category)


_ENTRY = re.compile(r"^(?P<phon>\S+)\s+::\s+(?P<rest>.+)$")
_AGR_DECL = re.compile(r"^@agr\s+(?P<cats>[^{]+?)\s*\{(?P<attrs>[^}]*)\}\s*$")


def _parse_agr_block(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def parse_item(line: str, lineno: int | None = None) -> LexicalItem:
    m = _ENTRY.match(line.strip())
    if not m:
        raise GrammarError(f"expected 'PHON :: CATEGORY ...', got {line.strip()!r}", lineno)
    phon = None if m["phon"] in EMPTY_FORMS else m["phon"]
    rest = m["rest"].strip()
    agr_text = None
    if "{" in rest:
        head, _, tail = rest.partition("{")
        agr_text, close, after = tail.partition("}")
        if not close:
            raise GrammarError("unterminated '{'", lineno)
        rest = head + " " + after
    tokens = re.sub(r"\s*,\s*", ",", rest.strip()).split()
    if not tokens:
        raise GrammarError("missing expected category", lineno)
    try:
        expected = tuple(Category.parse(c.strip()) for c in tokens[0].split(",") if c.strip())
        expect = []
        for tok in tokens[1:]:
            if tok[0] not in "=+":
                raise GrammarError(f"expectation {tok!r} must start with '=' or '+'", lineno)
            expect.append(ExpectFeature.parse(tok))
        agr = frozenset(AgrFeature.parse(t) for t in _parse_agr_block(agr_text or ""))
        return LexicalItem(phon, expected, tuple(expect), agr)
    except GrammarError:
        raise
    except ValueError as exc:
        raise GrammarError(str(exc), lineno) from None


def load_grammar(text: str) -> Grammar:
    """Parse a grammar source. Lexical-entry order is preserved."""
    items: list[LexicalItem] = []
    agr: dict[Category, AgrEntry] = {}
    switches: dict[str, object] = {}
    start: Category | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            if line.startswith("@start"):
                parts = line.split()
                if len(parts) != 2:
                    raise GrammarError("usage: @start CATEGORY", lineno)
                if start is not None:
                    raise GrammarError("duplicate @start", lineno)
                start = Category.parse(parts[1])
            elif line.startswith("@agr"):
                m = _AGR_DECL.match(line)
                if not m:
                    raise GrammarError("usage: @agr CATEGORY(^M)? {ATTR, ...}", lineno)
                attrs = frozenset(_parse_agr_block(m["attrs"]))
                for cat_text in _parse_agr_block(m["cats"]):
                    moved_only = cat_text.endswith("^M")
                    cat = Category.parse(cat_text[:-2] if moved_only else cat_text)
                    if cat in agr:
                        raise GrammarError(f"duplicate @agr for {cat}", lineno)
                    agr[cat] = AgrEntry(attrs, moved_only)
            elif line.startswith("@param"):
                parts = line.split()
                if len(parts) != 3 or parts[1] not in _SWITCHES:
                    raise GrammarError(
                        f"usage: @param {'|'.join(_SWITCHES)} VALUE", lineno)
                name, values = _SWITCHES[parts[1]]
                if name in switches:
                    raise GrammarError(f"duplicate @param {parts[1]}", lineno)
                if parts[2] not in values:
                    raise GrammarError(
                        f"@param {parts[1]} takes one of {', '.join(values)}", lineno)
                switches[name] = values[parts[2]]
            elif line.startswith("@"):
                raise GrammarError(f"unknown directive {line.split()[0]}", lineno)
            else:
                items.append(parse_item(line, lineno))
        except GrammarError:
            raise
        except ValueError as exc:
            raise GrammarError(str(exc), lineno) from None
    if start is None:
        raise GrammarError("missing @start declaration")

    declared = set().union(*(e.attributes for e in agr.values())) if agr else set()
    warnings = []
    for item in items:
        for f in sorted(item.agr):
            if f.attribute not in declared:
                warnings.append(f"attribute {f.attribute!r} of '{item}' is not governed by any @agr")
    for w in warnings:
        log.warning(w)
    params = ParameterSet(start=start, agr=agr, **switches)
    return Grammar(tuple(items), params, tuple(warnings))


def read_grammar(path) -> Grammar:
    with open(path, encoding="utf-8") as fh:
        return load_grammar(fh.read())


def dump_grammar(g: Grammar) -> str:
    """Serialize back to the file format; ``load_grammar`` inverts it."""
    p = g.params
    lines = [f"@start {p.start}"]
    for cat, entry in sorted(p.agr.items()):
        mark = "^M" if entry.moved_only else ""
        lines.append(f"@agr {cat}{mark} {{{', '.join(sorted(entry.attributes))}}}")
    lines.append(f"@param delayed_expectation {'on' if p.delayed_expectation else 'off'}")
    lines.append(f"@param memory {p.memory_policy.value}")
    lines.append(f"@param linearization {p.linearization.value}")
    lines.append(f"@param probe {p.probe.value}")
    lines.extend(str(item) for item in g.items)
    return "\n".join(lines) + "\n"
