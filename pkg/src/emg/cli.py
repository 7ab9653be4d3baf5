"""Command line: ``emg parse``, ``emg generate``, ``emg check``.

Exit status is 0 for accept / all pass, 1 for reject / some fail and 2 for
grammar, corpus or I/O errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from .derivation import SearchLimitExceeded, generate
from .grammar import GrammarError, read_grammar
from .output import format_trace, format_tsv, to_dependencies, to_trace
from .parsing import ParseConfig, Strategy, parse

ACCEPT, REJECT, ERROR = 0, 1, 2


class CorpusError(ValueError):
    pass


@dataclass
class CorpusEntry:
    sentence: str
    expected: bool
    comment: str | None = None


def read_corpus(path) -> list[CorpusEntry]:
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) not in (2, 3) or fields[1].strip() not in ("0", "1"):
                raise CorpusError(f"{path}:{lineno}: expected SENTENCE<TAB>1|0(<TAB>COMMENT)")
            comment = fields[2] if len(fields) == 3 else None
            entries.append(CorpusEntry(fields[0].strip(), fields[1].strip() == "1", comment))
    return entries


def _config(args) -> ParseConfig:
    return ParseConfig(
        strategy=Strategy.EXHAUSTIVE if args.beam is None else Strategy.BEAM,
        beam_width=1 if args.beam is None else args.beam,
        priming=not args.no_priming,
        max_empty=args.max_empty,
        eager_empty=args.eager_empty,
    )


def cmd_parse(args) -> int:
    g = read_grammar(args.grammar)
    forest = parse(g, args.sentence, _config(args))
    out = sys.stdout
    if not forest:
        out.write(f"# status: FAIL({forest.failure})\n")
        if args.trace and forest.deepest_failure is not None:
            out.write(format_trace(to_trace(forest.deepest_failure)))
        return REJECT
    shown = forest.analyses if args.all else forest.analyses[:1]
    for i, analysis in enumerate(shown):
        if i:
            out.write("\n")
        out.write(format_tsv(analysis.graph))
        if args.trace:
            out.write(format_trace(to_trace(analysis.derivation)))
    return ACCEPT


def cmd_generate(args) -> int:
    g = read_grammar(args.grammar)
    for gen in generate(g, args.max_len, max_empty=args.max_empty):
        sys.stdout.write(gen.text + "\n")
        if args.trees:
            sys.stdout.write(format_tsv(to_dependencies(gen.derivation)) + "\n")
    return ACCEPT


def check_corpus(g, entries, cfg: ParseConfig | None = None) -> list[tuple[CorpusEntry, bool]]:
    """(entry, passed) in corpus order; verdicts come from ``parse``."""
    return [(e, bool(parse(g, e.sentence, cfg)) == e.expected) for e in entries]


def cmd_check(args) -> int:
    g = read_grammar(args.grammar)
    entries = read_corpus(args.corpus)
    results = check_corpus(g, entries, _config(args))
    for entry, passed in results:
        verdict = "ACCEPT" if entry.expected else "REJECT"
        note = f"\t# {entry.comment}" if entry.comment else ""
        print(f"{'PASS' if passed else 'FAIL'}\t{verdict}\t{entry.sentence}{note}")
    n_pass = sum(passed for _, passed in results)
    print(f"# {n_pass} passed, {len(results) - n_pass} failed, {len(results)} total")
    return ACCEPT if n_pass == len(results) else REJECT


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--beam", type=int, metavar="K", help="keep the K best branches per choice")
    p.add_argument("--no-priming", action="store_true",
                   help="offer every homophone, not only those fitting the expectation")
    p.add_argument("--max-empty", type=int, default=3, metavar="N",
                   help="empty items postulated per derivation (default 3)")
    p.add_argument("--eager-empty", action="store_true",
                   help="postulate empty items even when the input word fits")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="emg", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a sentence, print dependencies as TSV")
    p.add_argument("grammar")
    p.add_argument("sentence")
    p.add_argument("--all", action="store_true", help="print every analysis")
    p.add_argument("--trace", action="store_true", help="append the derivation trace")
    _add_search_flags(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("generate", help="list sentences up to a length")
    p.add_argument("grammar")
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--max-empty", type=int, default=3)
    p.add_argument("--trees", action="store_true", help="print each dependency TSV")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("check", help="check a corpus of accept/reject judgements")
    p.add_argument("grammar")
    p.add_argument("corpus")
    _add_search_flags(p)
    p.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "max_len", 0) is not None and getattr(args, "max_len", 0) < 0:
            raise ValueError("--max-len must be >= 0")
        return args.func(args)
    except (OSError, GrammarError, CorpusError, SearchLimitExceeded, ValueError) as exc:
        print(f"emg: error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
