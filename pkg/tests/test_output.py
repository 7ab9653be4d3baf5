from emg.derivation import StepKind
from emg.output import (
    format_trace,
    format_tsv,
    parse_tsv,
    per_word_loads,
    to_dependencies,
    to_trace,
)
from emg.parsing import parse

from conftest import load

WALKTHROUGH = {
    ("_", "Maria", "+D"),
    ("_", "ha", "=T"),
    ("ha", "Maria", "+D"),
    ("ha", "cantato", "=V"),
    ("cantato", "Maria", "=D"),
}


def analysis(name, sentence):
    forest = parse(load(name), sentence)
    assert forest, forest.failure
    return forest.analyses[0]


def test_walkthrough_edges():
    a = analysis("g24", "Maria ha cantato")
    assert a.graph.named_edges() == WALKTHROUGH
    assert a.derivation.mem_load() == 0
    assert [t.form for t in a.graph.tokens] == ["Maria", "ha", "cantato", "_"]
    assert a.graph.roots == [4]


def test_walkthrough_tsv():
    text = format_tsv(analysis("g24", "Maria ha cantato").graph)
    assert text == (
        "# status: SUCCESS\n"
        "1\tMaria\t2|3|4\t+D|=D|+D\t1\n"
        "2\tha\t4\t=T\t1\n"
        "3\tcantato\t2\t=V\t0\n"
        "4\t_\t0\troot\t_\n"
    )
    rows = [line.split("\t") for line in text.splitlines()[1:]]
    assert [r[1] for r in rows] == ["Maria", "ha", "cantato", "_"]
    assert [r[4] for r in rows] == ["1", "1", "0", "_"]
    assert rows[3][2:4] == ["0", "root"]


def test_tsv_round_trip():
    for name, sentence in [("g24", "Maria ha cantato"), ("clitic", "Maria l' ha cantata"),
                           ("attachment", "l1 l2 x"), ("copular",
                           "la causa della rivolta sono le foto del muro")]:
        for a in parse(load(name), sentence).analyses:
            again = parse_tsv(format_tsv(a.graph))
            assert again.key() == a.graph.key()
            assert again.status == a.graph.status
            assert [t.mem_load for t in again.tokens] == [t.mem_load for t in a.graph.tokens]


def test_trace_rows():
    report = to_trace(analysis("g24", "Maria ha cantato").derivation)
    assert report.status == "SUCCESS"
    assert [(r.form, r.mem_load) for r in report.per_word] == [("Maria", 1), ("ha", 1), ("cantato", 0)]
    assert [r.retained_since for r in report.per_word] == [1, 1, None]
    text = format_trace(report)
    assert text.startswith("# status: SUCCESS\n")
    assert "# 3\tcantato\t0\t_" in text


def test_trace_of_failure_stops_at_failure():
    forest = parse(load("islands"), "what slept because John saw quickly")
    report = to_trace(forest.deepest_failure)
    assert report.status.startswith("FAIL(STOP")
    last = report.steps[-1]
    assert last.kind is StepKind.SUCCESS_CHECK and last.detail.endswith("STOP")
    assert len(report.per_word) == forest.deepest_failure.consumed


def test_graph_and_trace_agree():
    for name, sentence in [("g24", "Maria ha cantato"), ("unaccusative", "Maria è caduta"),
                           ("subextraction", "of which sculpture is one copy available")]:
        a = analysis(name, sentence)
        loads = per_word_loads(a.derivation)
        overt = [t for t in a.graph.tokens if not t.is_empty]
        assert [t.mem_load for t in overt] == loads
        assert [t.form for t in overt] == sentence.split()
        n_dep = sum(len(n.dependents) for n in a.derivation.nodes)
        assert len(a.graph.edges) == n_dep
        merges = [s for s in a.derivation.steps
                  if s.kind in (StepKind.MERGE_INPUT, StepKind.MERGE_MEMORY, StepKind.POSTULATE_EMPTY)]
        assert len(merges) == n_dep


def test_to_dependencies_of_generated():
    from emg.derivation import generate
    (gen,) = generate(load("g24"), 3)
    assert to_dependencies(gen.derivation).named_edges() == WALKTHROUGH
