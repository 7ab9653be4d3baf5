import subprocess
import sys

import pytest

from emg.cli import ACCEPT, ERROR, REJECT, CorpusError, main, read_corpus

from conftest import GRAMMARS

G24 = str(GRAMMARS / "g24.emg")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_accepts(capsys):
    code, out, _ = run(capsys, "parse", G24, "Maria ha cantato")
    assert code == ACCEPT
    assert out.splitlines()[0] == "# status: SUCCESS"
    assert len(out.splitlines()) == 5


def test_parse_rejects(capsys):
    code, out, _ = run(capsys, "parse", G24, "Maria ha")
    assert code == REJECT
    assert out.startswith("# status: FAIL(")


def test_parse_all(capsys):
    path = str(GRAMMARS / "homophones.emg")
    _, one, _ = run(capsys, "parse", path, "x x x x x y")
    code, every, _ = run(capsys, "parse", path, "x x x x x y", "--all")
    assert code == ACCEPT
    assert one.count("# status: SUCCESS") == 1
    assert every.count("# status: SUCCESS") == 2


def test_parse_trace(capsys):
    code, out, _ = run(capsys, "parse", G24, "Maria ha cantato", "--trace")
    assert code == ACCEPT
    assert "MERGE_MEMORY" in out
    assert "# 1\tMaria\t1\t1" in out


def test_parse_trace_on_failure(capsys):
    path = str(GRAMMARS / "islands.emg")
    code, out, _ = run(capsys, "parse", path, "what slept because John saw quickly", "--trace")
    assert code == REJECT
    assert "STOP" in out and "SUCCESS_CHECK" in out


def test_parse_beam(capsys):
    path = str(GRAMMARS / "homophones.emg")
    code, out, _ = run(capsys, "parse", path, "x x x x x y", "--all", "--beam", "1")
    assert code == ACCEPT and out.count("# status: SUCCESS") == 1


@pytest.mark.parametrize("argv", [
    ["parse", "/nonexistent.emg", "a"],
    ["generate", "/nonexistent.emg", "--max-len", "2"],
    ["check", G24, "/nonexistent.tsv"],
    ["generate", G24, "--max-len", "-1"],
    ["parse", G24, "Maria", "--beam", "0"],
])
def test_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == ERROR
    assert err.startswith("emg: error:")


def test_malformed_grammar(capsys, tmp_path):
    bad = tmp_path / "bad.emg"
    bad.write_text("@start C\nthe D =N\n")
    code, _, err = run(capsys, "parse", str(bad), "the")
    assert code == ERROR and "line 2" in err


def test_generate(capsys):
    code, out, _ = run(capsys, "generate", G24, "--max-len", "3")
    assert code == ACCEPT and out == "Maria ha cantato\n"
    code, out, _ = run(capsys, "generate", str(GRAMMARS / "dogs.emg"), "--max-len", "2", "--trees")
    assert out.splitlines()[0] == "the dogs"
    assert "# status: SUCCESS" in out


@pytest.mark.parametrize("corpus, grammar", [("dp_corpus", "dp"), ("unaccusative_corpus", "unaccusative")])
def test_check_corpus(capsys, corpus, grammar):
    code, out, _ = run(capsys, "check", str(GRAMMARS / f"{grammar}.emg"), str(GRAMMARS / f"{corpus}.tsv"))
    assert code == ACCEPT
    assert out.splitlines()[-1] == "# 4 passed, 0 failed, 4 total"


def test_check_reports_failures(capsys, tmp_path):
    corpus = tmp_path / "c.tsv"
    corpus.write_text("Maria ha cantato\t0\nMaria ha cantato\t1\n")
    code, out, _ = run(capsys, "check", G24, str(corpus))
    assert code == REJECT
    assert out.splitlines()[0] == "FAIL\tREJECT\tMaria ha cantato"
    assert out.splitlines()[1] == "PASS\tACCEPT\tMaria ha cantato"


def test_check_empty_corpus(capsys, tmp_path):
    corpus = tmp_path / "empty.tsv"
    corpus.write_text("# nothing\n\n")
    code, out, _ = run(capsys, "check", G24, str(corpus))
    assert code == ACCEPT and out == "# 0 passed, 0 failed, 0 total\n"


def test_malformed_corpus(capsys, tmp_path):
    corpus = tmp_path / "bad.tsv"
    corpus.write_text("Maria ha cantato\tyes\n")
    with pytest.raises(CorpusError):
        read_corpus(corpus)
    code, _, err = run(capsys, "check", G24, str(corpus))
    assert code == ERROR and ":1:" in err


def test_branch_cap_env(capsys, monkeypatch):
    monkeypatch.setenv("EMG_MAX_BRANCHES", "2")
    code, _, err = run(capsys, "parse", str(GRAMMARS / "homophones.emg"), "x x x x x y")
    assert code == ERROR and "EMG_MAX_BRANCHES" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "emg", "parse", G24, "Maria ha cantato"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("# status: SUCCESS")
