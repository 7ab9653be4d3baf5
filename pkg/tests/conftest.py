from pathlib import Path

import pytest

from emg.grammar import read_grammar

GRAMMARS = Path(__file__).resolve().parent.parent / "grammars"


def load(name):
    return read_grammar(GRAMMARS / f"{name}.emg")


@pytest.fixture
def g24():
    return load("g24")


@pytest.fixture
def grammar():
    return load
