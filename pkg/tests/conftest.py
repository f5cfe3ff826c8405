"""Shared fixtures: the bundled corpus and small inline routines."""

import json
from pathlib import Path

import pytest

from unrolling.parser import parse, parse_file
from unrolling.types import CorpusEntry

DATA_DIR = Path(__file__).resolve().parent.parent / "benchmarks" / "data"


def corpus_entries() -> list[CorpusEntry]:
    with open(DATA_DIR / "corpus.json") as f:
        return [CorpusEntry.model_validate(item) for item in json.load(f)["routines"]]


def corpus_routine(name: str):
    entry = next(e for e in corpus_entries() if e.name == name)
    return parse_file(DATA_DIR / entry.file)


CORPUS_NAMES = [e.name for e in corpus_entries()]

COUNTER = """
routine counter(n: INTEGER)
require
  n >= 0
local
  i: INTEGER
do
  from
    i := 0
  until
    i >= n
  loop
    i := i + 1
  end
ensure
  done: i = n
end
"""

TWO_WAY = """
routine two_way(n: INTEGER)
local
  i: INTEGER
  evens: INTEGER
do
  from
    i := 0
  until
    i >= n
  loop
    if i mod 2 = 0 then
      evens := evens + 1
    else
      evens := evens
    end
    i := i + 1
  end
end
"""


@pytest.fixture
def counter():
    return parse(COUNTER)


@pytest.fixture
def two_way():
    return parse(TWO_WAY)


@pytest.fixture
def factorial():
    return corpus_routine("factorial")


@pytest.fixture
def gcd():
    return corpus_routine("gcd")
