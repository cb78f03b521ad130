from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from paraverify.corpus import corpus_names, load_corpus_protocol


@pytest.fixture(scope="session")
def mux():
    return load_corpus_protocol("mux")


@pytest.fixture(scope="session")
def corpus_specs():
    return {name: load_corpus_protocol(name) for name in corpus_names()}
