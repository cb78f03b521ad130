"""Bundled protocol corpus."""

from __future__ import annotations

from importlib import resources

from .ast import ProtocolSpec
from .parser import parse_protocol

CORPUS = (
    "mux",
    "mux2d",
    "lock_server",
    "decentralized_lock",
    "two_phase_commit",
    "toy_quorum",
)


def corpus_names() -> tuple[str, ...]:
    return CORPUS


def corpus_source(name: str) -> str:
    path = resources.files("paraverify").joinpath("corpus", f"{name}.pv")
    return path.read_text(encoding="utf-8")


def load_corpus_protocol(name: str) -> ProtocolSpec:
    return parse_protocol(corpus_source(name), name=name)
