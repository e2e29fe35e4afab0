from __future__ import annotations

from pathlib import Path

import pytest

from sstt.checker import Checker
from sstt.core import CubeParam, TopeParam, TriContext, TypedParam
from sstt.corpus import CORPUS_DIR, LEDGER_NAME, load_corpus, read_ledger

NEGATIVE_DIR = Path(__file__).parent / "negative"


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture(scope="session")
def corpus_env(corpus):
    assert all(r.ok for r in corpus.files), "corpus must be green"
    return corpus.env


@pytest.fixture(scope="session")
def checker(corpus_env):
    return Checker(corpus_env)


@pytest.fixture(scope="session")
def ledger():
    return read_ledger(CORPUS_DIR / LEDGER_NAME)


def telescope_context(checker: Checker, decl) -> TriContext:
    """Rebuild the context a declaration's inner type and body live in."""
    ctx = TriContext()
    for p in decl.telescope:
        match p:
            case CubeParam(name, cube):
                ctx = ctx.bind_cube(name, cube)
            case TopeParam(t):
                ctx = ctx.bind_tope(t)
            case TypedParam(name, ty):
                ctx = ctx.bind_typed(name, ty)
    return ctx
