import copy

import pytest

from conftest import NEGATIVE_DIR
from sstt.corpus import check_files

CASES = sorted(NEGATIVE_DIR.glob("*.sstt"))


def check_negative(corpus, ledger, path):
    env = copy.copy(corpus.env)
    env.decls = dict(env.decls)
    env.shapes = dict(env.shapes)
    reports, _ = check_files([path], env=env, ledger=ledger)
    return [d.kind for r in reports for d in r.diagnostics]


def test_suite_is_large_enough():
    assert len(CASES) >= 20
    for case in CASES:
        assert case.with_suffix(".expect").exists(), case


@pytest.mark.parametrize("path", CASES, ids=lambda p: p.stem)
def test_rejected_with_expected_kind(corpus, ledger, path):
    expected = path.with_suffix(".expect").read_text().strip()
    kinds = check_negative(corpus, ledger, path)
    assert kinds, f"{path.name} was accepted"
    assert kinds[0] == expected, f"{path.name}: got {kinds}, expected {expected}"
