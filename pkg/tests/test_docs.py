"""The concordance table in docs/ stays in step with the corpus."""

import csv
from pathlib import Path

DOCS = Path(__file__).parent.parent / "docs"


def read_concordance():
    with open(DOCS / "concordance.tsv", newline="") as fh:
        rows = list(csv.DictReader(fh, delimiter="\t"))
    assert rows and set(rows[0]) == {"concept", "decl", "file"}
    return rows


def test_concordance_names_are_unique():
    rows = read_concordance()
    decls = [r["decl"] for r in rows]
    assert len(decls) == len(set(decls))


def test_every_entry_exists(corpus):
    known = set(corpus.env.decls) | set(corpus.env.shapes)
    for row in read_concordance():
        assert row["decl"] in known, row["decl"]


def test_every_corpus_decl_is_documented(corpus):
    documented = {r["decl"] for r in read_concordance()}
    for report in corpus.files:
        for decl in report.decls:
            assert decl.name in documented, decl.name


def test_files_column_is_accurate(corpus):
    by_file = {}
    for report in corpus.files:
        name = Path(report.path).name
        for decl in report.decls:
            by_file[decl.name] = name
    for row in read_concordance():
        if row["decl"] in by_file:
            assert by_file[row["decl"]] == row["file"], row["decl"]
        else:  # shapes live in the prelude
            assert row["file"] == "00-prelude.sstt"
