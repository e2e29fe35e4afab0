import json
from pathlib import Path

from sstt.corpus import CORPUS_DIR, load_corpus

DESIGNATED_PROVED = {
    # endpoint laws for arrows
    "arr_src",
    "arr_tgt",
    # uniqueness of initial/terminal objects and of (co)limits
    "initial_unique_iso",
    "terminal_unique_iso",
    "colimit_unique",
    "limit_unique",
    # universal property of (co)limits via representability
    "colimit_univ_prop",
    "limit_univ_prop",
    # round-trip laws for splitting arrows in total types
    "total_split_pair",
    "total_pair_split",
    "arr_sigma_round",
    "ext_swap_unswap",
    "ext_unswap_swap",
}


def test_every_file_checks(corpus):
    for report in corpus.files:
        assert report.ok, f"{report.path}: {report.diagnostics}"


def test_all_files_present(corpus):
    on_disk = sorted(p.name for p in CORPUS_DIR.glob("*.sstt"))
    reported = sorted(Path(r.path).name for r in corpus.files)
    assert reported == on_disk and len(on_disk) >= 10


def test_closed_ledger(corpus, ledger):
    manifest = corpus.to_json()
    assert set(manifest["axioms"]) == ledger


def test_designated_theorems_proved(corpus):
    manifest = corpus.to_json()
    assert DESIGNATED_PROVED <= set(manifest["theorems_proved"])


def test_stated_theorems_have_no_body(corpus):
    for name in corpus.to_json()["theorems_stated"]:
        assert corpus.env.decls[name].body is None


def test_counts_add_up(corpus):
    manifest = corpus.to_json()
    total = sum(manifest["counts"].values())
    assert total == sum(len(r.decls) for r in corpus.files)


def test_manifest_is_json_serializable(corpus):
    text = json.dumps(corpus.to_json(), sort_keys=True)
    assert json.loads(text)["ok"] is True


def test_corpus_fast(corpus):
    assert corpus.elapsed < 10.0
