"""Corpus integrity: every entry's verdict is reproduced by oracle and provers."""

import pytest

from dummett.corpus import PROVED, REFUTED, CorpusEntry, load_corpus, _parse_line
from dummett.d1 import decide_d1
from dummett.d3 import decide_d3
from dummett.formula import variables_of
from dummett.proofs import check_proof
from dummett.semantics import F, oracle_valid, realizes_set, sf

CORPUS = load_corpus()
IDS = [e.name for e in CORPUS]


def test_corpus_loads_and_names_are_unique():
    assert len(CORPUS) >= 30
    assert len({e.name for e in CORPUS}) == len(CORPUS)
    assert {e.expected for e in CORPUS} == {PROVED, REFUTED}


def test_corpus_has_mixed_provenance():
    tags = {e.provenance for e in CORPUS}
    assert "curated" in tags  # three-field lines default to this
    assert len(tags) >= 3


@pytest.mark.parametrize("entry", CORPUS, ids=IDS)
def test_expected_matches_oracle(entry: CorpusEntry):
    assert len(variables_of(entry.formula)) <= 3, "corpus entries stay oracle-checkable"
    counter = oracle_valid(entry.formula)
    verdict = PROVED if counter is None else REFUTED
    assert verdict == entry.expected


@pytest.mark.parametrize("entry", CORPUS, ids=IDS)
@pytest.mark.parametrize("optimized", [False, True], ids=["base", "opt"])
def test_d1_reproduces_corpus(entry: CorpusEntry, optimized: bool):
    out = decide_d1(entry.formula, optimized=optimized)
    assert out.verdict == entry.expected
    if out.proof is not None:
        assert check_proof(out.proof, optimized=optimized) is None
    else:
        assert realizes_set(out.model, 0, {sf(F, entry.formula)})


@pytest.mark.parametrize("entry", CORPUS, ids=IDS)
@pytest.mark.parametrize("sixopt", [False, True], ids=["base", "sixopt"])
def test_d3_reproduces_corpus(entry: CorpusEntry, sixopt: bool):
    out = decide_d3(entry.formula, sixopt=sixopt)
    assert out.verdict == entry.expected
    if out.proof is not None:
        assert check_proof(out.proof, sixopt=sixopt) is None
    else:
        assert realizes_set(out.model, 0, {sf(F, entry.formula)})


def test_parse_line_rejects_bad_rows():
    assert _parse_line("# just a comment", 1) is None
    assert _parse_line("   ", 2) is None
    with pytest.raises(ValueError, match="3 or 4 fields"):
        _parse_line("name ; p", 3)
    with pytest.raises(ValueError, match="bad verdict"):
        _parse_line("name ; p ; maybe", 4)
    with pytest.raises(ValueError, match="empty name"):
        _parse_line(" ; p ; proved", 5)


def test_parse_line_provenance_default():
    entry = _parse_line("foo ; p -> p ; proved", 1)
    assert entry.provenance == "curated"
    tagged = _parse_line("foo ; p -> p ; proved ; classical-only", 1)
    assert tagged.provenance == "classical-only"
