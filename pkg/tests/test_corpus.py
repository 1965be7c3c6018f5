"""Tests for the deterministic configuration corpus."""

import json

import pytest

from momentray.corpus import (
    CORPUS_VERSION,
    build_default_corpus,
    entry_from_jsonable,
    entry_to_jsonable,
    load_corpus,
    save_corpus,
)
from momentray.transform import QuadSpec, bilinear_form

PROBE = QuadSpec(step=1.0 / 64.0)


@pytest.fixture(scope="module")
def corpus():
    return build_default_corpus()


def test_corpus_size_and_unique_ids(corpus):
    assert len(corpus) >= 30
    ids = [e.entry_id for e in corpus]
    assert len(set(ids)) == len(ids)


def test_corpus_dimensions_covered(corpus):
    assert {e.dim for e in corpus} == {2, 3}
    tags = {tag for e in corpus for tag in e.tags}
    assert "family" in tags and "random" in tags


def test_every_entry_is_incident(corpus):
    for entry in corpus:
        t = bilinear_form(entry.E, entry.F, entry.interval, PROBE)
        assert t > 1e-5, entry.entry_id


def test_intervals_cover_first_axis_spans(corpus):
    for entry in corpus:
        espan = entry.E.first_axis_span()
        fspan = entry.F.first_axis_span()
        assert entry.interval.lo <= espan.lo and espan.hi <= entry.interval.hi
        assert entry.window.lo <= fspan.lo and fspan.hi <= entry.window.hi


def test_build_is_deterministic(corpus):
    again = build_default_corpus()
    assert [entry_to_jsonable(e) for e in corpus] == [
        entry_to_jsonable(e) for e in again
    ]


def test_entry_json_round_trip(corpus):
    entry = corpus[0]
    clone = entry_from_jsonable(entry_to_jsonable(entry))
    assert entry_to_jsonable(clone) == entry_to_jsonable(entry)
    assert clone.dim == entry.dim
    assert clone.E.measure == entry.E.measure


def test_corpus_file_round_trip(tmp_path, corpus):
    path = tmp_path / "corpus.json"
    save_corpus(corpus, path)
    loaded = load_corpus(path)
    assert [entry_to_jsonable(e) for e in loaded] == [
        entry_to_jsonable(e) for e in corpus
    ]


def test_load_rejects_version_mismatch(tmp_path, corpus):
    path = tmp_path / "corpus.json"
    save_corpus(corpus[:2], path)
    payload = json.loads(path.read_text())
    payload["version"] = CORPUS_VERSION + 1
    path.write_text(json.dumps(payload))
    with pytest.raises(ValueError):
        load_corpus(path)
