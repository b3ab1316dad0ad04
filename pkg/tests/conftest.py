import json

import pytest

from querykg import InvertedIndex, Store


SMALL_CORPUS = [
    {"id": "d1", "title": "Bitcoin basics", "contents": "bitcoin blockchain currency mining"},
    {"id": "d2", "title": "Carbon costs", "contents": "bitcoin carbon footprint energy energy"},
    {"id": "d3", "title": "Banking", "contents": "central bank monetary policy rates"},
]


def write_corpus(path, docs):
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(doc) + "\n")


@pytest.fixture
def small_store(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    write_corpus(corpus, SMALL_CORPUS)
    with Store(tmp_path / "store.db") as store:
        store.ingest_corpus(corpus)
        yield store


@pytest.fixture
def small_index(small_store):
    index = InvertedIndex(small_store)
    index.build()
    return index
