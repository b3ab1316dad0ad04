"""Shared setup for the demo scripts: generate a synthetic collection,
ingest it, and build an index in a temporary workspace."""
import json
from pathlib import Path

from querykg import FixtureSpec, InvertedIndex, Store, gen_fixture


def prepare(work: Path, spec: FixtureSpec = FixtureSpec(seed=0)):
    """Returns (index, fixture_dir, manifest); caller owns index.store."""
    fx = work / "fixture"
    manifest = gen_fixture(fx, spec)
    store = Store(work / "docs.db")
    store.ingest_corpus(fx / "corpus.jsonl")
    store.ingest_entity_links(fx / "links.tsv")
    store.ingest_topics(fx / "topics.json")
    index = InvertedIndex(store)
    index.build()
    return index, fx, manifest


def write_entity_corpus(fixture_dir: Path, out_path: Path, max_terms: int = 500):
    """One pseudo-document per entity: its name plus text from the documents
    that mention it, so entities can be ranked by the same sparse scorer."""
    manifest = json.loads((fixture_dir / "manifest.json").read_text(encoding="utf-8"))
    doc_text = {}
    with open(fixture_dir / "corpus.jsonl", encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            doc_text[obj["id"]] = obj["contents"]
    linked: dict[str, set[str]] = {}
    with open(fixture_dir / "links.tsv", encoding="utf-8") as fh:
        for line in fh:
            doc_id, entity_id = line.split("\t")[:2]
            linked.setdefault(entity_id, set()).add(doc_id)
    with open(out_path, "w", encoding="utf-8") as fh:
        for entity_id, name in sorted(manifest["entity_names"].items()):
            context = " ".join(
                doc_text[d] for d in sorted(linked.get(entity_id, set()))
            ).split()[:max_terms]
            fh.write(
                json.dumps(
                    {"id": entity_id, "title": name,
                     "contents": name + " " + " ".join(context)},
                    sort_keys=True,
                )
                + "\n"
            )
