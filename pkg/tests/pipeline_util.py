"""Drives the full CLI pipeline on the bundled fixture.

Used by test_cli.py and by regenerate_golden.py, so the byte-for-byte
comparison in the test exercises exactly the commands a user would run.
"""
import json
from pathlib import Path

from querykg.cli import main


def run_cli(*argv):
    rc = main([str(a) for a in argv])
    assert rc == 0, f"command failed: {argv}"


def write_entity_corpus(fixture_dir: Path, out_path: Path, max_terms: int = 500):
    """One pseudo-document per entity: its name plus text drawn from the
    documents that link to it, so entities are searchable by topic terms."""
    manifest = json.loads((fixture_dir / "manifest.json").read_text(encoding="utf-8"))
    doc_text = {}
    with open(fixture_dir / "corpus.jsonl", encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            doc_text[obj["id"]] = obj["contents"]
    linked_docs: dict[str, set[str]] = {}
    with open(fixture_dir / "links.tsv", encoding="utf-8") as fh:
        for line in fh:
            doc_id, entity_id = line.split("\t")[:2]
            linked_docs.setdefault(entity_id, set()).add(doc_id)
    with open(out_path, "w", encoding="utf-8") as fh:
        for entity_id, name in sorted(manifest["entity_names"].items()):
            context = " ".join(
                doc_text[d] for d in sorted(linked_docs.get(entity_id, set()))
            ).split()[:max_terms]
            fh.write(
                json.dumps(
                    {
                        "id": entity_id,
                        "title": name,
                        "contents": name + " " + " ".join(context),
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def run_pipeline(work: Path) -> dict[str, Path]:
    """gen-fixture -> ingest -> index -> search -> build-kg -> eval -> sweep.

    Returns the paths of every artifact that should be byte-stable.
    """
    fx = work / "fixture"
    run_cli("gen-fixture", "--output-dir", fx, "--seed", "0")

    doc_store = work / "docs.db"
    ent_store = work / "ents.db"
    run_cli(
        "ingest",
        "--store", doc_store,
        "--corpus", fx / "corpus.jsonl",
        "--links", fx / "links.tsv",
        "--topics", fx / "topics.json",
    )
    entity_corpus = work / "entity_corpus.jsonl"
    write_entity_corpus(fx, entity_corpus)
    run_cli("ingest", "--store", ent_store, "--corpus", entity_corpus,
            "--topics", fx / "topics.json")
    run_cli("index", "--store", doc_store)
    run_cli("index", "--store", ent_store)

    doc_run = work / "run_docs.txt"
    ent_run = work / "run_ents.txt"
    run_cli("search", "--store", doc_store, "--output", doc_run, "--k", "100",
            "--rm3", "--tag", "bm25rm3")
    run_cli("search", "--store", ent_store, "--output", ent_run, "--k", "100",
            "--kind", "entity", "--tag", "entbm25")

    truth_kg = work / "truth_topic-0.json"
    built_kg = work / "kg_topic-0.json"
    run_cli("build-truth", "--store", doc_store,
            "--doc-qrels", fx / "qrels_docs.txt",
            "--entity-qrels", fx / "qrels_entities.txt",
            "--topic", "topic-0", "--output", truth_kg)
    run_cli("build-kg", "--store", doc_store,
            "--doc-run", doc_run, "--ent-run", ent_run,
            "--topic", "topic-0", "--k-doc", "10", "--k-ent", "10",
            "--output", built_kg)
    run_cli("eval-kg", "--constructed", built_kg, "--truth", truth_kg)

    sweep_dir = work / "sweep"
    run_cli("sweep", "--store", doc_store,
            "--doc-run", doc_run, "--ent-run", ent_run,
            "--doc-qrels", fx / "qrels_docs.txt",
            "--entity-qrels", fx / "qrels_entities.txt",
            "--k-values", "2,5,10", "--output-dir", sweep_dir)

    dot_path = work / "kg_topic-0.dot"
    run_cli("export", "--kg", built_kg, "--entity-names", fx / "manifest.json",
            "--output", dot_path)

    return {
        "fixture/corpus.jsonl": fx / "corpus.jsonl",
        "fixture/links.tsv": fx / "links.tsv",
        "fixture/topics.json": fx / "topics.json",
        "fixture/qrels_docs.txt": fx / "qrels_docs.txt",
        "fixture/qrels_entities.txt": fx / "qrels_entities.txt",
        "fixture/manifest.json": fx / "manifest.json",
        "entity_corpus.jsonl": entity_corpus,
        "run_docs.txt": doc_run,
        "run_ents.txt": ent_run,
        "truth_topic-0.json": truth_kg,
        "kg_topic-0.json": built_kg,
        "kg_topic-0.dot": dot_path,
        "sweep/precision.tsv": sweep_dir / "precision.tsv",
        "sweep/recall.tsv": sweep_dir / "recall.tsv",
        "sweep/sweep.json": sweep_dir / "sweep.json",
    }
