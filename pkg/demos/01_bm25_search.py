"""BM25 search over a synthetic collection, evaluated against qrels.

Generates a small deterministic collection, indexes it, runs each topic's
query, and prints NDCG@100 / MAP / Recall@1000 per topic and on average.
"""
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
from _common import prepare  # noqa: E402

from querykg import RunSet, evaluate_runset, read_qrels


def main():
    with tempfile.TemporaryDirectory() as tmp:
        index, fx, _ = prepare(Path(tmp))
        qrels = read_qrels(fx / "qrels_docs.txt", "document")

        runs = {}
        for topic in index.store.iter_topics():
            print(f"topic {topic.topic_id}: query = {topic.query!r}")
            run = index.bm25_search(topic.query, 1000, topic_id=topic.topic_id)
            for item_id, rank, score in run.items[:5]:
                print(f"  {rank:>2}. {item_id}  {score:.4f}")
            runs[topic.topic_id] = run

        report = evaluate_runset(RunSet(runs, tag="bm25"), qrels)
        print()
        print(report.to_tsv())
        index.store.close()


if __name__ == "__main__":
    main()
