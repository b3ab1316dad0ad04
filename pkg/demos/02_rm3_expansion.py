"""Pseudo-relevance feedback with RM3.

Shows the expanded query distribution next to the original query, then
compares retrieval effectiveness with and without expansion.
"""
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
from _common import prepare  # noqa: E402

from querykg import Rm3Params, RunSet, evaluate_runset, query_mle, read_qrels, report_table


def main():
    with tempfile.TemporaryDirectory() as tmp:
        index, fx, _ = prepare(Path(tmp))
        qrels = read_qrels(fx / "qrels_docs.txt", "document")
        params = Rm3Params(fb_docs=10, fb_terms=10, orig_weight=0.5)

        plain_runs, rm3_runs = {}, {}
        for topic in index.store.iter_topics():
            original = query_mle(topic.query)
            expanded = index.rm3_expand(topic.query, params)
            print(f"topic {topic.topic_id}: {topic.query!r}")
            print("  original:", {t: round(w, 3) for t, w in original.term_weights.items()})
            top = sorted(expanded.term_weights.items(), key=lambda kv: -kv[1])[:8]
            print("  expanded:", {t: round(w, 3) for t, w in top})
            plain_runs[topic.topic_id] = index.bm25_search(
                topic.query, 1000, topic_id=topic.topic_id
            )
            rm3_runs[topic.topic_id] = index.bm25_search(
                expanded, 1000, topic_id=topic.topic_id, tag="bm25rm3"
            )

        print()
        print(report_table({
            "bm25": evaluate_runset(RunSet(plain_runs, tag="bm25"), qrels),
            "bm25+rm3": evaluate_runset(RunSet(rm3_runs, tag="bm25rm3"), qrels),
        }))
        index.store.close()


if __name__ == "__main__":
    main()
