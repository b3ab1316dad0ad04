"""Deterministic synthetic fixture generation for desk-scale experiments.

Emits a small corpus, entity links, topics, and document/entity judgments
with a manifest recording the planted relevant sets, so tests can verify
pipeline behavior without running any search to discover ground truth.

The ``entity_signal`` knob controls how cleanly entity names separate
relevant from non-relevant documents: at 1.0, the name tokens of a topic's
relevant entities appear only inside that topic's relevant documents, and a
``hidden_rel_frac`` share of relevant documents carry no query tokens at
all, so term matching alone cannot find them but entity-name expansion can.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, asdict
from pathlib import Path


class FixtureError(Exception):
    pass


@dataclass(frozen=True)
class FixtureSpec:
    seed: int = 0
    topics: int = 2
    docs: int = 60
    rel_docs_per_topic: int = 6
    entities: int = 20
    rel_ents_per_topic: int = 4
    hidden_rel_frac: float = 0.5
    entity_signal: float = 1.0
    doc_len: int = 30
    vocab_size: int = 50

    def __post_init__(self):
        if min(self.topics, self.docs, self.entities, self.doc_len, self.vocab_size) < 1:
            raise FixtureError("all sizes must be >= 1")
        if self.rel_docs_per_topic * self.topics > self.docs:
            raise FixtureError("more relevant docs requested than docs available")
        if self.rel_ents_per_topic * self.topics > self.entities:
            raise FixtureError("more relevant entities requested than entities available")
        if not (0.0 <= self.hidden_rel_frac <= 1.0):
            raise FixtureError("hidden_rel_frac must be in [0, 1]")
        if not (0.0 <= self.entity_signal <= 1.0):
            raise FixtureError("entity_signal must be in [0, 1]")


def gen_fixture(out_dir: str | Path, spec: FixtureSpec = FixtureSpec()) -> dict:
    """Write corpus.jsonl, links.tsv, topics.json, qrels for documents and
    entities, and manifest.json into ``out_dir``; returns the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(spec.seed)

    background = [f"word{i:03d}" for i in range(spec.vocab_size)]
    doc_ids = [f"d{i:04d}" for i in range(spec.docs)]
    entity_ids = [f"e{i:04d}" for i in range(spec.entities)]
    entity_names = {e: f"concept{e[1:]}" for e in entity_ids}

    # partition relevant docs/entities per topic, the rest is background
    topics = []
    rel_docs: dict[str, list[str]] = {}
    rel_ents: dict[str, list[str]] = {}
    doc_cursor = 0
    ent_cursor = 0
    for t in range(spec.topics):
        topic_id = f"topic-{t}"
        q_terms = [f"q{t}alpha", f"q{t}beta"]
        topics.append(
            {
                "topic_id": topic_id,
                "query": " ".join(q_terms),
                "narrative": f"Find material about {' and '.join(q_terms)}.",
                "manual_formulations": [f"{q_terms[0]} background", f"{q_terms[1]} details"],
                "domain": rng.choice(["finance", "history", "politics"]),
            }
        )
        rel_docs[topic_id] = doc_ids[doc_cursor : doc_cursor + spec.rel_docs_per_topic]
        doc_cursor += spec.rel_docs_per_topic
        rel_ents[topic_id] = entity_ids[ent_cursor : ent_cursor + spec.rel_ents_per_topic]
        ent_cursor += spec.rel_ents_per_topic

    rel_doc_topic = {d: t["topic_id"] for t in topics for d in rel_docs[t["topic_id"]]}
    all_rel_ents = {e for ents in rel_ents.values() for e in ents}
    nonrel_ents = [e for e in entity_ids if e not in all_rel_ents]

    doc_bodies: dict[str, list[str]] = {}
    links: list[tuple[str, str, str]] = []
    for i, doc_id in enumerate(doc_ids):
        body = [rng.choice(background) for _ in range(spec.doc_len)]
        topic_id = rel_doc_topic.get(doc_id)
        if topic_id is not None:
            t_idx = int(topic_id.split("-")[1])
            pos = rel_docs[topic_id].index(doc_id)
            hidden = pos < round(spec.hidden_rel_frac * len(rel_docs[topic_id]))
            if not hidden:
                body += [f"q{t_idx}alpha", f"q{t_idx}beta"] * 2
            for entity_id in rel_ents[topic_id]:
                mentions = rng.randint(1, 3)
                body += [entity_names[entity_id]] * mentions
                for _ in range(mentions):
                    links.append((doc_id, entity_id, entity_names[entity_id]))
        else:
            # distractors: background docs mention query terms of a random topic
            t_idx = rng.randrange(spec.topics)
            body += [f"q{t_idx}alpha"] * rng.randint(1, 3)
            if nonrel_ents:
                entity_id = rng.choice(nonrel_ents)
                body.append(entity_names[entity_id])
                links.append((doc_id, entity_id, entity_names[entity_id]))
            if spec.entity_signal < 1.0 and rng.random() > spec.entity_signal:
                leak = rng.choice(sorted(all_rel_ents))
                body.append(entity_names[leak])
                links.append((doc_id, leak, entity_names[leak]))
        rng.shuffle(body)
        doc_bodies[doc_id] = body

    corpus_path = out / "corpus.jsonl"
    with open(corpus_path, "w", encoding="utf-8") as fh:
        for doc_id in doc_ids:
            fh.write(
                json.dumps(
                    {
                        "id": doc_id,
                        "title": f"Document {doc_id}",
                        "contents": " ".join(doc_bodies[doc_id]),
                    },
                    sort_keys=True,
                )
                + "\n"
            )

    links_path = out / "links.tsv"
    with open(links_path, "w", encoding="utf-8") as fh:
        for doc_id, entity_id, mention in links:
            fh.write(f"{doc_id}\t{entity_id}\t{mention}\t-1\t-1\t1.0\n")

    topics_path = out / "topics.json"
    with open(topics_path, "w", encoding="utf-8") as fh:
        json.dump(topics, fh, indent=2, sort_keys=True)
        fh.write("\n")

    doc_qrels_path = out / "qrels_docs.txt"
    with open(doc_qrels_path, "w", encoding="utf-8") as fh:
        for t in topics:
            topic_id = t["topic_id"]
            for doc_id in rel_docs[topic_id]:
                fh.write(f"{topic_id} 0 {doc_id} {rng.choice([1, 2])}\n")
            neg_pool = [d for d in doc_ids if d not in rel_doc_topic]
            judged_neg = rng.sample(neg_pool, k=min(4, len(neg_pool)))
            for doc_id in sorted(judged_neg):
                fh.write(f"{topic_id} 0 {doc_id} 0\n")

    ent_qrels_path = out / "qrels_entities.txt"
    with open(ent_qrels_path, "w", encoding="utf-8") as fh:
        for t in topics:
            topic_id = t["topic_id"]
            for entity_id in rel_ents[topic_id]:
                fh.write(f"{topic_id} 0 {entity_id} 1\n")
            for entity_id in sorted(rng.sample(nonrel_ents, k=min(3, len(nonrel_ents)))):
                fh.write(f"{topic_id} 0 {entity_id} 0\n")

    manifest = {
        "spec": asdict(spec),
        "files": {
            "corpus": corpus_path.name,
            "links": links_path.name,
            "topics": topics_path.name,
            "doc_qrels": doc_qrels_path.name,
            "entity_qrels": ent_qrels_path.name,
        },
        "relevant_docs": rel_docs,
        "relevant_entities": rel_ents,
        "entity_names": entity_names,
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
