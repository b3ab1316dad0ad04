"""Query-specific graph construction from runs and links, and ground-truth
graphs from judgments.

Constructed graphs take the top k_doc documents and top k_ent entities from
the two runs as nodes (weights = run scores); document-entity edges exist
where a stored link connects a selected document to a selected entity, with
one edge per (doc, entity) pair weighted by mention count. Ground-truth
graphs take every relevant document and entity (weight 1) under binarized
judgments, keeping relevant entities as isolated nodes when no relevant
document mentions them.
"""
from __future__ import annotations

from dataclasses import dataclass

from .model import QrelSet, QueryKG, RunList, binarize_qrels


class KgError(Exception):
    pass


@dataclass(frozen=True)
class KgParams:
    k_doc: int
    k_ent: int
    min_confidence: float = 0.0

    def __post_init__(self):
        if self.k_doc < 0 or self.k_ent < 0:
            raise ValueError("k_doc and k_ent must be >= 0")


@dataclass(frozen=True)
class KgStats:
    query_nodes: int
    doc_nodes: int
    entity_nodes: int
    qd_edges: int
    qe_edges: int
    de_edges: int
    connected_entities: int


def _de_edges(
    doc_ids: set[str],
    entity_ids: set[str],
    links,
    min_confidence: float = 0.0,
) -> dict[tuple[str, str], float]:
    edges: dict[tuple[str, str], float] = {}
    for doc_id in sorted(doc_ids):
        for link in links.get_links_for_doc(doc_id):
            if link.entity_id not in entity_ids:
                continue
            if link.confidence < min_confidence:
                continue
            key = (doc_id, link.entity_id)
            edges[key] = edges.get(key, 0.0) + 1.0
    return edges


def build_query_kg(
    topic_id: str,
    doc_run: RunList,
    ent_run: RunList,
    links,
    params: KgParams,
) -> QueryKG:
    """Construct a graph from the top-k prefixes of a document run and an
    entity run; k larger than the run is truncation, not an error."""
    if doc_run.topic_id != topic_id or ent_run.topic_id != topic_id:
        raise KgError(
            f"runs for topics {doc_run.topic_id!r}/{ent_run.topic_id!r} "
            f"do not match {topic_id!r}"
        )
    if doc_run.kind != "document" or ent_run.kind != "entity":
        raise KgError("doc_run must have kind 'document' and ent_run kind 'entity'")
    doc_nodes = {item_id: score for item_id, _, score in doc_run.items[: params.k_doc]}
    entity_nodes = {item_id: score for item_id, _, score in ent_run.items[: params.k_ent]}
    edges = _de_edges(set(doc_nodes), set(entity_nodes), links, params.min_confidence)
    return QueryKG.from_nodes(topic_id, doc_nodes, entity_nodes, edges)


def build_truth_kg(
    topic_id: str,
    doc_qrels: QrelSet,
    ent_qrels: QrelSet,
    links,
    binarize_threshold: int = 1,
) -> QueryKG:
    """The judgment-induced graph: all relevant documents and entities, with
    edges only where a relevant document links a relevant entity."""
    doc_bin = binarize_qrels(doc_qrels, binarize_threshold)
    ent_bin = binarize_qrels(ent_qrels, binarize_threshold)
    if topic_id not in doc_bin.topics() and topic_id not in ent_bin.topics():
        raise KgError(f"topic {topic_id!r} absent from both qrel sets")
    rel_docs = doc_bin.relevant_items(topic_id)
    rel_ents = ent_bin.relevant_items(topic_id)
    doc_nodes = {d: 1.0 for d in rel_docs}
    entity_nodes = {e: 1.0 for e in rel_ents}
    edges = _de_edges(rel_docs, rel_ents, links)
    return QueryKG.from_nodes(topic_id, doc_nodes, entity_nodes, edges)


def kg_stats(kg: QueryKG) -> KgStats:
    connected = {e for _, e in kg.de_edges}
    return KgStats(
        query_nodes=1,
        doc_nodes=len(kg.doc_nodes),
        entity_nodes=len(kg.entity_nodes),
        qd_edges=len(kg.qd_edges),
        qe_edges=len(kg.qe_edges),
        de_edges=len(kg.de_edges),
        connected_entities=len(connected),
    )


def mean_kg_stats(stats: list[KgStats]) -> dict[str, float]:
    """Mean node/edge counts across topics, for ground-truth summaries."""
    if not stats:
        raise KgError("no graphs to aggregate")
    n = len(stats)
    return {
        "query_nodes": 1.0,
        "doc_nodes": sum(s.doc_nodes for s in stats) / n,
        "entity_nodes": sum(s.entity_nodes for s in stats) / n,
        "qd_edges": sum(s.qd_edges for s in stats) / n,
        "qe_edges": sum(s.qe_edges for s in stats) / n,
        "de_edges": sum(s.de_edges for s in stats) / n,
        "connected_entities": sum(s.connected_entities for s in stats) / n,
    }
