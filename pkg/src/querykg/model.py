"""Shared domain types: documents, entities, links, topics, judgments, runs, graphs.

All types are immutable after construction and validate their invariants when
built, so downstream code can assume well-formed inputs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence


@dataclass(frozen=True)
class DocumentRecord:
    """One corpus document; ``length_tokens`` is filled in at index time."""

    doc_id: str
    title: str = ""
    contents: str = ""
    url: Optional[str] = None
    length_tokens: int = 0

    def __post_init__(self):
        if not self.doc_id:
            raise ValueError("doc_id must be non-empty")
        if self.length_tokens < 0:
            raise ValueError("length_tokens must be >= 0")


@dataclass(frozen=True)
class EntityRecord:
    """One knowledge-base entity, keyed by an opaque identifier."""

    entity_id: str
    name: str = ""
    aliases: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.entity_id:
            raise ValueError("entity_id must be non-empty")


@dataclass(frozen=True)
class EntityLink:
    """A grounded mention connecting a document to an entity.

    Span offsets are -1 when unknown; confidence defaults to 1.0.
    """

    doc_id: str
    entity_id: str
    mention: str = ""
    span_start: int = -1
    span_end: int = -1
    confidence: float = 1.0

    def __post_init__(self):
        if not self.doc_id or not self.entity_id:
            raise ValueError("doc_id and entity_id must be non-empty")
        if self.span_start >= 0 and self.span_end >= 0 and self.span_end < self.span_start:
            raise ValueError("span_end must be >= span_start")
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence out of range: {self.confidence}")


@dataclass(frozen=True)
class Topic:
    """A research question with optional narrative and manual reformulations."""

    topic_id: str
    query: str
    narrative: Optional[str] = None
    manual_formulations: tuple[str, ...] = ()
    domain_tag: str = ""

    def __post_init__(self):
        if not self.topic_id:
            raise ValueError("topic_id must be non-empty")
        if not self.query:
            raise ValueError("query must be non-empty")


class QrelSet:
    """Graded relevance judgments: (topic_id, item_id) -> non-negative grade."""

    __slots__ = ("kind", "_entries")

    def __init__(self, kind: str, entries: Mapping[tuple[str, str], int]):
        if kind not in ("document", "entity"):
            raise ValueError(f"qrel kind must be 'document' or 'entity', got {kind!r}")
        for key, grade in entries.items():
            if grade < 0:
                raise ValueError(f"negative grade for {key}: {grade}")
        self.kind = kind
        self._entries = MappingProxyType(dict(entries))

    @property
    def entries(self) -> Mapping[tuple[str, str], int]:
        return self._entries

    def grade(self, topic_id: str, item_id: str) -> int:
        return self._entries.get((topic_id, item_id), 0)

    def topics(self) -> set[str]:
        return {t for t, _ in self._entries}

    def items_for_topic(self, topic_id: str) -> dict[str, int]:
        return {i: g for (t, i), g in self._entries.items() if t == topic_id}

    def relevant_items(self, topic_id: str, threshold: int = 1) -> set[str]:
        """Item ids for ``topic_id`` whose grade is at least ``threshold``."""
        return {i for (t, i), g in self._entries.items() if t == topic_id and g >= threshold}

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QrelSet)
            and self.kind == other.kind
            and dict(self._entries) == dict(other._entries)
        )

    def __repr__(self) -> str:
        return f"QrelSet(kind={self.kind!r}, n={len(self._entries)})"


def binarize_qrels(qrels: QrelSet, threshold: int = 1) -> QrelSet:
    """Map grades to 1 where grade >= threshold, else 0; key set is preserved."""
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    return QrelSet(
        qrels.kind,
        {key: (1 if grade >= threshold else 0) for key, grade in qrels.entries.items()},
    )


@dataclass(frozen=True)
class RunList:
    """A ranked, scored list of document or entity ids for one topic.

    Ranks must run 1..n with no gaps, item ids must be unique, and scores must
    be non-increasing with rank. ``from_scores`` builds a valid list from raw
    (item, score) pairs via a stable (score desc, item_id asc) sort.
    """

    topic_id: str
    kind: str
    items: tuple[tuple[str, int, float], ...]
    tag: str = ""

    def __post_init__(self):
        if self.kind not in ("document", "entity"):
            raise ValueError(f"run kind must be 'document' or 'entity', got {self.kind!r}")
        seen: set[str] = set()
        prev_score = None
        for pos, (item_id, rank, score) in enumerate(self.items, start=1):
            if rank != pos:
                raise ValueError(f"ranks must be 1..n without gaps; got {rank} at position {pos}")
            if item_id in seen:
                raise ValueError(f"duplicate item in run: {item_id}")
            seen.add(item_id)
            if prev_score is not None and score > prev_score:
                raise ValueError(f"scores must be non-increasing with rank (item {item_id})")
            prev_score = score

    @classmethod
    def from_scores(
        cls,
        topic_id: str,
        kind: str,
        scored: Iterable[tuple[str, float]],
        tag: str = "",
    ) -> "RunList":
        ordered = sorted(scored, key=lambda pair: (-pair[1], pair[0]))
        items = tuple((item, rank, score) for rank, (item, score) in enumerate(ordered, start=1))
        return cls(topic_id=topic_id, kind=kind, items=items, tag=tag)

    def top(self, k: int) -> "RunList":
        return RunList(self.topic_id, self.kind, self.items[:k], self.tag)

    def item_ids(self) -> list[str]:
        return [item_id for item_id, _, _ in self.items]

    def __len__(self) -> int:
        return len(self.items)


class QueryKG:
    """Typed query-specific graph: one implicit query node, document nodes,
    entity nodes, and weighted query-document / query-entity / document-entity
    edges.

    Query-document and query-entity edges mirror their node sets one-to-one;
    every document-entity edge endpoint must exist among the nodes.
    """

    __slots__ = ("topic_id", "doc_nodes", "entity_nodes", "qd_edges", "qe_edges", "de_edges")

    def __init__(
        self,
        topic_id: str,
        doc_nodes: Mapping[str, float],
        entity_nodes: Mapping[str, float],
        qd_edges: Mapping[str, float],
        qe_edges: Mapping[str, float],
        de_edges: Mapping[tuple[str, str], float],
    ):
        if not topic_id:
            raise ValueError("topic_id must be non-empty")
        if set(qd_edges) != set(doc_nodes):
            raise ValueError("query-document edges must mirror document nodes")
        if set(qe_edges) != set(entity_nodes):
            raise ValueError("query-entity edges must mirror entity nodes")
        for doc_id, entity_id in de_edges:
            if doc_id not in doc_nodes:
                raise ValueError(f"de_edge references missing document node {doc_id}")
            if entity_id not in entity_nodes:
                raise ValueError(f"de_edge references missing entity node {entity_id}")
        self.topic_id = topic_id
        self.doc_nodes = MappingProxyType(dict(doc_nodes))
        self.entity_nodes = MappingProxyType(dict(entity_nodes))
        self.qd_edges = MappingProxyType(dict(qd_edges))
        self.qe_edges = MappingProxyType(dict(qe_edges))
        self.de_edges = MappingProxyType(dict(de_edges))

    @classmethod
    def from_nodes(
        cls,
        topic_id: str,
        doc_nodes: Mapping[str, float],
        entity_nodes: Mapping[str, float],
        de_edges: Mapping[tuple[str, str], float],
    ) -> "QueryKG":
        """Build a graph whose query edges mirror the node weights."""
        return cls(
            topic_id,
            doc_nodes=doc_nodes,
            entity_nodes=entity_nodes,
            qd_edges=dict(doc_nodes),
            qe_edges=dict(entity_nodes),
            de_edges=de_edges,
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QueryKG)
            and self.topic_id == other.topic_id
            and dict(self.doc_nodes) == dict(other.doc_nodes)
            and dict(self.entity_nodes) == dict(other.entity_nodes)
            and dict(self.qd_edges) == dict(other.qd_edges)
            and dict(self.qe_edges) == dict(other.qe_edges)
            and dict(self.de_edges) == dict(other.de_edges)
        )

    def __repr__(self) -> str:
        return (
            f"QueryKG(topic={self.topic_id!r}, docs={len(self.doc_nodes)}, "
            f"entities={len(self.entity_nodes)}, de_edges={len(self.de_edges)})"
        )


class InMemoryLinks:
    """Minimal link source backed by a list of EntityLink; mirrors the store's
    ``get_links_for_doc`` lookup for tests and small in-process pipelines."""

    def __init__(self, links: Sequence[EntityLink]):
        self._by_doc: dict[str, list[EntityLink]] = {}
        for link in links:
            self._by_doc.setdefault(link.doc_id, []).append(link)

    def get_links_for_doc(self, doc_id: str) -> list[EntityLink]:
        return list(self._by_doc.get(doc_id, []))
