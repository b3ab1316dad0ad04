"""On-disk store for corpus, entity links, topics, and qrels.

Backed by an embedded SQLite database with separate tables for documents,
links-by-document, topics, and metadata, so very large link files stream in
without ever being fully resident. Single writer during ingestion; reads are
plain lookups and safe for concurrent callers.
"""
from __future__ import annotations

import json
import logging
import sqlite3
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional

from .model import DocumentRecord, EntityLink, QrelSet, Topic

logger = logging.getLogger(__name__)

_SCHEMA = """
CREATE TABLE IF NOT EXISTS docs (
    doc_id TEXT PRIMARY KEY,
    title TEXT NOT NULL DEFAULT '',
    contents TEXT NOT NULL DEFAULT '',
    url TEXT,
    length_tokens INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS links (
    doc_id TEXT NOT NULL,
    ord INTEGER NOT NULL,
    entity_id TEXT NOT NULL,
    mention TEXT NOT NULL DEFAULT '',
    span_start INTEGER NOT NULL DEFAULT -1,
    span_end INTEGER NOT NULL DEFAULT -1,
    confidence REAL NOT NULL DEFAULT 1.0,
    PRIMARY KEY (doc_id, ord)
);
CREATE TABLE IF NOT EXISTS topics (
    topic_id TEXT PRIMARY KEY,
    query TEXT NOT NULL,
    narrative TEXT,
    manual_formulations TEXT NOT NULL DEFAULT '[]',
    domain_tag TEXT NOT NULL DEFAULT ''
);
CREATE TABLE IF NOT EXISTS meta (
    key TEXT PRIMARY KEY,
    value TEXT NOT NULL
);
"""

_LINK_BATCH = 10000


class StoreError(Exception):
    """Raised for malformed input files and failed lookups."""


@dataclass(frozen=True)
class CorpusStats:
    doc_count: int
    total_tokens: int
    avg_doc_length: float


@dataclass(frozen=True)
class LinkStats:
    link_count: int
    docs_with_links: int
    links_per_doc: float
    skipped_unknown_doc: int = 0


class Store:
    """One corpus plus its links, topics, and judgments, in a single file."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._conn = sqlite3.connect(self.path)
        self._conn.executescript(_SCHEMA)

    def close(self):
        self._conn.close()

    def __enter__(self) -> "Store":
        return self

    def __exit__(self, *exc):
        self.close()

    # -- corpus ------------------------------------------------------------

    def ingest_corpus(self, path: str | Path, fmt: str = "jsonl") -> CorpusStats:
        """Load a JSONL corpus, replacing any previously ingested one."""
        if fmt != "jsonl":
            raise StoreError(f"unsupported corpus format: {fmt}")
        cur = self._conn.cursor()
        cur.execute("BEGIN")
        try:
            cur.execute("DELETE FROM docs")
            cur.execute("DELETE FROM links")
            seen: set[str] = set()
            count = 0
            with open(path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        obj = json.loads(line)
                    except json.JSONDecodeError as e:
                        raise StoreError(f"{path}: malformed JSON on line {lineno}: {e}") from e
                    doc_id = obj.get("id")
                    if not doc_id or "contents" not in obj:
                        raise StoreError(f"{path}: line {lineno} missing 'id' or 'contents'")
                    if doc_id in seen:
                        raise StoreError(f"{path}: duplicate doc_id {doc_id!r} on line {lineno}")
                    seen.add(doc_id)
                    cur.execute(
                        "INSERT INTO docs (doc_id, title, contents, url) VALUES (?, ?, ?, ?)",
                        (doc_id, obj.get("title", ""), obj["contents"], obj.get("url")),
                    )
                    count += 1
            if count == 0:
                raise StoreError(f"{path}: empty corpus")
            self._conn.commit()
        except BaseException:
            self._conn.rollback()
            raise
        return self.corpus_stats()

    def corpus_stats(self) -> CorpusStats:
        row = self._conn.execute(
            "SELECT COUNT(*), COALESCE(SUM(length_tokens), 0) FROM docs"
        ).fetchone()
        doc_count, total = row
        return CorpusStats(doc_count, total, total / doc_count if doc_count else 0.0)

    def doc_count(self) -> int:
        return self._conn.execute("SELECT COUNT(*) FROM docs").fetchone()[0]

    def get_doc(self, doc_id: str) -> DocumentRecord:
        row = self._conn.execute(
            "SELECT doc_id, title, contents, url, length_tokens FROM docs WHERE doc_id = ?",
            (doc_id,),
        ).fetchone()
        if row is None:
            raise StoreError(f"unknown doc_id: {doc_id}")
        return DocumentRecord(*row)

    def has_doc(self, doc_id: str) -> bool:
        return (
            self._conn.execute("SELECT 1 FROM docs WHERE doc_id = ?", (doc_id,)).fetchone()
            is not None
        )

    def iter_docs(self) -> Iterator[DocumentRecord]:
        cur = self._conn.execute(
            "SELECT doc_id, title, contents, url, length_tokens FROM docs ORDER BY doc_id"
        )
        for row in cur:
            yield DocumentRecord(*row)

    def set_doc_lengths(self, lengths: dict[str, int]):
        """Record token lengths computed at index time."""
        with self._conn:
            self._conn.executemany(
                "UPDATE docs SET length_tokens = ? WHERE doc_id = ?",
                [(n, d) for d, n in lengths.items()],
            )

    # -- entity links ------------------------------------------------------

    def ingest_entity_links(self, path: str | Path, fmt: str = "tsv") -> LinkStats:
        """Stream a links file into the store, grouped by document.

        Rows referencing documents absent from the corpus are skipped and
        counted. Requires the corpus to be ingested first.
        """
        if self.doc_count() == 0:
            raise StoreError("corpus must be ingested before links")
        if fmt not in ("tsv", "jsonl"):
            raise StoreError(f"unsupported links format: {fmt}")
        cur = self._conn.cursor()
        cur.execute("BEGIN")
        try:
            cur.execute("DELETE FROM links")
            next_ord: dict[str, int] = {}
            skipped = 0
            count = 0
            batch: list[tuple] = []
            with open(path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    line = line.rstrip("\n")
                    if not line.strip():
                        continue
                    link = self._parse_link_row(line, lineno, fmt, path)
                    if not self.has_doc(link.doc_id):
                        skipped += 1
                        continue
                    ordinal = next_ord.get(link.doc_id, 0)
                    next_ord[link.doc_id] = ordinal + 1
                    batch.append(
                        (
                            link.doc_id,
                            ordinal,
                            link.entity_id,
                            link.mention,
                            link.span_start,
                            link.span_end,
                            link.confidence,
                        )
                    )
                    count += 1
                    if len(batch) >= _LINK_BATCH:
                        cur.executemany(
                            "INSERT INTO links VALUES (?, ?, ?, ?, ?, ?, ?)", batch
                        )
                        batch.clear()
            if batch:
                cur.executemany("INSERT INTO links VALUES (?, ?, ?, ?, ?, ?, ?)", batch)
            self._conn.commit()
        except BaseException:
            self._conn.rollback()
            raise
        if skipped:
            logger.warning("skipped %d link rows referencing unknown documents", skipped)
        docs_with_links = len(next_ord)
        n_docs = self.doc_count()
        return LinkStats(count, docs_with_links, count / n_docs if n_docs else 0.0, skipped)

    @staticmethod
    def _parse_link_row(line: str, lineno: int, fmt: str, path) -> EntityLink:
        if fmt == "jsonl":
            try:
                obj = json.loads(line)
                return EntityLink(
                    doc_id=obj["doc_id"],
                    entity_id=obj["entity_id"],
                    mention=obj.get("mention", ""),
                    span_start=int(obj.get("span_start", -1)),
                    span_end=int(obj.get("span_end", -1)),
                    confidence=float(obj.get("confidence", 1.0)),
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                raise StoreError(f"{path}: malformed link row {lineno}: {e}") from e
        # TSV columns: doc_id, entity_id, mention, start, end, confidence;
        # trailing columns may be omitted.
        cols = line.split("\t")
        if len(cols) < 2:
            raise StoreError(f"{path}: malformed link row {lineno}: expected >= 2 columns")
        try:
            return EntityLink(
                doc_id=cols[0],
                entity_id=cols[1],
                mention=cols[2] if len(cols) > 2 else "",
                span_start=int(cols[3]) if len(cols) > 3 else -1,
                span_end=int(cols[4]) if len(cols) > 4 else -1,
                confidence=float(cols[5]) if len(cols) > 5 else 1.0,
            )
        except ValueError as e:
            raise StoreError(f"{path}: malformed link row {lineno}: {e}") from e

    def get_links_for_doc(self, doc_id: str) -> list[EntityLink]:
        """All stored links for a document in file order; errors on unknown ids."""
        if not self.has_doc(doc_id):
            raise StoreError(f"unknown doc_id: {doc_id}")
        rows = self._conn.execute(
            "SELECT doc_id, entity_id, mention, span_start, span_end, confidence "
            "FROM links WHERE doc_id = ? ORDER BY ord",
            (doc_id,),
        ).fetchall()
        return [EntityLink(*row) for row in rows]

    def link_stats(self) -> LinkStats:
        count, docs_with = self._conn.execute(
            "SELECT COUNT(*), COUNT(DISTINCT doc_id) FROM links"
        ).fetchone()
        n_docs = self.doc_count()
        return LinkStats(count, docs_with, count / n_docs if n_docs else 0.0)

    # -- topics ------------------------------------------------------------

    def ingest_topics(self, path: str | Path) -> int:
        """Load a JSON array of topic objects; returns the topic count."""
        with open(path, encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as e:
                raise StoreError(f"{path}: invalid JSON: {e}") from e
        if not isinstance(raw, list):
            raise StoreError(f"{path}: topics file must be a JSON array")
        with self._conn:
            self._conn.execute("DELETE FROM topics")
            for i, obj in enumerate(raw):
                try:
                    topic = Topic(
                        topic_id=obj["topic_id"],
                        query=obj["query"],
                        narrative=obj.get("narrative"),
                        manual_formulations=tuple(obj.get("manual_formulations", [])),
                        domain_tag=obj.get("domain", ""),
                    )
                except (KeyError, TypeError, ValueError) as e:
                    raise StoreError(f"{path}: invalid topic at index {i}: {e}") from e
                self._conn.execute(
                    "INSERT OR REPLACE INTO topics VALUES (?, ?, ?, ?, ?)",
                    (
                        topic.topic_id,
                        topic.query,
                        topic.narrative,
                        json.dumps(list(topic.manual_formulations)),
                        topic.domain_tag,
                    ),
                )
        return len(raw)

    def get_topic(self, topic_id: str) -> Topic:
        row = self._conn.execute(
            "SELECT topic_id, query, narrative, manual_formulations, domain_tag "
            "FROM topics WHERE topic_id = ?",
            (topic_id,),
        ).fetchone()
        if row is None:
            raise StoreError(f"unknown topic_id: {topic_id}")
        return Topic(row[0], row[1], row[2], tuple(json.loads(row[3])), row[4])

    def iter_topics(self) -> Iterator[Topic]:
        cur = self._conn.execute(
            "SELECT topic_id, query, narrative, manual_formulations, domain_tag "
            "FROM topics ORDER BY topic_id"
        )
        for row in cur:
            yield Topic(row[0], row[1], row[2], tuple(json.loads(row[3])), row[4])


def read_qrels(path: str | Path, kind: str) -> QrelSet:
    """Parse TREC-convention 4-column qrels: ``topic_id 0 item_id grade``."""
    entries: dict[tuple[str, str], int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            cols = line.split()
            if len(cols) != 4:
                raise StoreError(f"{path}: line {lineno}: expected 4 columns, got {len(cols)}")
            topic_id, _, item_id, grade_s = cols
            try:
                grade = int(grade_s)
            except ValueError as e:
                raise StoreError(f"{path}: line {lineno}: non-integer grade {grade_s!r}") from e
            if grade < 0:
                raise StoreError(f"{path}: line {lineno}: negative grade {grade}")
            key = (topic_id, item_id)
            if key in entries:
                raise StoreError(f"{path}: line {lineno}: duplicate pair {key}")
            entries[key] = grade
    return QrelSet(kind, entries)


def write_qrels(qrels: QrelSet, path: str | Path):
    with open(path, "w", encoding="utf-8") as fh:
        for (topic_id, item_id), grade in sorted(qrels.entries.items()):
            fh.write(f"{topic_id} 0 {item_id} {grade}\n")
