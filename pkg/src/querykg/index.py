"""Inverted index with BM25 ranking, RM3 feedback, and entity query expansion.

Postings are persisted inside the corpus store so the index survives the
process; searches read only the postings for the query's terms.

BM25 uses the non-negative IDF variant ln(1 + (N - df + 0.5)/(df + 0.5)) so
scores can safely serve as graph edge weights, with term saturation
tf / (tf + k1 * (1 - b + b * dl/avgdl)).
"""
from __future__ import annotations

import json
import logging
import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .model import EntityRecord, RunList
from .store import CorpusStats, Store, StoreError

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"[0-9a-z]+")

# Compact fixed English stopword list; applied identically at index and
# query time. Override per-index via the stopwords argument.
DEFAULT_STOPWORDS = frozenset(
    """a an and are as at be but by for from had has have he her his i if in into
    is it its me my no not of on or our s she so t that the their them then there
    these they this to was we were what when where which who will with you your
    """.split()
)


def tokenize(text: str, stopwords: frozenset[str] = DEFAULT_STOPWORDS) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, drop stopwords."""
    return [t for t in _TOKEN_RE.findall(text.lower()) if t not in stopwords]


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 0.9
    b: float = 0.4

    def __post_init__(self):
        if self.k1 < 0:
            raise ValueError("k1 must be >= 0")
        if not (0.0 <= self.b <= 1.0):
            raise ValueError("b must be in [0, 1]")


@dataclass(frozen=True)
class Rm3Params:
    fb_docs: int = 10
    fb_terms: int = 10
    orig_weight: float = 0.5

    def __post_init__(self):
        if self.fb_docs < 1 or self.fb_terms < 1:
            raise ValueError("fb_docs and fb_terms must be >= 1")
        if not (0.0 <= self.orig_weight <= 1.0):
            raise ValueError("orig_weight must be in [0, 1]")


class ExpandedQuery:
    """A normalized term-weight distribution (weights sum to 1)."""

    __slots__ = ("term_weights",)

    def __init__(self, term_weights: Mapping[str, float]):
        if not term_weights:
            raise ValueError("expanded query must have at least one term")
        total = sum(term_weights.values())
        if any(w < 0 for w in term_weights.values()) or total <= 0:
            raise ValueError("term weights must be non-negative with positive sum")
        self.term_weights = {t: w / total for t, w in term_weights.items()}

    def __eq__(self, other) -> bool:
        return isinstance(other, ExpandedQuery) and self.term_weights == other.term_weights

    def __repr__(self) -> str:
        top = sorted(self.term_weights.items(), key=lambda kv: -kv[1])[:5]
        return f"ExpandedQuery({dict(top)!r}...)"


def query_mle(text: str, stopwords: frozenset[str] = DEFAULT_STOPWORDS) -> ExpandedQuery:
    """Maximum-likelihood term distribution of a raw query string."""
    terms = tokenize(text, stopwords)
    if not terms:
        raise ValueError("empty query")
    return ExpandedQuery(Counter(terms))


class InvertedIndex:
    """Term postings over an ingested corpus, stored alongside it."""

    def __init__(self, store: Store, stopwords: Optional[frozenset[str]] = None):
        self.store = store
        self.stopwords = DEFAULT_STOPWORDS if stopwords is None else stopwords
        self._conn = store._conn
        self._conn.executescript(
            """
            CREATE TABLE IF NOT EXISTS postings (
                term TEXT PRIMARY KEY,
                df INTEGER NOT NULL,
                entries TEXT NOT NULL
            );
            CREATE TABLE IF NOT EXISTS doc_lengths (
                doc_id TEXT PRIMARY KEY,
                length INTEGER NOT NULL
            );
            """
        )

    # -- construction ------------------------------------------------------

    def build(self) -> CorpusStats:
        """(Re)index every stored document. Idempotent for a fixed corpus."""
        if self.store.doc_count() == 0:
            raise StoreError("cannot build index: no corpus ingested")
        postings: dict[str, list[tuple[str, int]]] = {}
        lengths: dict[str, int] = {}
        for doc in self.store.iter_docs():
            terms = tokenize(f"{doc.title} {doc.contents}", self.stopwords)
            lengths[doc.doc_id] = len(terms)
            for term, tf in sorted(Counter(terms).items()):
                postings.setdefault(term, []).append((doc.doc_id, tf))
        with self._conn:
            self._conn.execute("DELETE FROM postings")
            self._conn.execute("DELETE FROM doc_lengths")
            self._conn.executemany(
                "INSERT INTO postings VALUES (?, ?, ?)",
                [(t, len(p), json.dumps(p)) for t, p in sorted(postings.items())],
            )
            self._conn.executemany(
                "INSERT INTO doc_lengths VALUES (?, ?)", sorted(lengths.items())
            )
        self.store.set_doc_lengths(lengths)
        return self.store.corpus_stats()

    def is_built(self) -> bool:
        return self._conn.execute("SELECT COUNT(*) FROM doc_lengths").fetchone()[0] > 0

    # -- statistics --------------------------------------------------------

    def doc_count(self) -> int:
        return self._conn.execute("SELECT COUNT(*) FROM doc_lengths").fetchone()[0]

    def avg_doc_length(self) -> float:
        n, total = self._conn.execute(
            "SELECT COUNT(*), COALESCE(SUM(length), 0) FROM doc_lengths"
        ).fetchone()
        return total / n if n else 0.0

    def doc_length(self, doc_id: str) -> int:
        row = self._conn.execute(
            "SELECT length FROM doc_lengths WHERE doc_id = ?", (doc_id,)
        ).fetchone()
        if row is None:
            raise StoreError(f"doc not indexed: {doc_id}")
        return row[0]

    def df(self, term: str) -> int:
        row = self._conn.execute("SELECT df FROM postings WHERE term = ?", (term,)).fetchone()
        return row[0] if row else 0

    def postings(self, term: str) -> list[tuple[str, int]]:
        row = self._conn.execute(
            "SELECT entries FROM postings WHERE term = ?", (term,)
        ).fetchone()
        if row is None:
            return []
        return [(d, tf) for d, tf in json.loads(row[0])]

    # -- scoring -----------------------------------------------------------

    def idf(self, term: str) -> float:
        n = self.doc_count()
        df = self.df(term)
        return math.log(1.0 + (n - df + 0.5) / (df + 0.5))

    def bm25_search(
        self,
        query: "str | ExpandedQuery",
        k: int,
        params: Bm25Params = Bm25Params(),
        topic_id: str = "_",
        kind: str = "document",
        tag: str = "bm25",
    ) -> RunList:
        """Top-k documents by BM25; a raw-text query weights each term by its
        frequency in the query. Ties break by doc_id ascending."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if not self.is_built():
            raise StoreError("index not built")
        if isinstance(query, str):
            terms = tokenize(query, self.stopwords)
            if not terms:
                raise ValueError("empty query")
            weights: Mapping[str, float] = Counter(terms)
        else:
            weights = query.term_weights

        avgdl = self.avg_doc_length()
        scores: dict[str, float] = {}
        for term, w in weights.items():
            if w == 0:
                continue
            plist = self.postings(term)
            if not plist:
                continue
            idf = self.idf(term)
            for doc_id, tf in plist:
                dl = self.doc_length(doc_id)
                norm = tf / (tf + params.k1 * (1.0 - params.b + params.b * dl / avgdl))
                scores[doc_id] = scores.get(doc_id, 0.0) + w * idf * norm
        top = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
        return RunList.from_scores(topic_id, kind, top, tag=tag)

    # -- expansion ---------------------------------------------------------

    def rm3_expand(
        self,
        query_text: str,
        params: Rm3Params = Rm3Params(),
        scorer: Bm25Params = Bm25Params(),
    ) -> ExpandedQuery:
        """RM3: estimate a relevance model from the top BM25 feedback documents
        and interpolate it with the original query distribution."""
        original = query_mle(query_text, self.stopwords)
        run = self.bm25_search(query_text, params.fb_docs, scorer)
        if len(run) == 0:
            logger.warning("rm3: no feedback documents; returning unexpanded query")
            return original

        score_total = sum(score for _, _, score in run.items)
        if score_total <= 0:
            logger.warning("rm3: zero feedback mass; returning unexpanded query")
            return original

        relevance: Counter = Counter()
        for doc_id, _, score in run.items:
            doc = self.store.get_doc(doc_id)
            terms = tokenize(f"{doc.title} {doc.contents}", self.stopwords)
            if not terms:
                continue
            tf = Counter(terms)
            dl = len(terms)
            for term, f in tf.items():
                relevance[term] += (f / dl) * (score / score_total)

        top_terms = sorted(relevance.items(), key=lambda kv: (-kv[1], kv[0]))[: params.fb_terms]
        fb_total = sum(w for _, w in top_terms)
        if fb_total <= 0:
            return original
        expansion = {t: w / fb_total for t, w in top_terms}

        merged: dict[str, float] = {}
        for t, w in original.term_weights.items():
            merged[t] = merged.get(t, 0.0) + params.orig_weight * w
        for t, w in expansion.items():
            merged[t] = merged.get(t, 0.0) + (1.0 - params.orig_weight) * w
        return ExpandedQuery({t: w for t, w in merged.items() if w > 0})

    def entity_qe_expand(
        self,
        query_text: str,
        relevant_entities: Sequence[EntityRecord],
        orig_weight: float = 0.5,
    ) -> ExpandedQuery:
        """Enrich the query with tokens of known-relevant entity names.

        Each distinct entity counts once regardless of duplicates in the input.
        """
        if not (0.0 <= orig_weight <= 1.0):
            raise ValueError("orig_weight must be in [0, 1]")
        original = query_mle(query_text, self.stopwords)

        seen: set[str] = set()
        name_terms: Counter = Counter()
        for ent in relevant_entities:
            if ent.entity_id in seen:
                continue
            seen.add(ent.entity_id)
            name_terms.update(tokenize(ent.name, self.stopwords))
        if not name_terms:
            logger.warning("entity-qe: no usable entity names; returning unexpanded query")
            return original
        total = sum(name_terms.values())
        expansion = {t: c / total for t, c in name_terms.items()}

        merged: dict[str, float] = {}
        for t, w in original.term_weights.items():
            merged[t] = merged.get(t, 0.0) + orig_weight * w
        for t, w in expansion.items():
            merged[t] = merged.get(t, 0.0) + (1.0 - orig_weight) * w
        return ExpandedQuery({t: w for t, w in merged.items() if w > 0})
