"""Ranking effectiveness measures and the document-entity relevance correlation.

Conventions follow the usual TREC tooling: NDCG uses linear gain with a
log2(rank+1) discount, unjudged retrieved items count as non-relevant, and
topics with no relevant item are excluded from means (they are reported in
``judged_topics`` instead of silently averaged as zeros).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .model import QrelSet, RunList, binarize_qrels
from .runio import RunSet


class MetricError(Exception):
    pass


def ndcg_at_k(run: RunList, qrels: QrelSet, k: int) -> Optional[float]:
    """NDCG@k with linear gain; None when the topic has no positive grade."""
    if k < 1:
        raise ValueError("k must be >= 1")
    grades = qrels.items_for_topic(run.topic_id)
    ideal = sorted((g for g in grades.values() if g > 0), reverse=True)
    if not ideal:
        return None
    dcg = 0.0
    for item_id, rank, _ in run.items[:k]:
        g = grades.get(item_id, 0)
        if g:
            dcg += g / math.log2(rank + 1)
    idcg = sum(g / math.log2(i + 1) for i, g in enumerate(ideal[:k], start=1))
    return dcg / idcg


def average_precision(run: RunList, qrels: QrelSet) -> Optional[float]:
    """AP over the full run depth; binary relevance (grade >= 1)."""
    relevant = qrels.relevant_items(run.topic_id)
    if not relevant:
        return None
    hits = 0
    total = 0.0
    for item_id, rank, _ in run.items:
        if item_id in relevant:
            hits += 1
            total += hits / rank
    return total / len(relevant)


def recall_at_k(run: RunList, qrels: QrelSet, k: int) -> Optional[float]:
    if k < 1:
        raise ValueError("k must be >= 1")
    relevant = qrels.relevant_items(run.topic_id)
    if not relevant:
        return None
    found = sum(1 for item_id, _, _ in run.items[:k] if item_id in relevant)
    return found / len(relevant)


@dataclass
class EvalReport:
    """Per-topic and mean measure values for one system run."""

    per_topic: dict[str, dict[str, float]]
    means: dict[str, float]
    judged_topics: int
    skipped_topics: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "per_topic": self.per_topic,
                "means": self.means,
                "judged_topics": self.judged_topics,
                "skipped_topics": self.skipped_topics,
            },
            indent=2,
            sort_keys=True,
        )

    def to_tsv(self) -> str:
        """Measure rows for this system; see ``report_table`` for multi-system tables."""
        lines = ["measure\tvalue"]
        for measure in sorted(self.means):
            lines.append(f"{measure}\t{self.means[measure]:.4f}")
        return "\n".join(lines) + "\n"


def report_table(reports: Mapping[str, EvalReport]) -> str:
    """Tab-separated table of measure rows by system columns."""
    systems = sorted(reports)
    measures = sorted({m for r in reports.values() for m in r.means})
    lines = ["measure\t" + "\t".join(systems)]
    for m in measures:
        cells = [
            f"{reports[s].means[m]:.4f}" if m in reports[s].means else "-" for s in systems
        ]
        lines.append(m + "\t" + "\t".join(cells))
    return "\n".join(lines) + "\n"


def _parse_measure(spec: str):
    """'ndcg@100' -> ('ndcg', 100); 'map' -> ('map', None)."""
    if "@" in spec:
        name, k_s = spec.split("@", 1)
        return name, int(k_s)
    return spec, None


def evaluate_run(run: RunList, qrels: QrelSet, measures: Sequence[str]) -> dict[str, Optional[float]]:
    out: dict[str, Optional[float]] = {}
    for spec in measures:
        name, k = _parse_measure(spec)
        if name == "ndcg":
            out[spec] = ndcg_at_k(run, qrels, k if k else len(run) or 1)
        elif name == "map":
            out[spec] = average_precision(run, qrels)
        elif name == "recall":
            if k is None:
                raise ValueError("recall requires a cutoff, e.g. recall@1000")
            out[spec] = recall_at_k(run, qrels, k)
        else:
            raise ValueError(f"unknown measure: {spec}")
    return out


def evaluate_runset(
    runset: RunSet,
    qrels: QrelSet,
    measures: Sequence[str] = ("ndcg@100", "map", "recall@1000"),
) -> EvalReport:
    """Evaluate every run topic found in the qrels and average across topics
    that have at least one relevant item."""
    if runset.kind != qrels.kind:
        raise MetricError(f"run kind {runset.kind!r} does not match qrel kind {qrels.kind!r}")
    common = set(runset.runs) & qrels.topics()
    if not common:
        raise MetricError("no topics shared between run and qrels")
    per_topic: dict[str, dict[str, float]] = {}
    skipped: list[str] = []
    for topic_id in sorted(common):
        values = evaluate_run(runset[topic_id], qrels, measures)
        if any(v is None for v in values.values()):
            skipped.append(topic_id)
            continue
        per_topic[topic_id] = values  # type: ignore[assignment]
    if not per_topic:
        raise MetricError("no topic has a relevant item")
    means = {
        m: sum(per_topic[t][m] for t in per_topic) / len(per_topic) for m in measures
    }
    return EvalReport(per_topic, means, judged_topics=len(per_topic), skipped_topics=skipped)


def pearson(xs: Sequence[float], ys: Sequence[float]) -> Optional[float]:
    """Sample Pearson correlation; None when either side has zero variance."""
    n = len(xs)
    if n != len(ys):
        raise ValueError("xs and ys must have equal length")
    if n < 2:
        return None
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    if sxx == 0 or syy == 0:
        return None
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return sxy / math.sqrt(sxx * syy)


def doc_entity_relevance_correlation(
    doc_qrels: QrelSet,
    ent_qrels: QrelSet,
    links,
    binarize_threshold: int = 1,
) -> Optional[float]:
    """Correlation between a judged document's binarized relevance and the
    fraction of its distinct judged linked entities that are relevant.

    Sample points pool (topic, document) pairs across all topics; documents
    with no judged linked entity contribute no point. ``links`` is any object
    with ``get_links_for_doc``.
    """
    doc_bin = binarize_qrels(doc_qrels, binarize_threshold)
    ent_bin = binarize_qrels(ent_qrels, binarize_threshold)
    xs: list[float] = []
    ys: list[float] = []
    for (topic_id, doc_id), grade in sorted(doc_bin.entries.items()):
        judged_entities = ent_bin.items_for_topic(topic_id)
        if not judged_entities:
            continue
        try:
            doc_links = links.get_links_for_doc(doc_id)
        except Exception:
            continue
        linked = {ln.entity_id for ln in doc_links if ln.entity_id in judged_entities}
        if not linked:
            continue
        relevant = sum(1 for e in linked if judged_entities[e] >= 1)
        xs.append(float(grade))
        ys.append(relevant / len(linked))
    return pearson(xs, ys)
