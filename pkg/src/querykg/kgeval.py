"""Node and edge precision/recall of constructed graphs against ground truth,
plus (k_doc, k_ent) sweeps producing per-type matrices.

Matching is on identifiers only; weights never affect the comparison. Cells
that would divide by zero (empty constructed set for precision, empty truth
set for recall) are undefined and excluded from cross-topic means rather than
averaged in as zeros.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .model import QrelSet, QueryKG
from .runio import RunSet
from .kg import KgError, KgParams, build_query_kg, build_truth_kg

ELEMENT_TYPES = ("doc_node", "entity_node", "qd_edge", "qe_edge", "de_edge")


def _element_sets(kg: QueryKG) -> dict[str, set]:
    return {
        "doc_node": set(kg.doc_nodes),
        "entity_node": set(kg.entity_nodes),
        "qd_edge": set(kg.qd_edges),
        "qe_edge": set(kg.qe_edges),
        "de_edge": set(kg.de_edges),
    }


@dataclass
class KgEvalReport:
    """Per-element-type precision and recall; None marks an undefined cell."""

    topic_id: str
    precision: dict[str, Optional[float]]
    recall: dict[str, Optional[float]]


def evaluate_kg(constructed: QueryKG, truth: QueryKG) -> KgEvalReport:
    if constructed.topic_id != truth.topic_id:
        raise KgError(
            f"topic mismatch: {constructed.topic_id!r} vs {truth.topic_id!r}"
        )
    built = _element_sets(constructed)
    gold = _element_sets(truth)
    precision: dict[str, Optional[float]] = {}
    recall: dict[str, Optional[float]] = {}
    for t in ELEMENT_TYPES:
        inter = len(built[t] & gold[t])
        precision[t] = inter / len(built[t]) if built[t] else None
        recall[t] = inter / len(gold[t]) if gold[t] else None
    return KgEvalReport(constructed.topic_id, precision, recall)


def _mean_defined(values: Sequence[Optional[float]]) -> Optional[float]:
    defined = [v for v in values if v is not None]
    return sum(defined) / len(defined) if defined else None


def mean_reports(reports: Sequence[KgEvalReport]) -> KgEvalReport:
    """Average defined cells across topics."""
    if not reports:
        raise KgError("no reports to average")
    return KgEvalReport(
        topic_id="<mean>",
        precision={t: _mean_defined([r.precision[t] for r in reports]) for t in ELEMENT_TYPES},
        recall={t: _mean_defined([r.recall[t] for r in reports]) for t in ELEMENT_TYPES},
    )


@dataclass
class SweepResult:
    """Mean precision and recall per element type, per k cutoff."""

    k_values: list[int]
    precision: dict[str, list[Optional[float]]]
    recall: dict[str, list[Optional[float]]]
    topics: int

    def _table(self, matrix: Mapping[str, Sequence[Optional[float]]]) -> str:
        lines = ["type\t" + "\t".join(str(k) for k in self.k_values)]
        for t in ELEMENT_TYPES:
            cells = ["-" if v is None else f"{v:.4f}" for v in matrix[t]]
            lines.append(t + "\t" + "\t".join(cells))
        return "\n".join(lines) + "\n"

    def precision_table(self) -> str:
        return self._table(self.precision)

    def recall_table(self) -> str:
        return self._table(self.recall)

    def to_json(self) -> str:
        return json.dumps(
            {
                "k_values": self.k_values,
                "precision": self.precision,
                "recall": self.recall,
                "topics": self.topics,
            },
            indent=2,
            sort_keys=True,
        )


def sweep(
    topic_ids: Sequence[str],
    doc_runs: RunSet,
    ent_runs: RunSet,
    links,
    k_values: Sequence[int],
    doc_qrels: QrelSet,
    ent_qrels: QrelSet,
    binarize_threshold: int = 1,
    k_ent_values: Optional[Sequence[int]] = None,
) -> SweepResult:
    """Build graphs at each cutoff and average evaluation across topics.

    By default k_doc and k_ent move together; pass ``k_ent_values`` of the
    same length for an asymmetric sweep.
    """
    ents = list(k_ent_values) if k_ent_values is not None else list(k_values)
    if len(ents) != len(k_values):
        raise KgError("k_ent_values must match k_values in length")

    truths: dict[str, QueryKG] = {}
    for topic_id in topic_ids:
        if topic_id not in doc_runs or topic_id not in ent_runs:
            continue
        try:
            truths[topic_id] = build_truth_kg(
                topic_id, doc_qrels, ent_qrels, links, binarize_threshold
            )
        except KgError:
            continue
    if not truths:
        raise KgError("no ground-truth graphs constructible for the given topics")

    precision: dict[str, list[Optional[float]]] = {t: [] for t in ELEMENT_TYPES}
    recall: dict[str, list[Optional[float]]] = {t: [] for t in ELEMENT_TYPES}
    for k_doc, k_ent in zip(k_values, ents):
        params = KgParams(k_doc=k_doc, k_ent=k_ent)
        reports = []
        for topic_id, truth in sorted(truths.items()):
            built = build_query_kg(
                topic_id, doc_runs[topic_id], ent_runs[topic_id], links, params
            )
            reports.append(evaluate_kg(built, truth))
        mean = mean_reports(reports)
        for t in ELEMENT_TYPES:
            precision[t].append(mean.precision[t])
            recall[t].append(mean.recall[t])
    return SweepResult(list(k_values), precision, recall, topics=len(truths))
