"""querykg: query-specific knowledge graph construction and evaluation.

Builds KGs for individual information needs from sparse retrieval runs and
precomputed entity links, derives ground-truth graphs from relevance
judgments, and evaluates both the graphs (node/edge precision and recall)
and the underlying rankings (NDCG, MAP, Recall).
"""

from .model import (
    DocumentRecord,
    EntityLink,
    EntityRecord,
    InMemoryLinks,
    QrelSet,
    QueryKG,
    RunList,
    Topic,
    binarize_qrels,
)
from .store import CorpusStats, LinkStats, Store, StoreError, read_qrels, write_qrels
from .index import (
    Bm25Params,
    ExpandedQuery,
    InvertedIndex,
    Rm3Params,
    query_mle,
    tokenize,
)
from .runio import RunFormatError, RunSet, read_run, write_run
from .metrics import (
    EvalReport,
    MetricError,
    average_precision,
    doc_entity_relevance_correlation,
    evaluate_runset,
    ndcg_at_k,
    pearson,
    recall_at_k,
    report_table,
)
from .kg import KgError, KgParams, KgStats, build_query_kg, build_truth_kg, kg_stats, mean_kg_stats
from .kgeval import ELEMENT_TYPES, KgEvalReport, SweepResult, evaluate_kg, mean_reports, sweep
from .export import GraphFormatError, export_dot, export_json, import_json
from .fixtures import FixtureError, FixtureSpec, gen_fixture

__version__ = "0.1.0"

__all__ = [
    "Bm25Params",
    "CorpusStats",
    "DocumentRecord",
    "ELEMENT_TYPES",
    "EntityLink",
    "EntityRecord",
    "EvalReport",
    "ExpandedQuery",
    "FixtureError",
    "FixtureSpec",
    "GraphFormatError",
    "InMemoryLinks",
    "InvertedIndex",
    "KgError",
    "KgEvalReport",
    "KgParams",
    "KgStats",
    "LinkStats",
    "MetricError",
    "QrelSet",
    "QueryKG",
    "Rm3Params",
    "RunFormatError",
    "RunList",
    "RunSet",
    "Store",
    "StoreError",
    "SweepResult",
    "Topic",
    "average_precision",
    "binarize_qrels",
    "build_query_kg",
    "build_truth_kg",
    "doc_entity_relevance_correlation",
    "evaluate_kg",
    "evaluate_runset",
    "export_dot",
    "export_json",
    "gen_fixture",
    "import_json",
    "kg_stats",
    "mean_kg_stats",
    "mean_reports",
    "ndcg_at_k",
    "pearson",
    "query_mle",
    "read_qrels",
    "read_run",
    "recall_at_k",
    "report_table",
    "sweep",
    "tokenize",
    "write_qrels",
    "write_run",
]
