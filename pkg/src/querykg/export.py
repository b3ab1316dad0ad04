"""Graph serialization: Graphviz DOT for inspection, JSON for lossless exchange.

DOT output styles the three node types with distinct fill colors (query blue,
documents orange, entities green) and draws entity-link edges dashed. Output
ordering is deterministic, so repeated exports are byte-identical. Large
graphs truncate to the top-N nodes of each type by weight before rendering.
"""
from __future__ import annotations

import json
from typing import Mapping, Optional

from .model import QueryKG

QUERY_COLOR = "#aecbfa"
DOC_COLOR = "#fdc69c"
ENTITY_COLOR = "#a8d5a2"


class GraphFormatError(Exception):
    pass


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(
    kg: QueryKG,
    entity_names: Optional[Mapping[str, str]] = None,
    max_nodes: int = 50,
) -> str:
    """Render a QueryKG as a DOT digraph, truncated to the heaviest
    ``max_nodes`` documents and entities."""
    names = entity_names or {}
    docs = sorted(kg.doc_nodes.items(), key=lambda kv: (-kv[1], kv[0]))[:max_nodes]
    ents = sorted(kg.entity_nodes.items(), key=lambda kv: (-kv[1], kv[0]))[:max_nodes]
    kept_docs = {d for d, _ in docs}
    kept_ents = {e for e, _ in ents}

    lines = [f'digraph "{_dot_escape(kg.topic_id)}" {{']
    lines.append("  rankdir=LR;")
    lines.append("  node [style=filled];")
    lines.append(
        f'  "query" [label="{_dot_escape(kg.topic_id)}", shape=ellipse, '
        f'fillcolor="{QUERY_COLOR}"];'
    )
    for doc_id, _ in sorted(docs):
        lines.append(
            f'  "doc:{_dot_escape(doc_id)}" [label="{_dot_escape(doc_id)}", '
            f'shape=box, fillcolor="{DOC_COLOR}"];'
        )
    for entity_id, _ in sorted(ents):
        label = names.get(entity_id, entity_id)
        lines.append(
            f'  "ent:{_dot_escape(entity_id)}" [label="{_dot_escape(label)}", '
            f'shape=oval, fillcolor="{ENTITY_COLOR}"];'
        )
    for doc_id in sorted(kept_docs):
        w = kg.qd_edges[doc_id]
        lines.append(f'  "query" -> "doc:{_dot_escape(doc_id)}" [weight={w:.6f}];')
    for entity_id in sorted(kept_ents):
        w = kg.qe_edges[entity_id]
        lines.append(f'  "query" -> "ent:{_dot_escape(entity_id)}" [weight={w:.6f}];')
    for (doc_id, entity_id), w in sorted(kg.de_edges.items()):
        if doc_id not in kept_docs or entity_id not in kept_ents:
            continue
        lines.append(
            f'  "doc:{_dot_escape(doc_id)}" -> "ent:{_dot_escape(entity_id)}" '
            f'[style=dashed, label="{w:g}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_json(kg: QueryKG) -> str:
    """Lossless JSON form of a QueryKG, including all weights."""
    payload = {
        "topic_id": kg.topic_id,
        "doc_nodes": [{"id": d, "weight": w} for d, w in sorted(kg.doc_nodes.items())],
        "entity_nodes": [{"id": e, "weight": w} for e, w in sorted(kg.entity_nodes.items())],
        "qd_edges": [{"doc_id": d, "weight": w} for d, w in sorted(kg.qd_edges.items())],
        "qe_edges": [{"entity_id": e, "weight": w} for e, w in sorted(kg.qe_edges.items())],
        "de_edges": [
            {"doc_id": d, "entity_id": e, "weight": w}
            for (d, e), w in sorted(kg.de_edges.items())
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def import_json(text: str) -> QueryKG:
    """Parse ``export_json`` output back into a QueryKG, validating structure."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFormatError(f"invalid JSON: {e}") from e

    def _require(container, key, path):
        if not isinstance(container, dict) or key not in container:
            raise GraphFormatError(f"missing key at {path}.{key}")
        return container[key]

    topic_id = _require(obj, "topic_id", "$")
    try:
        doc_nodes = {
            n["id"]: float(n["weight"]) for n in _require(obj, "doc_nodes", "$")
        }
        entity_nodes = {
            n["id"]: float(n["weight"]) for n in _require(obj, "entity_nodes", "$")
        }
        qd_edges = {
            e["doc_id"]: float(e["weight"]) for e in _require(obj, "qd_edges", "$")
        }
        qe_edges = {
            e["entity_id"]: float(e["weight"]) for e in _require(obj, "qe_edges", "$")
        }
        de_edges = {
            (e["doc_id"], e["entity_id"]): float(e["weight"])
            for e in _require(obj, "de_edges", "$")
        }
    except (KeyError, TypeError, ValueError) as e:
        raise GraphFormatError(f"malformed graph element: {e}") from e
    try:
        return QueryKG(topic_id, doc_nodes, entity_nodes, qd_edges, qe_edges, de_edges)
    except ValueError as e:
        raise GraphFormatError(str(e)) from e
