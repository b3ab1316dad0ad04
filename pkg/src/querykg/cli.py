"""Command-line surface wiring the library into reproducible experiments.

Every command is deterministic given its arguments (plus the fixture seed).
Defaults may come from a JSON config file via --config; explicit flags
override config values. Commands that write into an output directory echo
the effective configuration there for provenance. Errors exit nonzero with a
single ``error: ...`` line on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import (
    Bm25Params,
    EntityRecord,
    FixtureSpec,
    InvertedIndex,
    KgParams,
    Rm3Params,
    RunSet,
    Store,
    binarize_qrels,
    doc_entity_relevance_correlation,
    evaluate_kg,
    evaluate_runset,
    export_dot,
    export_json,
    gen_fixture,
    import_json,
    kg_stats,
    read_qrels,
    read_run,
    build_query_kg,
    build_truth_kg,
    sweep,
    write_run,
)


class CliError(Exception):
    pass


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise CliError("config file must contain a JSON object")
    return cfg


def _cfg(args, cfg: dict, name: str, default=None):
    """Flag value if given, else config value, else default."""
    value = getattr(args, name.replace("-", "_"), None)
    if value is not None:
        return value
    return cfg.get(name, default)


def _echo_config(out_dir: Path, args, command: str):
    effective = {k: v for k, v in vars(args).items() if k != "func" and v is not None}
    effective["command"] = command
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "effective-config.json", "w", encoding="utf-8") as fh:
        json.dump(effective, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _bm25_params(args, cfg) -> Bm25Params:
    return Bm25Params(
        k1=float(_cfg(args, cfg, "k1", 0.9)),
        b=float(_cfg(args, cfg, "b", 0.4)),
    )


def _load_entity_names(path: str) -> dict[str, str]:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if isinstance(obj, dict) and "entity_names" in obj:
        obj = obj["entity_names"]  # fixture manifests carry names under this key
    if not isinstance(obj, dict):
        raise CliError("entity-names file must map entity_id to name")
    return obj


# -- commands --------------------------------------------------------------


def cmd_ingest(args, cfg):
    with Store(_cfg(args, cfg, "store")) as store:
        stats = store.ingest_corpus(args.corpus)
        print(f"corpus: {stats.doc_count} documents")
        if args.links:
            link_stats = store.ingest_entity_links(args.links, fmt=args.links_format)
            print(
                f"links: {link_stats.link_count} "
                f"({link_stats.links_per_doc:.1f} per document, "
                f"{link_stats.skipped_unknown_doc} skipped)"
            )
        if args.topics:
            n = store.ingest_topics(args.topics)
            print(f"topics: {n}")


def cmd_index(args, cfg):
    with Store(_cfg(args, cfg, "store")) as store:
        index = InvertedIndex(store)
        stats = index.build()
        print(
            f"indexed {stats.doc_count} documents, "
            f"avg length {stats.avg_doc_length:.1f} tokens"
        )


def cmd_search(args, cfg):
    params = _bm25_params(args, cfg)
    k = int(_cfg(args, cfg, "k", 1000))
    if args.entity_qe and (not args.entity_qrels or not args.entity_names):
        raise CliError("--entity-qe requires --entity-qrels and --entity-names")
    with Store(_cfg(args, cfg, "store")) as store:
        index = InvertedIndex(store)
        runs = {}
        tag = args.tag
        for topic in store.iter_topics():
            query_text = topic.query
            if args.with_formulations:
                query_text = " ".join([topic.query, *topic.manual_formulations])
            if args.rm3:
                rm3 = Rm3Params(
                    fb_docs=int(_cfg(args, cfg, "fb_docs", 10)),
                    fb_terms=int(_cfg(args, cfg, "fb_terms", 10)),
                    orig_weight=float(_cfg(args, cfg, "orig_weight", 0.5)),
                )
                query = index.rm3_expand(query_text, rm3, params)
            elif args.entity_qe:
                ent_qrels = binarize_qrels(
                    read_qrels(args.entity_qrels, "entity"),
                    int(_cfg(args, cfg, "threshold", 1)),
                )
                names = _load_entity_names(args.entity_names)
                relevant = [
                    EntityRecord(e, names.get(e, e))
                    for e in sorted(ent_qrels.relevant_items(topic.topic_id))
                ]
                query = index.entity_qe_expand(
                    query_text, relevant, float(_cfg(args, cfg, "orig_weight", 0.5))
                )
            else:
                query = query_text
            try:
                run = index.bm25_search(
                    query, k, params, topic_id=topic.topic_id, kind=args.kind, tag=tag
                )
            except ValueError:
                continue
            runs[topic.topic_id] = run
        runset = RunSet(runs, tag=tag, kind=args.kind)
        write_run(runset, args.output)
        print(f"wrote {sum(len(r) for r in runs.values())} lines for {len(runs)} topics")


def cmd_eval_run(args, cfg):
    runset = read_run(args.run, kind=args.kind)
    qrels = read_qrels(args.qrels, args.kind)
    measures = args.measures.split(",")
    report = evaluate_runset(runset, qrels, measures)
    if args.json:
        print(report.to_json())
    else:
        print(report.to_tsv(), end="")


def cmd_correlate(args, cfg):
    with Store(_cfg(args, cfg, "store")) as store:
        doc_qrels = read_qrels(args.doc_qrels, "document")
        ent_qrels = read_qrels(args.entity_qrels, "entity")
        r = doc_entity_relevance_correlation(
            doc_qrels, ent_qrels, store, int(_cfg(args, cfg, "threshold", 1))
        )
    if r is None:
        raise CliError("correlation undefined (fewer than 2 points or zero variance)")
    print(f"pearson\t{r:.4f}")


def cmd_build_kg(args, cfg):
    doc_runs = read_run(args.doc_run, kind="document")
    ent_runs = read_run(args.ent_run, kind="entity")
    params = KgParams(
        k_doc=int(_cfg(args, cfg, "k_doc", 100)),
        k_ent=int(_cfg(args, cfg, "k_ent", 100)),
        min_confidence=float(_cfg(args, cfg, "min_confidence", 0.0)),
    )
    with Store(_cfg(args, cfg, "store")) as store:
        kg = build_query_kg(args.topic, doc_runs[args.topic], ent_runs[args.topic], store, params)
        stats = kg_stats(kg)
    Path(args.output).write_text(export_json(kg) + "\n", encoding="utf-8")
    print(
        f"doc_nodes {stats.doc_nodes}  entity_nodes {stats.entity_nodes}  "
        f"de_edges {stats.de_edges}"
    )


def cmd_build_truth(args, cfg):
    doc_qrels = read_qrels(args.doc_qrels, "document")
    ent_qrels = read_qrels(args.entity_qrels, "entity")
    with Store(_cfg(args, cfg, "store")) as store:
        kg = build_truth_kg(
            args.topic, doc_qrels, ent_qrels, store, int(_cfg(args, cfg, "threshold", 1))
        )
        stats = kg_stats(kg)
    Path(args.output).write_text(export_json(kg) + "\n", encoding="utf-8")
    print(
        f"doc_nodes {stats.doc_nodes}  entity_nodes {stats.entity_nodes}  "
        f"de_edges {stats.de_edges}  connected_entities {stats.connected_entities}"
    )


def cmd_eval_kg(args, cfg):
    constructed = import_json(Path(args.constructed).read_text(encoding="utf-8"))
    truth = import_json(Path(args.truth).read_text(encoding="utf-8"))
    report = evaluate_kg(constructed, truth)
    print("type\tprecision\trecall")
    for t in report.precision:
        p = "-" if report.precision[t] is None else f"{report.precision[t]:.4f}"
        r = "-" if report.recall[t] is None else f"{report.recall[t]:.4f}"
        print(f"{t}\t{p}\t{r}")


def cmd_sweep(args, cfg):
    doc_runs = read_run(args.doc_run, kind="document")
    ent_runs = read_run(args.ent_run, kind="entity")
    doc_qrels = read_qrels(args.doc_qrels, "document")
    ent_qrels = read_qrels(args.entity_qrels, "entity")
    k_values = [int(x) for x in _cfg(args, cfg, "k_values", "10,50,100,250,1000").split(",")]
    topics = sorted(set(doc_runs.runs) & set(ent_runs.runs))
    with Store(_cfg(args, cfg, "store")) as store:
        result = sweep(
            topics,
            doc_runs,
            ent_runs,
            store,
            k_values,
            doc_qrels,
            ent_qrels,
            int(_cfg(args, cfg, "threshold", 1)),
        )
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "precision.tsv").write_text(result.precision_table(), encoding="utf-8")
    (out_dir / "recall.tsv").write_text(result.recall_table(), encoding="utf-8")
    (out_dir / "sweep.json").write_text(result.to_json() + "\n", encoding="utf-8")
    _echo_config(out_dir, args, "sweep")
    print(result.precision_table(), end="")
    print(result.recall_table(), end="")


def cmd_export(args, cfg):
    kg = import_json(Path(args.kg).read_text(encoding="utf-8"))
    if args.format == "json":
        text = export_json(kg) + "\n"
    else:
        names = _load_entity_names(args.entity_names) if args.entity_names else None
        text = export_dot(kg, entity_names=names, max_nodes=args.max_nodes)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        print(text, end="")


def cmd_gen_fixture(args, cfg):
    spec = FixtureSpec(
        seed=args.seed,
        topics=args.topics,
        docs=args.docs,
        rel_docs_per_topic=args.rel_docs,
        entities=args.entities,
        rel_ents_per_topic=args.rel_ents,
        hidden_rel_frac=args.hidden_rel_frac,
        entity_signal=args.entity_signal,
    )
    gen_fixture(args.output_dir, spec)
    _echo_config(Path(args.output_dir), args, "gen-fixture")
    print(f"fixture written to {args.output_dir}")


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="querykg", description=__doc__)
    parser.add_argument("--config", help="JSON config supplying default values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load corpus, links, and topics into a store")
    p.add_argument("--store", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--links")
    p.add_argument("--links-format", default="tsv", choices=["tsv", "jsonl"])
    p.add_argument("--topics")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("index", help="build the inverted index")
    p.add_argument("--store", required=True)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="rank stored topics with BM25 (optionally expanded)")
    p.add_argument("--store", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--k1", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--kind", default="document", choices=["document", "entity"])
    p.add_argument("--tag", default="bm25")
    p.add_argument("--rm3", action="store_true")
    p.add_argument("--fb-docs", type=int)
    p.add_argument("--fb-terms", type=int)
    p.add_argument("--orig-weight", type=float)
    p.add_argument("--entity-qe", action="store_true")
    p.add_argument("--entity-qrels")
    p.add_argument("--entity-names")
    p.add_argument("--threshold", type=int)
    p.add_argument("--with-formulations", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("eval-run", help="score a TREC run against qrels")
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--kind", default="document", choices=["document", "entity"])
    p.add_argument("--measures", default="ndcg@100,map,recall@1000")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval_run)

    p = sub.add_parser("correlate", help="document-entity relevance correlation")
    p.add_argument("--store", required=True)
    p.add_argument("--doc-qrels", required=True)
    p.add_argument("--entity-qrels", required=True)
    p.add_argument("--threshold", type=int)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("build-kg", help="construct a query-specific graph from runs")
    p.add_argument("--store", required=True)
    p.add_argument("--doc-run", required=True)
    p.add_argument("--ent-run", required=True)
    p.add_argument("--topic", required=True)
    p.add_argument("--k-doc", type=int)
    p.add_argument("--k-ent", type=int)
    p.add_argument("--min-confidence", type=float)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_build_kg)

    p = sub.add_parser("build-truth", help="derive the ground-truth graph from judgments")
    p.add_argument("--store", required=True)
    p.add_argument("--doc-qrels", required=True)
    p.add_argument("--entity-qrels", required=True)
    p.add_argument("--topic", required=True)
    p.add_argument("--threshold", type=int)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_build_truth)

    p = sub.add_parser("eval-kg", help="precision/recall of a graph against truth")
    p.add_argument("--constructed", required=True)
    p.add_argument("--truth", required=True)
    p.set_defaults(func=cmd_eval_kg)

    p = sub.add_parser("sweep", help="k-cutoff sweep of graph precision and recall")
    p.add_argument("--store", required=True)
    p.add_argument("--doc-run", required=True)
    p.add_argument("--ent-run", required=True)
    p.add_argument("--doc-qrels", required=True)
    p.add_argument("--entity-qrels", required=True)
    p.add_argument("--k-values", dest="k_values")
    p.add_argument("--threshold", type=int)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export", help="serialize a graph to DOT or JSON")
    p.add_argument("--kg", required=True)
    p.add_argument("--format", default="dot", choices=["dot", "json"])
    p.add_argument("--entity-names")
    p.add_argument("--max-nodes", type=int, default=50)
    p.add_argument("--output")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("gen-fixture", help="generate a deterministic synthetic dataset")
    p.add_argument("--output-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--topics", type=int, default=2)
    p.add_argument("--docs", type=int, default=60)
    p.add_argument("--rel-docs", type=int, default=6)
    p.add_argument("--entities", type=int, default=20)
    p.add_argument("--rel-ents", type=int, default=4)
    p.add_argument("--hidden-rel-frac", type=float, default=0.5)
    p.add_argument("--entity-signal", type=float, default=1.0)
    p.set_defaults(func=cmd_gen_fixture)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        args.func(args, cfg)
    except BrokenPipeError:
        return 1
    except Exception as e:  # single-line machine-parsable failure
        msg = str(e).replace("\n", " ")
        print(f"error: {msg}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
