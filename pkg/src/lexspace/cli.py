"""Offline pipeline commands plus the API server."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import ingestion, learner_model as lm, morphology, planner, semantics
from .config import EngineConfig


def _write_json(path: str, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def _cmd_ingest(args: argparse.Namespace) -> int:
    stopwords = ingestion.load_stopwords(args.stopwords)
    if args.pretagged:
        corpus = ingestion.load_pretagged(args.book)
    else:
        corpus = ingestion.tokenize_and_tag(Path(args.book).read_text(encoding="utf-8"))
    index = ingestion.extract_targets(corpus, stopwords, args.min_freq)
    _write_json(args.out, ingestion.target_index_to_json(index))
    print(f"{len(index.units)} targets from {index.unique_word_units} unique units "
          f"({index.sentence_count} sentences) -> {args.out}")
    return 0


def _cmd_families(args: argparse.Namespace) -> int:
    index = ingestion.target_index_from_json(json.loads(Path(args.index).read_text(encoding="utf-8")))
    table = morphology.load_affix_table(args.affixes)
    vocab = None
    if args.embeddings:
        vocab = _read_embedding_vocab(args.embeddings)
    families = morphology.build_families(index, table, level_cap=args.level_cap, known_vocab=vocab)
    _write_json(args.out, morphology.families_to_json(families, index.book_id, args.level_cap))
    print(f"{len(families)} families from {len(index.units)} targets -> {args.out}")
    return 0


def _read_embedding_vocab(path: str) -> set[str]:
    vocab = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.split(" ", 1)[0]
            if word:
                vocab.add(word)
    return vocab


def _cmd_graph(args: argparse.Namespace) -> int:
    doc = json.loads(Path(args.families).read_text(encoding="utf-8"))
    families = morphology.families_from_json(doc)
    vocab = {m.lemma for f in families for m in f.members}
    if args.index:
        index = ingestion.target_index_from_json(json.loads(Path(args.index).read_text(encoding="utf-8")))
        vocab.update(index.lemma_frequencies)
    table = semantics.load_embeddings(args.embeddings, vocabulary=vocab)
    graph = semantics.build_graph(families, table, tau=args.tau, degree_cap=args.cap,
                                  book_id=doc.get("book_id", ""))
    _write_json(args.out, semantics.graph_to_json(graph))
    print(f"{len(graph)} nodes, {len(graph.edges)} edges -> {args.out}")
    return 0


def _load_graph(path: str) -> semantics.FamilyGraph:
    return semantics.graph_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def _cmd_plan(args: argparse.Namespace) -> int:
    graph = _load_graph(args.graph)
    if args.model:
        model = lm.model_from_json(json.loads(Path(args.model).read_text(encoding="utf-8")))
    else:
        model = lm.init_model(graph, "cli")
    plan = planner.plan_session(graph, model, session_size=args.size)
    print(json.dumps({
        "session_id": plan.session_id,
        "targets": list(plan.targets),
        "created_from": plan.created_from,
    }, indent=1))
    return 0


def _cmd_centrality(args: argparse.Namespace) -> int:
    graph = _load_graph(args.graph)
    print("family,score")
    for row in planner.centrality_table(graph):
        print(f"{row.family},{row.score:.6f}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app

    config = EngineConfig.from_file(args.config) if args.config else EngineConfig()
    uvicorn.run(create_app(config=config), host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="lexspace", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="tag a book and extract learning targets")
    p.add_argument("--book", required=True)
    p.add_argument("--pretagged", action="store_true",
                   help="the book file is already in the pre-tagged format")
    p.add_argument("--stopwords", default=None)
    p.add_argument("--min-freq", type=int, default=5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("families", help="group targets into word families")
    p.add_argument("--index", required=True)
    p.add_argument("--affixes", default=None)
    p.add_argument("--level-cap", type=int, default=6)
    p.add_argument("--embeddings", default=None,
                   help="optional vector file whose vocabulary validates strips")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_families)

    p = sub.add_parser("graph", help="build the pruned family graph")
    p.add_argument("--families", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--index", default=None, help="optional index.json for wider vector lookup")
    p.add_argument("--tau", type=float, default=0.3)
    p.add_argument("--cap", type=int, default=5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_graph)

    p = sub.add_parser("plan", help="print a session plan for a graph + model")
    p.add_argument("--graph", required=True)
    p.add_argument("--model", default=None)
    p.add_argument("--size", type=int, default=20)
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("centrality", help="dump closeness centrality as CSV")
    p.add_argument("--graph", required=True)
    p.set_defaults(func=_cmd_centrality)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--config", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
