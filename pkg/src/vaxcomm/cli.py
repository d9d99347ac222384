"""Command-line pipeline: synth, detect, categorize, score, characterize.

Stages talk to each other only through files in the output directory. Each
stage also writes ``manifest.<stage>.json`` with the config hash, seed,
input/output digests and stage counters.

Exit codes: 0 success, 2 usage or input error, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from . import __version__
from .community import read_partition_csv, refine, write_partition_csv
from .community.refine import community_weights
from .config import ConfigError, RunConfig, from_dict, load_config
from .credibility import (
    fit_model_set,
    labeled_texts,
    read_scores_csv,
    save_models,
    score_pages,
    write_scores_csv,
)
from .fileio import atomic_path, atomic_write_text, file_digest
from .graph import build_directed, build_follower_graph, symmetrize
from .ingest import LoadStats, ValidationError, load_followers, load_labeled_pages, load_pages, load_tweets
from .links import FixtureResolver, canonical_url, categorize_corpus, filter_pages, load_domains, write_categories_csv
from .measures import MEASURES, internal_weights, profile_communities, write_measures_csv, write_report_json
from .viz import UnknownMeasureError, emit_viz

logger = logging.getLogger("vaxcomm")

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT = 0, 2, 3


class UsageError(Exception):
    pass


class InvariantError(Exception):
    pass


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(type(obj).__name__)


def write_manifest(cfg: RunConfig, stage: str, inputs: dict[str, Path], outputs: dict[str, Path],
                   counters: dict) -> Path:
    doc = {
        "stage": stage,
        "version": __version__,
        "config_hash": cfg.digest(),
        "seed": cfg.seed,
        "inputs": {k: file_digest(p) for k, p in sorted(inputs.items()) if p is not None},
        "outputs": {k: file_digest(p) for k, p in sorted(outputs.items())},
        "counters": counters,
    }
    path = cfg.out_dir / f"manifest.{stage}.json"
    atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def _require(cfg: RunConfig, key: str) -> Path:
    try:
        return cfg.input(key)
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc


def _upstream(cfg: RunConfig, name: str, stage: str) -> Path:
    path = cfg.out_dir / name
    if not path.exists():
        raise UsageError(f"missing {path}: run the '{stage}' stage first")
    return path


def _tweet_authors(cfg: RunConfig, counters: dict) -> set[str]:
    path = cfg.input("tweets", required=False)
    if path is None:
        return set()
    stats = LoadStats(str(path))
    authors = {t.user_id for t in load_tweets(path, stats)}
    counters["tweets"] = stats.as_dict()
    return authors


# stages -----------------------------------------------------------------------

def cmd_detect(cfg: RunConfig) -> int:
    followers = _require(cfg, "followers")
    counters: dict = {}
    stats = LoadStats(str(followers))
    edges = load_followers(followers, stats)
    counters["followers"] = stats.as_dict()
    if not edges:
        raise UsageError(f"{followers}: no edges")
    authors = _tweet_authors(cfg, counters)
    g = build_follower_graph(edges, authors)
    counters["isolated_authors_added"] = len(authors - {u for e in edges for u in (e.from_user, e.to_user)})
    counters["nodes"] = g.n
    counters["edges"] = g.n_edges
    counters["total_weight"] = g.total_weight

    result = refine(g, cfg.refine)
    p = result.partition
    if len(p) != g.n or (p.sizes == 0).any():
        raise InvariantError("partition is not total")
    if int(p.sizes.max()) > cfg.refine.max_size:
        raise InvariantError(f"community of size {int(p.sizes.max())} exceeds max_size={cfg.refine.max_size}")
    counters.update(rounds=result.rounds, fixpoint=result.fixpoint, communities=p.n_communities)

    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    with atomic_path(out / "partition.csv") as tmp:
        write_partition_csv(tmp, g.nodes, p)
    atomic_write_text(out / "refinement.jsonl",
                      "".join(json.dumps(r, sort_keys=True, default=_json_default) + "\n" for r in result.log))
    write_manifest(cfg, "detect", {"followers": followers, "tweets": cfg.input("tweets", required=False)},
                   {"partition": out / "partition.csv", "refinement_log": out / "refinement.jsonl"}, counters)

    print(f"{p.n_communities} communities over {g.n} users "
          f"({result.rounds} round(s), {'fixpoint' if result.fixpoint else 'max_rounds reached'})")
    for key, count in result.log[-1]["sizes"].items():
        print(f"  size {key:>11}: {count}")
    return EXIT_OK


def _categorize(cfg: RunConfig, counters: dict):
    tweets_path = _require(cfg, "tweets")
    stats = LoadStats(str(tweets_path))
    tweets = load_tweets(tweets_path, stats)
    counters["tweets"] = stats.as_dict()
    resolver_path = cfg.input("resolver", required=False)
    resolver = FixtureResolver.from_jsonl(resolver_path) if resolver_path else None
    domains = load_domains(cfg.input("domains", required=False))
    links, cat_counts = categorize_corpus(tweets, resolver, domains)
    counters["categories"] = dict(sorted(cat_counts.items()))
    return links, {"tweets": tweets_path, "resolver": resolver_path, "domains": cfg.input("domains", required=False)}


def cmd_categorize(cfg: RunConfig) -> int:
    counters: dict = {}
    links, inputs = _categorize(cfg, counters)
    out = cfg.out_dir / "categories.csv"
    with atomic_path(out) as tmp:
        write_categories_csv(tmp, links)
    write_manifest(cfg, "categorize", inputs, {"categories": out}, counters)
    for name, count in counters["categories"].items():
        print(f"  {name:>26}: {count}")
    return EXIT_OK


def cmd_score(cfg: RunConfig) -> int:
    pages_path = _require(cfg, "pages")
    labels_path = _require(cfg, "labels")
    counters: dict = {}
    stats = LoadStats(str(pages_path))
    pages = load_pages(pages_path, stats)
    counters["pages"] = stats.as_dict()
    try:
        labeled = load_labeled_pages(labels_path)
    except ValidationError as exc:
        raise UsageError(str(exc)) from exc
    by_url = {p.url: p for p in pages}
    texts, labels, missing = labeled_texts(labeled, by_url)
    counters["labels"] = {"rows": len(labeled), "without_content": missing, "used": len(texts)}
    if len(texts) < cfg.classifier.folds:
        raise UsageError(f"need at least {cfg.classifier.folds} labelled pages with content, got {len(texts)}")

    report: Counter = Counter()
    eligible = sorted(filter_pages(pages, report), key=lambda p: canonical_url(p.url))
    counters["filter"] = dict(sorted(report.items()))

    models, cv = fit_model_set(texts, labels, cfg.classifier)
    counters["cv"] = cv.as_dict()
    counters["selection"] = models.selection
    scores = score_pages(eligible, models)
    counters["scored_pages"] = len(scores)
    counters["buckets"] = dict(sorted(Counter(s.bucket.label for s in scores).items()))

    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    with atomic_path(out / "scores.csv") as tmp:
        write_scores_csv(tmp, eligible, scores)
    with atomic_path(out / "models.json") as tmp:
        save_models(tmp, models)
    write_manifest(cfg, "score", {"pages": pages_path, "labels": labels_path},
                   {"scores": out / "scores.csv", "models": out / "models.json"}, counters)

    print(f"{cfg.classifier.folds}-fold CV accuracy ({len(texts)} labelled pages):")
    print("  criterion    svm     rf   selected")
    for c in range(len(models.selection)):
        print(f"  c{c + 1:<9} {cv.accuracy['svm'][c]:.3f}  {cv.accuracy['rf'][c]:.3f}   {models.selection[c]}")
    print(f"scored {len(scores)} pages: {counters['buckets']}")
    return EXIT_OK


def cmd_characterize(cfg: RunConfig, measures: list[str] | None = None) -> int:
    requested = list(measures) if measures else list(cfg.measures)
    for name in requested:
        if name not in MEASURES:
            raise UsageError(str(UnknownMeasureError(name)))
    partition_path = _upstream(cfg, "partition.csv", "detect")
    scores_path = _upstream(cfg, "scores.csv", "score")
    followers_path = _require(cfg, "followers")
    counters: dict = {}

    assignment = read_partition_csv(partition_path)
    scores = read_scores_csv(scores_path)
    links, inputs = _categorize(cfg, counters)

    edges = load_followers(followers_path)
    directed = build_directed(edges)
    follower_counts = directed.in_degree()
    g = symmetrize(directed).with_nodes(set(assignment) - set(directed.nodes))
    missing = [n for n in g.nodes if n not in assignment]
    if missing:
        raise UsageError(f"{len(missing)} follower-network users absent from {partition_path} (e.g. {missing[0]})")
    labels = np.array([assignment[n] for n in g.nodes], dtype=np.int64)
    internal, clamped = internal_weights(g, labels)
    comm_w = community_weights(g, labels)
    counters["density_clamped_pairs"] = clamped
    counters["follower_count_source"] = "network_in_degree"

    profiles = profile_communities(assignment, links, scores, follower_counts, internal, counters)

    out = cfg.out_dir
    with atomic_path(out / "measures.csv") as tmp:
        write_measures_csv(tmp, profiles)
    with atomic_path(out / "report.json") as tmp:
        write_report_json(tmp, profiles, {"config_hash": cfg.digest(), "seed": cfg.seed, "counters": counters})
    outputs = {"measures": out / "measures.csv", "report": out / "report.json"}
    for name in requested:
        jp, dp = emit_viz(profiles, comm_w, name, out / "viz", cfg.edge_floor)
        outputs[f"viz/{name}.json"] = jp
        outputs[f"viz/{name}.dot"] = dp
    inputs.update(partition=partition_path, scores=scores_path, followers=followers_path)
    write_manifest(cfg, "characterize", inputs, outputs, counters)
    print(f"characterised {len(profiles)} communities -> {out / 'measures.csv'}")
    return EXIT_OK


def cmd_synth(spec_path: Path | None, out_dir: Path, seed: int | None) -> int:
    from .synth import load_synth_spec, write_dataset, write_pipeline_config

    try:
        graph_spec, corpus_spec, refine_doc = load_synth_spec(spec_path, seed)
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"invalid synth spec: {exc}") from exc
    truth = write_dataset(out_dir, graph_spec, corpus_spec)
    write_pipeline_config(out_dir, graph_spec.seed, refine_doc)
    print(f"wrote synthetic dataset to {out_dir}: {truth['graph']['n_edges']} follow edges, "
          f"{truth['n_tweets']} tweets, {truth['n_pages']} pages, {truth['n_labeled']} labels")
    return EXIT_OK


# argument parsing ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vaxcomm", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", type=Path, required=config_required, help="run config (TOML)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", type=Path, help="override the output directory")

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--spec", type=Path, help="synth spec (TOML); defaults if omitted")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path, required=True)

    common(sub.add_parser("detect", help="follower graph -> partition.csv"))
    common(sub.add_parser("categorize", help="tweets -> categories.csv"))
    common(sub.add_parser("score", help="pages + labels -> scores.csv, models.json"))
    p = sub.add_parser("characterize", help="partition + scores + tweets -> measures.csv, viz/")
    common(p)
    p.add_argument("--measure", action="append", default=[], help="measure to visualise (repeatable)")
    return parser


def _load(args) -> RunConfig:
    try:
        cfg = load_config(args.config) if args.config else from_dict({})
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        cfg = cfg.with_seed(args.seed)
    if args.out is not None:
        from dataclasses import replace

        cfg = replace(cfg, out_dir=args.out)
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            return cmd_synth(args.spec, args.out, args.seed)
        cfg = _load(args)
        if args.command == "detect":
            return cmd_detect(cfg)
        if args.command == "categorize":
            return cmd_categorize(cfg)
        if args.command == "score":
            return cmd_score(cfg)
        return cmd_characterize(cfg, args.measure)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (OSError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
