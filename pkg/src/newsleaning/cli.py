"""Command-line entry point for the leaning-prediction pipeline.

One declarative config file drives every stage; flags only override
individual config keys. Exit codes: 0 success, 1 input error (missing or
corrupt files), 2 validation failure, 3 missing derived resource (the
error message names the command that produces it).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path
from typing import Sequence

from .config import ExperimentConfig, load_config
from .corpus import (
    Corpus,
    SplitSpec,
    load_corpus,
    load_split,
    make_media_split,
    make_random_split,
    save_split,
    validate_split,
)
from .errors import (
    BackboneLoadError,
    BetaOutOfRange,
    CacheMiss,
    DimensionMismatch,
    DuplicateId,
    EmptyCorpus,
    EmptyTestSet,
    MalformedRecord,
    NetworkError,
    NonFiniteLoss,
    ResourceMissing,
    TooFewDomains,
    UnknownLabel,
    UnknownParty,
)
from .model import KnowledgeFusedClassifier
from .skipgram import WordEmbeddingModel
from .topics import load_debates, train_debate_embeddings
from .training import (
    ExperimentResult,
    TrainConfig,
    evaluate,
    rank_results,
    run_matrix,
    sweep_beta,
    train,
    write_results_csv,
)
from .wiki import (
    FixtureWikipediaClient,
    LiveWikipediaClient,
    WikiCache,
    ingest_wiki,
    load_overrides,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VALIDATION = 2
EXIT_RESOURCE = 3

_INPUT_ERRORS = (FileNotFoundError, MalformedRecord, EmptyCorpus,
                 UnknownLabel, UnknownParty, DuplicateId, NetworkError)
_VALIDATION_ERRORS = (ValueError, BetaOutOfRange, TooFewDomains, EmptyTestSet,
                      NonFiniteLoss, DimensionMismatch)
_RESOURCE_ERRORS = (ResourceMissing, CacheMiss, BackboneLoadError)


# ---------------------------------------------------------------- plumbing


def _say(message: str) -> None:
    print(message)


def _write_config_echo(config: ExperimentConfig, config_hash: str) -> None:
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    echo = {"config_hash": config_hash, "config": config.to_dict()}
    (out / "config_echo.json").write_text(
        json.dumps(echo, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _stamp_path(out: Path, stage: str) -> Path:
    return out / "stamps" / f"{stage}.json"


def _stage_done(out: Path, stage: str, config_hash: str) -> bool:
    path = _stamp_path(out, stage)
    if not path.exists():
        return False
    try:
        stamp = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError):
        return False
    if stamp.get("config_hash") != config_hash:
        return False
    return all((out / rel).exists() for rel in stamp.get("outputs", []))


def _write_stamp(out: Path, stage: str, config_hash: str,
                 outputs: Sequence[Path]) -> None:
    path = _stamp_path(out, stage)
    path.parent.mkdir(parents=True, exist_ok=True)
    rels = [str(p.relative_to(out)) if p.is_relative_to(out) else str(p)
            for p in outputs]
    path.write_text(json.dumps({"config_hash": config_hash, "outputs": rels},
                               indent=2) + "\n", encoding="utf-8")


def _resolve_config(args: argparse.Namespace) -> tuple[ExperimentConfig, str]:
    config = load_config(args.config)
    for attr, key in (("corpus", "corpus"), ("cache_dir", "wiki_cache"),
                      ("offline_fixtures", "wiki_fixtures"),
                      ("overrides", "overrides"), ("debates", "debates")):
        value = getattr(args, attr, None)
        if value is not None:
            config = dataclasses.replace(
                config,
                paths=dataclasses.replace(config.paths, **{key: str(value)}))
    if getattr(args, "dim", None) is not None:
        config = dataclasses.replace(
            config, embeddings=dataclasses.replace(config.embeddings,
                                                   embed_dim=int(args.dim)))
    config = config.with_overrides(output_dir=args.out, seed=args.seed)
    return config, config.config_hash()


def _load_corpus(config: ExperimentConfig) -> Corpus:
    config.require_inputs("corpus")
    return load_corpus(config.paths.corpus)


def _needs(configs: Sequence[TrainConfig]) -> tuple[bool, bool]:
    wiki = any(c.use_wiki for c in configs)
    topics = any(c.topic_encoder != "none" for c in configs)
    return wiki, topics


def _load_resources(config: ExperimentConfig, model_configs: Sequence[TrainConfig],
                    ) -> tuple[WikiCache | None, WordEmbeddingModel | None]:
    needs_wiki, needs_topics = _needs(model_configs)
    cache = None
    if needs_wiki:
        cache_dir = config.wiki_cache_dir
        if not cache_dir.exists():
            raise ResourceMissing(
                f"wiki cache not found at {cache_dir}", remedy="ingest-wiki")
        cache = WikiCache(cache_dir)
    embeddings = None
    if needs_topics:
        model_path = config.embedding_model_path
        if not model_path.exists():
            raise ResourceMissing(
                f"embedding model not found at {model_path}",
                remedy="train-embeddings")
        embeddings = WordEmbeddingModel.load(model_path)
    return cache, embeddings


def _load_splits(config: ExperimentConfig) -> list[SplitSpec]:
    splits = []
    for kind in config.split.kinds():
        for seed in config.split.seeds:
            path = config.split_path(kind, seed)
            if not path.exists():
                raise ResourceMissing(f"split file not found: {path}",
                                      remedy="split")
            splits.append(load_split(path))
    return splits


def _checkpoint_path(config: ExperimentConfig, tag: str, split_id: str) -> Path:
    return config.out_dir / "checkpoints" / f"{tag}@{split_id}.pt"


def _write_bar_chart(labels: Sequence[str], values: Sequence[float],
                     title: str, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(max(4.0, 1.1 * len(labels)), 3.6))
    ax.bar(range(len(labels)), values, color="#4878a8")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_ylim(0.0, 1.0)
    ax.set_ylabel("accuracy")
    ax.set_title(title)
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _print_results(results: Sequence[ExperimentResult]) -> None:
    for result in results:
        m = result.metrics
        _say(f"  {result.experiment_id}: accuracy={m.accuracy:.3f} "
             f"macro_f1={m.macro_f1:.3f} mae={m.mae:.3f} n_test={m.n_test}")


# ---------------------------------------------------------------- commands


def cmd_ingest_wiki(args: argparse.Namespace) -> int:
    config, config_hash = _resolve_config(args)
    out = config.out_dir
    _write_config_echo(config, config_hash)
    if args.resume and _stage_done(out, "ingest-wiki", config_hash):
        _say("ingest-wiki: up to date, skipping")
        return EXIT_OK
    corpus = _load_corpus(config)
    cache = WikiCache(config.wiki_cache_dir)
    if config.paths.wiki_fixtures is not None:
        config.require_inputs("wiki_fixtures")
        client = FixtureWikipediaClient(config.paths.wiki_fixtures)
    else:
        client = LiveWikipediaClient()
    overrides = None
    if config.paths.overrides is not None:
        config.require_inputs("overrides")
        overrides = load_overrides(config.paths.overrides)
    report = ingest_wiki(corpus, cache, client, overrides=overrides)
    _say(f"ingest-wiki: {report.total_domains} domains, "
         f"{report.already_cached} cached, {report.resolved} resolved, "
         f"{report.not_found} without a page")
    _write_stamp(out, "ingest-wiki", config_hash, [config.wiki_cache_dir])
    return EXIT_OK


def cmd_train_embeddings(args: argparse.Namespace) -> int:
    config, config_hash = _resolve_config(args)
    out = config.out_dir
    _write_config_echo(config, config_hash)
    model_path = config.embedding_model_path
    if args.resume and _stage_done(out, "train-embeddings", config_hash):
        _say("train-embeddings: up to date, skipping")
        return EXIT_OK
    config.require_inputs("debates")
    speeches = load_debates(config.paths.debates)
    model = train_debate_embeddings(speeches,
                                    embed_dim=config.embeddings.embed_dim,
                                    params=config.embeddings.params)
    model_path.parent.mkdir(parents=True, exist_ok=True)
    model.save(model_path)
    _say(f"train-embeddings: {len(model)} words x {model.embed_dim} dims "
         f"-> {model_path}")
    _write_stamp(out, "train-embeddings", config_hash, [model_path])
    return EXIT_OK


def cmd_split(args: argparse.Namespace) -> int:
    config, config_hash = _resolve_config(args)
    out = config.out_dir
    _write_config_echo(config, config_hash)
    if args.resume and _stage_done(out, "split", config_hash):
        _say("split: up to date, skipping")
        return EXIT_OK
    corpus = _load_corpus(config)
    outputs = []
    all_ok = True
    for kind in config.split.kinds():
        for seed in config.split.seeds:
            if kind == "media":
                split = make_media_split(corpus, config.split.fraction, seed)
            else:
                split = make_random_split(corpus, config.split.fraction, seed)
            path = config.split_path(kind, seed)
            path.parent.mkdir(parents=True, exist_ok=True)
            save_split(split, path)
            report = validate_split(split, corpus)
            status = "ok" if report.ok else "FAILED"
            _say(f"split {split.split_id}: train={len(split.train_ids)} "
                 f"test={len(split.test_ids)} validation={status}")
            for message in report.messages:
                _say(f"  - {message}")
            all_ok = all_ok and report.ok
            outputs.append(path)
    if not all_ok:
        return EXIT_VALIDATION
    _write_stamp(out, "split", config_hash, outputs)
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    config, config_hash = _resolve_config(args)
    out = config.out_dir
    _write_config_echo(config, config_hash)
    if args.resume and _stage_done(out, "train", config_hash):
        _say("train: up to date, skipping")
        return EXIT_OK
    corpus = _load_corpus(config)
    cache, embeddings = _load_resources(config, [config.model])
    splits = _load_splits(config)
    tag = config.model.variant_tag()
    outputs = []
    for split in splits:
        ckpt = _checkpoint_path(config, tag, split.split_id)
        hist = out / "history" / f"{tag}@{split.split_id}.jsonl"
        hist.parent.mkdir(parents=True, exist_ok=True)
        outcome = train(config.model, corpus, split, wiki_cache=cache,
                        embedding_model=embeddings, checkpoint_path=ckpt,
                        history_path=hist, config_hash=config_hash)
        final_loss = outcome.history[-1].loss if outcome.history else float("nan")
        _say(f"train {tag}@{split.split_id}: final loss {final_loss:.4f} "
             f"-> {ckpt}")
        outputs.extend([ckpt, hist])
    _write_stamp(out, "train", config_hash, outputs)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    config, config_hash = _resolve_config(args)
    out = config.out_dir
    _write_config_echo(config, config_hash)
    if args.resume and _stage_done(out, "evaluate", config_hash):
        _say("evaluate: up to date, skipping")
        return EXIT_OK
    corpus = _load_corpus(config)
    cache, embeddings = _load_resources(config, [config.model])
    splits = _load_splits(config)
    tag = config.model.variant_tag()
    results = []
    for split in splits:
        ckpt = Path(args.checkpoint) if args.checkpoint else \
            _checkpoint_path(config, tag, split.split_id)
        if not ckpt.exists():
            raise ResourceMissing(f"checkpoint not found: {ckpt}",
                                  remedy="train")
        estimator = KnowledgeFusedClassifier.load(ckpt)
        started = time.perf_counter()
        metrics = evaluate(estimator, corpus, split.test_ids, config.model,
                           wiki_cache=cache, embedding_model=embeddings)
        wall = time.perf_counter() - started
        results.append(ExperimentResult(
            experiment_id=f"{tag}@{split.split_id}", config=config.model,
            split_id=split.split_id, metrics=metrics, wall_seconds=wall))
    csv_path = out / "results" / "evaluate.csv"
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    write_results_csv(results, csv_path, config_hash=config_hash)
    chart = out / "charts" / "evaluate.png"
    _write_bar_chart([r.split_id for r in results],
                     [r.metrics.accuracy for r in results],
                     f"accuracy per split ({tag})", chart)
    _say(f"evaluate: {len(results)} split(s) -> {csv_path}")
    _print_results(results)
    _write_stamp(out, "evaluate", config_hash, [csv_path, chart])
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config, config_hash = _resolve_config(args)
    out = config.out_dir
    _write_config_echo(config, config_hash)
    if args.resume and _stage_done(out, "sweep", config_hash):
        _say("sweep: up to date, skipping")
        return EXIT_OK
    corpus = _load_corpus(config)
    cache, embeddings = _load_resources(config, [config.model])
    split = _load_splits(config)[0]
    results = sweep_beta(config.model, list(config.sweep_betas), corpus, split,
                         wiki_cache=cache, embedding_model=embeddings)
    csv_path = out / "results" / "sweep.csv"
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    write_results_csv(results, csv_path, config_hash=config_hash)
    chart = out / "charts" / "sweep.png"
    _write_bar_chart([f"beta={r.config.beta}" for r in results],
                     [r.metrics.accuracy for r in results],
                     f"accuracy per beta on {split.split_id}", chart)
    best = rank_results(results)[0]
    _say(f"sweep: {len(results)} beta value(s) on {split.split_id} "
         f"-> {csv_path}")
    _print_results(results)
    _say(f"  best: beta={best.config.beta} "
         f"(accuracy {best.metrics.accuracy:.3f})")
    _write_stamp(out, "sweep", config_hash, [csv_path, chart])
    return EXIT_OK


def cmd_matrix(args: argparse.Namespace) -> int:
    config, config_hash = _resolve_config(args)
    out = config.out_dir
    _write_config_echo(config, config_hash)
    if args.resume and _stage_done(out, "matrix", config_hash):
        _say("matrix: up to date, skipping")
        return EXIT_OK
    if not config.matrix:
        raise ValueError("the matrix command needs a matrix section in the "
                         "config (a list of {name, overrides} variants)")
    corpus = _load_corpus(config)
    variants = [(v.name, v.resolve(config.model)) for v in config.matrix]
    cache, embeddings = _load_resources(config, [cfg for _, cfg in variants])
    splits = _load_splits(config)
    outcome = run_matrix(variants, splits, corpus, wiki_cache=cache,
                         embedding_model=embeddings)
    for cell_id, message in outcome.failures:
        _say(f"matrix cell {cell_id} failed: {message}")
    if not outcome.results:
        raise ResourceMissing("every matrix cell failed; see messages above",
                              remedy="ingest-wiki")
    csv_path = out / "results" / "matrix.csv"
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    write_results_csv(outcome.results, csv_path, config_hash=config_hash)
    chart = out / "charts" / "matrix.png"
    _write_bar_chart([r.experiment_id for r in outcome.results],
                     [r.metrics.accuracy for r in outcome.results],
                     "accuracy per variant and split", chart)
    ranked = rank_results(outcome.results)
    _say(f"matrix: {len(outcome.results)} cell(s), "
         f"{len(outcome.failures)} failure(s) -> {csv_path}")
    _say("ranking (best accuracy first):")
    _print_results(ranked)
    _write_stamp(out, "matrix", config_hash, [csv_path, chart])
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="newsleaning",
        description="Political-leaning prediction pipeline: ingestion, "
                    "splits, embeddings, training, evaluation, sweeps.",
        epilog="exit codes: 0 success, 1 input error, 2 validation failure, "
               "3 missing resource")
    parser.add_argument("--config", required=True,
                        help="experiment config file (YAML or JSON)")
    parser.add_argument("--out", help="output directory "
                        "(overrides paths.output_dir)")
    parser.add_argument("--resume", action="store_true",
                        help="skip stages already completed with this config")
    parser.add_argument("--seed", type=int,
                        help="override every configured seed with this one")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-wiki",
                       help="fetch outlet pages into the wiki cache")
    p.add_argument("--corpus", help="override paths.corpus")
    p.add_argument("--cache-dir", help="override paths.wiki_cache")
    p.add_argument("--offline-fixtures",
                   help="serve pages from a fixture directory instead of "
                        "the live API (overrides paths.wiki_fixtures)")
    p.add_argument("--overrides", help="override paths.overrides "
                   "(domain to page-title JSON map)")
    p.set_defaults(func=cmd_ingest_wiki)

    p = sub.add_parser("train-embeddings",
                       help="train word embeddings on the debate corpus")
    p.add_argument("--debates", help="override paths.debates")
    p.add_argument("--dim", type=int, help="override embeddings.embed_dim")
    p.set_defaults(func=cmd_train_embeddings)

    p = sub.add_parser("split", help="generate and validate train/test splits")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="train one model per configured split")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate",
                       help="score trained checkpoints on their test splits")
    p.add_argument("--checkpoint", help="evaluate this checkpoint file "
                   "instead of the per-split default")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="train and evaluate across beta values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("matrix",
                       help="run every configured variant on every split")
    p.set_defaults(func=cmd_matrix)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _RESOURCE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        remedy = getattr(exc, "remedy", None)
        if remedy:
            print(f"hint: run the `{remedy}` command first", file=sys.stderr)
        return EXIT_RESOURCE
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
