"""Training and evaluation orchestration over corpora, splits, and resources.

This layer turns a corpus plus a split into estimator inputs, runs training,
scores the held-out side, and writes the experiment artifacts: checkpoints,
per-step loss history, and result CSV rows.  Beta sweeps and config-by-split
matrices are thin loops over the same single-run path.
"""

from __future__ import annotations

import csv
import json
import time
import warnings
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import Corpus, SplitSpec, validate_split
from .errors import EmptyTestSet, ResourceMissing
from .metrics import MetricsReport
from .model import ArticleInputs, HistoryRow, KnowledgeFusedClassifier
from .skipgram import WordEmbeddingModel
from .text import load_stopwords
from .topics import extract_topics, topic_mean_vector
from .validation import check_beta
from .wiki import WikiCache, wiki_text_for_article

RESULT_COLUMNS = ("experiment_id", "backbone", "topic_encoder", "use_wiki",
                  "beta", "split_id", "accuracy", "precision", "recall",
                  "macro_f1", "mae", "n_test", "wall_seconds")


@dataclass(frozen=True)
class TrainConfig:
    """One experiment's model and optimization settings.

    The optimization defaults (batch size 2, adaptive-moment optimizer,
    learning rate 1e-6, 3 epochs) mirror the reference setup; tests override
    them for speed.
    """

    backbone: str = "bert-base"
    topic_encoder: str = "none"
    use_wiki: bool = False
    beta: float = 0.5
    batch_size: int = 2
    learning_rate: float = 1e-6
    epochs: int = 3
    optimizer: str = "adam"
    seed: int = 0
    recon_weight: float = 1.0
    head: str = "paper_relu"
    missing_wiki: str = "empty_text"
    stub_dim: int = 128
    max_tokens: int = 512
    topic_out_dim: int = 200
    topic_hidden_dim: int = 256

    def __post_init__(self):
        check_beta(self.beta)
        if self.optimizer != "adam":
            raise ValueError(f"only the adam optimizer is supported, got {self.optimizer!r}")
        if self.missing_wiki not in ("empty_text", "zero_vector"):
            raise ValueError(f"unknown missing_wiki policy {self.missing_wiki!r}")

    @classmethod
    def from_dict(cls, obj: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(obj) - known)
        if unknown:
            raise ValueError(f"unknown train config keys: {unknown}")
        return cls(**obj)

    def to_dict(self) -> dict:
        return asdict(self)

    def variant_tag(self) -> str:
        """Compact human-readable name for this model configuration."""
        parts = [self.backbone]
        if self.use_wiki:
            parts.append("wiki")
        if self.topic_encoder != "none":
            parts.append(f"topic-{self.topic_encoder}")
        if self.use_wiki and self.topic_encoder != "none":
            parts.append(f"b{self.beta:g}")
        return "+".join(parts)


def build_estimator(config: TrainConfig) -> KnowledgeFusedClassifier:
    return KnowledgeFusedClassifier(
        backbone=config.backbone, stub_dim=config.stub_dim,
        max_tokens=config.max_tokens, topic_encoder=config.topic_encoder,
        topic_out_dim=config.topic_out_dim,
        topic_hidden_dim=config.topic_hidden_dim, use_wiki=config.use_wiki,
        beta=config.beta, head=config.head, batch_size=config.batch_size,
        learning_rate=config.learning_rate, epochs=config.epochs,
        seed=config.seed, recon_weight=config.recon_weight)


def assemble_features(corpus: Corpus, ids: Sequence[str], config: TrainConfig,
                      wiki_cache: WikiCache | None = None,
                      embedding_model: WordEmbeddingModel | None = None,
                      ) -> tuple[list[ArticleInputs], np.ndarray]:
    """Build estimator inputs for the given article ids.

    Raises ResourceMissing when a resource the config enables was not
    provided or is empty, with a hint naming the command that creates it.
    """
    if config.use_wiki:
        if wiki_cache is None or not wiki_cache.domains():
            raise ResourceMissing(
                "wiki knowledge is enabled but the page cache is empty",
                remedy="ingest-wiki")
    if config.topic_encoder != "none" and embedding_model is None:
        raise ResourceMissing(
            "a topic encoder is enabled but no embedding model was provided",
            remedy="train-embeddings")

    stopwords = load_stopwords() if config.topic_encoder != "none" else None
    X: list[ArticleInputs] = []
    y = np.empty(len(ids), dtype=np.int64)
    for k, art_id in enumerate(ids):
        article = corpus[art_id]
        wiki_text: str | None = None
        if config.use_wiki:
            text = wiki_text_for_article(article, wiki_cache)
            if text == "" and config.missing_wiki == "zero_vector":
                wiki_text = None
            else:
                wiki_text = text
        topic_vector = None
        if config.topic_encoder != "none":
            topic_set = extract_topics(article, embedding_model, stopwords)
            topic_vector = topic_mean_vector(topic_set, embedding_model)
        X.append(ArticleInputs(text=article.text, wiki_text=wiki_text,
                               topic_vector=topic_vector))
        y[k] = int(article.label)
    return X, y


@dataclass
class TrainOutcome:
    """Everything a single training run produces."""

    estimator: KnowledgeFusedClassifier
    history: list[HistoryRow]
    checkpoint_path: Path | None


def write_history(history: Sequence[HistoryRow], path: str | Path,
                  config_hash: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as f:
        if config_hash is not None:
            f.write(json.dumps({"config_hash": config_hash}) + "\n")
        for row in history:
            f.write(json.dumps(row.to_dict()) + "\n")


def train(config: TrainConfig, corpus: Corpus, split: SplitSpec,
          wiki_cache: WikiCache | None = None,
          embedding_model: WordEmbeddingModel | None = None,
          checkpoint_path: str | Path | None = None,
          history_path: str | Path | None = None,
          config_hash: str | None = None) -> TrainOutcome:
    """Fit one model on the split's training side and persist artifacts."""
    report = validate_split(split, corpus)
    if not report.ok:
        raise ValueError("split failed validation: " + "; ".join(report.messages))
    X, y = assemble_features(corpus, split.train_ids, config, wiki_cache,
                             embedding_model)
    estimator = build_estimator(config).fit(X, y)
    out_path: Path | None = None
    if checkpoint_path is not None:
        out_path = Path(checkpoint_path)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        metadata = {"config_hash": config_hash} if config_hash else None
        estimator.save(out_path, metadata=metadata)
    if history_path is not None:
        Path(history_path).parent.mkdir(parents=True, exist_ok=True)
        write_history(estimator.history_, history_path, config_hash)
    return TrainOutcome(estimator=estimator, history=estimator.history_,
                        checkpoint_path=out_path)


def evaluate(estimator: KnowledgeFusedClassifier, corpus: Corpus,
             test_ids: Sequence[str], config: TrainConfig,
             wiki_cache: WikiCache | None = None,
             embedding_model: WordEmbeddingModel | None = None) -> MetricsReport:
    """Score a fitted model on the given article ids."""
    if len(test_ids) == 0:
        raise EmptyTestSet("no test articles to evaluate")
    X, y = assemble_features(corpus, test_ids, config, wiki_cache,
                             embedding_model)
    predictions = estimator.predict(X)
    return MetricsReport.from_predictions(y, predictions)


@dataclass
class ExperimentResult:
    """One row of the results table."""

    experiment_id: str
    config: TrainConfig
    split_id: str
    metrics: MetricsReport
    wall_seconds: float
    error: str | None = None

    def to_row(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "backbone": self.config.backbone,
            "topic_encoder": self.config.topic_encoder,
            "use_wiki": self.config.use_wiki,
            "beta": self.config.beta,
            "split_id": self.split_id,
            "accuracy": self.metrics.accuracy,
            "precision": self.metrics.precision,
            "recall": self.metrics.recall,
            "macro_f1": self.metrics.macro_f1,
            "mae": self.metrics.mae,
            "n_test": self.metrics.n_test,
            "wall_seconds": self.wall_seconds,
        }


def run_experiment(config: TrainConfig, corpus: Corpus, split: SplitSpec,
                   wiki_cache: WikiCache | None = None,
                   embedding_model: WordEmbeddingModel | None = None,
                   experiment_id: str | None = None,
                   checkpoint_path: str | Path | None = None,
                   history_path: str | Path | None = None,
                   config_hash: str | None = None) -> ExperimentResult:
    """Train on the split, evaluate on its test side, time the whole thing."""
    started = time.perf_counter()
    outcome = train(config, corpus, split, wiki_cache, embedding_model,
                    checkpoint_path, history_path, config_hash)
    metrics = evaluate(outcome.estimator, corpus, split.test_ids, config,
                       wiki_cache, embedding_model)
    wall = time.perf_counter() - started
    if experiment_id is None:
        experiment_id = f"{config.variant_tag()}@{split.split_id}"
    return ExperimentResult(experiment_id=experiment_id, config=config,
                            split_id=split.split_id, metrics=metrics,
                            wall_seconds=wall)


def dedupe_betas(betas: Sequence[float]) -> list[float]:
    seen: list[float] = []
    for b in betas:
        b = check_beta(b)
        if b in seen:
            warnings.warn(f"duplicate beta {b} in sweep list; keeping first",
                          stacklevel=2)
        else:
            seen.append(b)
    return seen


def sweep_beta(config: TrainConfig, betas: Sequence[float], corpus: Corpus,
               split: SplitSpec, wiki_cache: WikiCache | None = None,
               embedding_model: WordEmbeddingModel | None = None,
               ) -> list[ExperimentResult]:
    """One independent train+evaluate per beta value, shared seed."""
    results = []
    for beta in dedupe_betas(betas):
        cfg = replace(config, beta=beta)
        result = run_experiment(cfg, corpus, split, wiki_cache, embedding_model,
                                experiment_id=f"{cfg.variant_tag()}@{split.split_id}")
        results.append(result)
    return results


@dataclass
class MatrixOutcome:
    """Results and failures from a config-by-split grid."""

    results: list[ExperimentResult] = field(default_factory=list)
    failures: list[tuple[str, str]] = field(default_factory=list)  # (cell id, error)


def run_matrix(variants: Sequence[tuple[str, TrainConfig]],
               splits: Sequence[SplitSpec], corpus: Corpus,
               wiki_cache: WikiCache | None = None,
               embedding_model: WordEmbeddingModel | None = None,
               max_workers: int = 1) -> MatrixOutcome:
    """Run every (variant, split) cell; failures are recorded, not fatal.

    Cells run sequentially by default.  A worker pool is only deterministic
    per cell when the backbone itself is deterministic in train mode (true
    for the hashing stub, not for dropout-bearing transformers).
    """
    cells = [(f"{name}@{split.split_id}", name, config, split)
             for name, config in variants for split in splits]
    outcome = MatrixOutcome()

    def run_cell(cell):
        cell_id, _name, config, split = cell
        return run_experiment(config, corpus, split, wiki_cache,
                              embedding_model, experiment_id=cell_id)

    if max_workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            futures = {pool.submit(run_cell, cell): cell for cell in cells}
            done = {}
            for future, cell in futures.items():
                try:
                    done[cell[0]] = future.result()
                except Exception as exc:
                    outcome.failures.append((cell[0], str(exc)))
            for cell in cells:  # report in deterministic cell order
                if cell[0] in done:
                    outcome.results.append(done[cell[0]])
    else:
        for cell in cells:
            try:
                outcome.results.append(run_cell(cell))
            except Exception as exc:
                outcome.failures.append((cell[0], str(exc)))
    return outcome


def rank_results(results: Sequence[ExperimentResult]) -> list[ExperimentResult]:
    """Best accuracy first; ties break on the experiment id for stability."""
    return sorted(results, key=lambda r: (-r.metrics.accuracy, r.experiment_id))


def write_results_csv(results: Sequence[ExperimentResult], path: str | Path,
                      config_hash: str | None = None,
                      include_wall_seconds: bool = True) -> None:
    """Write the results table.

    The config hash rides in a leading comment line, keeping the column
    schema fixed.  ``include_wall_seconds=False`` drops the one inherently
    nondeterministic column for byte-stable outputs.
    """
    columns = list(RESULT_COLUMNS)
    if not include_wall_seconds:
        columns.remove("wall_seconds")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        if config_hash is not None:
            f.write(f"# config_hash: {config_hash}\n")
        writer = csv.DictWriter(f, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for result in results:
            row = result.to_row()
            writer.writerow({k: _format_cell(row[k]) for k in columns})


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)
