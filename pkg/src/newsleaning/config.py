"""Declarative experiment configuration: loading, validation, hashing.

A single YAML or JSON file drives every pipeline command. Command-line
flags only override individual keys; the effective config is hashed and
the hash is stamped into every derived output for provenance.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .errors import MalformedRecord
from .skipgram import SkipgramParams
from .training import TrainConfig
from .validation import check_beta, check_fraction

SPLIT_KINDS = ("media", "random", "both")

_SKIPGRAM_KEYS = ("window", "negative", "epochs", "min_count",
                  "learning_rate", "seed")


def _take(section: dict, key: str, default: Any = None) -> Any:
    return section.pop(key, default)


def _reject_extras(section: dict, name: str) -> None:
    if section:
        extra = ", ".join(sorted(section))
        raise ValueError(f"unknown key(s) in {name} section: {extra}")


@dataclass(frozen=True)
class PathsConfig:
    """File locations the pipeline reads from and writes to."""

    corpus: str
    output_dir: str | None = None
    debates: str | None = None
    wiki_cache: str | None = None
    wiki_fixtures: str | None = None
    overrides: str | None = None
    embedding_model: str | None = None

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PathsConfig":
        section = dict(data)
        corpus = _take(section, "corpus")
        if not corpus:
            raise ValueError("paths.corpus is required")
        kwargs = {key: _take(section, key) for key in
                  ("output_dir", "debates", "wiki_cache", "wiki_fixtures",
                   "overrides", "embedding_model")}
        _reject_extras(section, "paths")
        return cls(corpus=str(corpus),
                   **{k: (str(v) if v is not None else None)
                      for k, v in kwargs.items()})


@dataclass(frozen=True)
class SplitConfig:
    """How train/test partitions are generated."""

    kind: str = "media"
    fraction: float = 0.07
    seeds: tuple[int, ...] = (0,)

    def __post_init__(self) -> None:
        if self.kind not in SPLIT_KINDS:
            raise ValueError(
                f"split.kind must be one of {SPLIT_KINDS}, got {self.kind!r}")
        check_fraction(self.fraction, name="split.fraction")
        if not self.seeds:
            raise ValueError("split.seeds must not be empty")
        if any(not isinstance(s, int) or isinstance(s, bool)
               for s in self.seeds):
            raise ValueError("split.seeds must be integers")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SplitConfig":
        section = dict(data)
        kwargs: dict[str, Any] = {}
        if "kind" in section:
            kwargs["kind"] = _take(section, "kind")
        if "fraction" in section:
            kwargs["fraction"] = float(_take(section, "fraction"))
        if "seeds" in section:
            kwargs["seeds"] = tuple(_take(section, "seeds"))
        _reject_extras(section, "split")
        return cls(**kwargs)

    def kinds(self) -> tuple[str, ...]:
        return ("media", "random") if self.kind == "both" else (self.kind,)


@dataclass(frozen=True)
class EmbeddingSettings:
    """Word-embedding training settings for the debate corpus."""

    embed_dim: int = 300
    params: SkipgramParams = field(default_factory=SkipgramParams)

    def __post_init__(self) -> None:
        if self.embed_dim < 1:
            raise ValueError("embeddings.embed_dim must be positive")
        self.params.validate()

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "EmbeddingSettings":
        section = dict(data)
        embed_dim = int(_take(section, "embed_dim", 300))
        params_kwargs = {key: _take(section, key)
                         for key in _SKIPGRAM_KEYS if key in section}
        _reject_extras(section, "embeddings")
        return cls(embed_dim=embed_dim, params=SkipgramParams(**params_kwargs))


@dataclass(frozen=True)
class MatrixVariant:
    """One named model variant in a comparison matrix."""

    name: str
    overrides: Mapping[str, Any] = field(default_factory=dict)

    def resolve(self, base: TrainConfig) -> TrainConfig:
        merged = dict(base.to_dict())
        merged.update(self.overrides)
        return TrainConfig.from_dict(merged)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated form of one experiment config file."""

    paths: PathsConfig
    split: SplitConfig = field(default_factory=SplitConfig)
    model: TrainConfig = field(default_factory=TrainConfig)
    embeddings: EmbeddingSettings = field(default_factory=EmbeddingSettings)
    sweep_betas: tuple[float, ...] = (0.0, 0.25, 0.5, 0.75, 1.0)
    matrix: tuple[MatrixVariant, ...] = ()

    def __post_init__(self) -> None:
        for beta in self.sweep_betas:
            check_beta(beta)
        names = [v.name for v in self.matrix]
        if len(names) != len(set(names)):
            raise ValueError("matrix variant names must be unique")
        for variant in self.matrix:
            variant.resolve(self.model)  # raises on unknown keys

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        top = dict(data)
        if "paths" not in top:
            raise ValueError("config requires a paths section")
        paths = PathsConfig.from_dict(_take(top, "paths"))
        split = SplitConfig.from_dict(_take(top, "split", {}) or {})
        model = TrainConfig.from_dict(_take(top, "model", {}) or {})
        embeds = EmbeddingSettings.from_dict(_take(top, "embeddings", {}) or {})
        kwargs: dict[str, Any] = {}
        sweep = _take(top, "sweep", None)
        if sweep is not None:
            section = dict(sweep)
            betas = _take(section, "betas")
            if not betas:
                raise ValueError("sweep.betas must be a non-empty list")
            _reject_extras(section, "sweep")
            kwargs["sweep_betas"] = tuple(float(b) for b in betas)
        matrix = _take(top, "matrix", None)
        if matrix is not None:
            variants = []
            for entry in matrix:
                item = dict(entry)
                name = _take(item, "name")
                if not name:
                    raise ValueError("each matrix variant needs a name")
                variants.append(MatrixVariant(
                    name=str(name), overrides=dict(_take(item, "overrides", {}))))
                _reject_extras(item, f"matrix variant {name!r}")
            kwargs["matrix"] = tuple(variants)
        _reject_extras(top, "top-level config")
        return cls(paths=paths, split=split, model=model, embeddings=embeds,
                   **kwargs)

    def to_dict(self) -> dict[str, Any]:
        return {
            "paths": dataclasses.asdict(self.paths),
            "split": {"kind": self.split.kind,
                      "fraction": self.split.fraction,
                      "seeds": list(self.split.seeds)},
            "model": self.model.to_dict(),
            "embeddings": {"embed_dim": self.embeddings.embed_dim,
                           **dataclasses.asdict(self.embeddings.params)},
            "sweep": {"betas": list(self.sweep_betas)},
            "matrix": [{"name": v.name, "overrides": dict(v.overrides)}
                       for v in self.matrix],
        }

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True,
                               separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    def with_overrides(self, *, output_dir: str | None = None,
                       seed: int | None = None) -> "ExperimentConfig":
        """Apply command-line overrides, returning a new config."""
        config = self
        if output_dir is not None:
            config = dataclasses.replace(
                config,
                paths=dataclasses.replace(config.paths, output_dir=output_dir))
        if seed is not None:
            config = dataclasses.replace(
                config,
                split=dataclasses.replace(config.split, seeds=(seed,)),
                model=dataclasses.replace(config.model, seed=seed),
                embeddings=dataclasses.replace(
                    config.embeddings,
                    params=dataclasses.replace(config.embeddings.params,
                                               seed=seed)))
        return config

    # Resolved locations -------------------------------------------------

    @property
    def out_dir(self) -> Path:
        if self.paths.output_dir is None:
            raise ValueError("no output directory set; pass --out or "
                             "set paths.output_dir in the config")
        return Path(self.paths.output_dir)

    @property
    def wiki_cache_dir(self) -> Path:
        if self.paths.wiki_cache is not None:
            return Path(self.paths.wiki_cache)
        return self.out_dir / "wiki_cache"

    @property
    def embedding_model_path(self) -> Path:
        if self.paths.embedding_model is not None:
            return Path(self.paths.embedding_model)
        return self.out_dir / "embeddings.txt"

    def split_path(self, kind: str, seed: int) -> Path:
        return self.out_dir / "splits" / f"{kind}-seed{seed}.json"

    def require_inputs(self, *names: str) -> None:
        """Check that the named input paths exist. Raises FileNotFoundError."""
        for name in names:
            value = getattr(self.paths, name)
            if value is None:
                raise FileNotFoundError(
                    f"config has no paths.{name} entry, which this command needs")
            if not Path(value).exists():
                raise FileNotFoundError(f"paths.{name} not found: {value}")


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Parse a YAML or JSON config file into a plain dict."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(f"{path}: invalid JSON: {exc}") from exc
    else:
        import yaml

        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise MalformedRecord(f"{path}: invalid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedRecord(f"{path}: config root must be a mapping")
    return data


def load_config(path: str | Path) -> ExperimentConfig:
    return ExperimentConfig.from_dict(load_config_file(path))
