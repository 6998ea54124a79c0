"""Pipeline configuration: one JSON file controls every gate and stage.

Unknown keys are errors so that a typo'd threshold fails loudly instead
of silently running with a default. The shipped defaults are practical
values for 24 kHz TTS corpora, not published numbers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .consistency import ConsistencyThresholds
from .errors import ConfigError
from .normalize import NormalizationConfig


@dataclass(frozen=True)
class TokenizerParams:
    strategy: str = "bpe"
    target_vocab_size: int = 512
    min_count: int = 1

    def __post_init__(self):
        if self.strategy not in ("bpe", "syllable"):
            raise ConfigError(f"tokenizer.strategy must be bpe|syllable, got {self.strategy!r}")
        if self.target_vocab_size < 6:
            raise ConfigError("tokenizer.target_vocab_size must be at least 6")
        if self.min_count < 1:
            raise ConfigError("tokenizer.min_count must be >= 1")


@dataclass(frozen=True)
class PipelineConfig:
    target_sample_rate: int = 24_000
    loudness_target_dbfs: float = -23.0
    trim_threshold_dbfs: float = -45.0
    trim_pad_ms: float = 100.0
    min_duration_s: float = 0.5
    max_duration_s: float = 30.0
    max_clipping_ratio: float = 0.001
    min_snr_db: float = 15.0
    consistency: ConsistencyThresholds = field(default_factory=ConsistencyThresholds)
    normalization: NormalizationConfig = field(default_factory=NormalizationConfig)
    tokenizer: TokenizerParams = field(default_factory=TokenizerParams)
    workers: int = 1

    def __post_init__(self):
        if self.target_sample_rate <= 0:
            raise ConfigError("target_sample_rate must be positive")
        if not self.min_duration_s < self.max_duration_s:
            raise ConfigError("min_duration_s must be below max_duration_s")
        if self.trim_threshold_dbfs >= 0:
            raise ConfigError("trim_threshold_dbfs must be negative")
        if not 0.0 <= self.max_clipping_ratio <= 1.0:
            raise ConfigError("max_clipping_ratio must be within [0, 1]")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        for name in ("loudness_target_dbfs", "min_snr_db", "trim_pad_ms"):
            value = getattr(self, name)
            if value != value or value in (float("inf"), float("-inf")):
                raise ConfigError(f"{name} must be finite")

    @classmethod
    def from_dict(cls, data: Mapping) -> "PipelineConfig":
        known = {
            "target_sample_rate", "loudness_target_dbfs", "trim_threshold_dbfs",
            "trim_pad_ms", "min_duration_s", "max_duration_s",
            "max_clipping_ratio", "min_snr_db", "consistency",
            "normalization", "tokenizer", "workers",
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown pipeline config keys: {sorted(unknown)}")
        kwargs: dict = {k: data[k] for k in known & set(data)}
        if "consistency" in kwargs:
            c = kwargs["consistency"]
            c_known = {"accept_z", "review_z", "min_corpus"}
            c_unknown = set(c) - c_known
            if c_unknown:
                raise ConfigError(f"unknown consistency keys: {sorted(c_unknown)}")
            try:
                kwargs["consistency"] = ConsistencyThresholds(**c)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        if "normalization" in kwargs:
            kwargs["normalization"] = NormalizationConfig.from_dict(kwargs["normalization"])
        if "tokenizer" in kwargs:
            t = kwargs["tokenizer"]
            t_known = {"strategy", "target_vocab_size", "min_count"}
            t_unknown = set(t) - t_known
            if t_unknown:
                raise ConfigError(f"unknown tokenizer keys: {sorted(t_unknown)}")
            kwargs["tokenizer"] = TokenizerParams(**t)
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"cannot parse config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "target_sample_rate": self.target_sample_rate,
            "loudness_target_dbfs": self.loudness_target_dbfs,
            "trim_threshold_dbfs": self.trim_threshold_dbfs,
            "trim_pad_ms": self.trim_pad_ms,
            "min_duration_s": self.min_duration_s,
            "max_duration_s": self.max_duration_s,
            "max_clipping_ratio": self.max_clipping_ratio,
            "min_snr_db": self.min_snr_db,
            "consistency": {
                "accept_z": self.consistency.accept_z,
                "review_z": self.consistency.review_z,
                "min_corpus": self.consistency.min_corpus,
            },
            "normalization": self.normalization.to_dict(),
            "tokenizer": {
                "strategy": self.tokenizer.strategy,
                "target_vocab_size": self.tokenizer.target_vocab_size,
                "min_count": self.tokenizer.min_count,
            },
            "workers": self.workers,
        }
