"""The single configuration document that drives every command.

One JSON document fixes the master seed, the benchmark generator, the
network shapes, the probe and trainer settings, and the comparison
grid.  Every field is validated up front and unknown keys are rejected,
so a typo fails before any work starts.  ``parse(emit(config))``
returns an equal config.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .data.generate import GeneratorSpec
from .data.subsets import ALLOWED_FRACTIONS
from .probe.train import ProbeSettings
from .training.loop import TrainSettings

MIXED_BATCH_INVARIANT_RATIO = 0.8


class NetworkConfig(BaseModel):
    """Scene-model shape: extractor hidden widths and the feature width."""

    model_config = ConfigDict(extra="forbid")

    hidden_dims: list[int] = [96]
    feature_dim: int = 32

    @field_validator("hidden_dims")
    @classmethod
    def _positive_dims(cls, dims: list[int]) -> list[int]:
        if any(d < 1 for d in dims):
            raise ValueError("hidden_dims must be positive")
        return dims

    @field_validator("feature_dim")
    @classmethod
    def _positive_feature(cls, dim: int) -> int:
        if dim < 1:
            raise ValueError("feature_dim must be positive")
        return dim


class ProbeConfig(BaseModel):
    """Device-probe training: feature source, probe shape, stopping."""

    model_config = ConfigDict(extra="forbid")

    feature_source: Literal["warmup", "random"] = "warmup"
    warm_up_epochs: int = Field(10, ge=0)
    hidden_dim: int = Field(64, ge=1)
    learning_rate: float = Field(1e-4, gt=0)
    optimizer: Literal["adam", "sgd"] = "adam"
    epochs: int = Field(300, ge=0)
    batch_size: int = Field(32, ge=1)
    patience: int = Field(20, ge=1)
    min_relative_improvement: float = Field(1e-3, ge=0)

    def to_settings(self) -> ProbeSettings:
        return ProbeSettings(
            hidden_dim=self.hidden_dim,
            learning_rate=self.learning_rate,
            optimizer=self.optimizer,
            epochs=self.epochs,
            batch_size=self.batch_size,
            patience=self.patience,
            min_relative_improvement=self.min_relative_improvement,
        )


class TrainingConfig(BaseModel):
    """Two-stage trainer settings shared by curriculum and baseline runs."""

    model_config = ConfigDict(extra="forbid")

    batch_size: int = Field(32, ge=1)
    optimizer: Literal["adam", "sgd"] = "adam"
    learning_rate: float = Field(1e-3, gt=0)
    stage1_max_epochs: int = Field(25, ge=1)
    stage2_epochs: int = Field(60, ge=0)
    patience: int = Field(5, ge=1)
    min_relative_improvement: float = Field(1e-3, ge=0)
    val_fraction: float = Field(0.1, gt=0, lt=1)
    invariant_ratio: float = MIXED_BATCH_INVARIANT_RATIO
    allow_ratio_override: bool = False
    stage2_early_stop: bool = True
    audit_sample_ids: bool = False

    @model_validator(mode="after")
    def _ratio_is_pinned(self) -> "TrainingConfig":
        if self.invariant_ratio != MIXED_BATCH_INVARIANT_RATIO and not self.allow_ratio_override:
            raise ValueError(
                f"invariant_ratio is fixed at {MIXED_BATCH_INVARIANT_RATIO}; "
                "set allow_ratio_override to change it deliberately"
            )
        if not (0.0 < self.invariant_ratio < 1.0):
            raise ValueError("invariant_ratio must lie in (0, 1)")
        return self

    def to_settings(self) -> TrainSettings:
        return TrainSettings(
            batch_size=self.batch_size,
            optimizer=self.optimizer,
            learning_rate=self.learning_rate,
            stage1_max_epochs=self.stage1_max_epochs,
            stage2_epochs=self.stage2_epochs,
            patience=self.patience,
            min_relative_improvement=self.min_relative_improvement,
            val_fraction=self.val_fraction,
            invariant_ratio=self.invariant_ratio,
            stage2_early_stop=self.stage2_early_stop,
            audit_sample_ids=self.audit_sample_ids,
        )


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seed: int = 7
    out_dir: str = "runs"
    fractions: list[float] = [0.05, 1.0]
    n_seeds: int = Field(10, ge=1)
    jobs: int = Field(1, ge=1)
    generator: GeneratorSpec = GeneratorSpec()
    network: NetworkConfig = NetworkConfig()
    probe: ProbeConfig = ProbeConfig()
    training: TrainingConfig = TrainingConfig()

    @field_validator("fractions")
    @classmethod
    def _known_fractions(cls, fractions: list[float]) -> list[float]:
        if not fractions:
            raise ValueError("fractions must not be empty")
        canonical = []
        for f in fractions:
            matches = [a for a in ALLOWED_FRACTIONS if math.isclose(f, a)]
            if not matches:
                raise ValueError(
                    f"fraction {f} is not one of the supported values {ALLOWED_FRACTIONS}"
                )
            canonical.append(matches[0])
        if len(set(canonical)) != len(canonical):
            raise ValueError("fractions must be unique")
        return sorted(canonical)

    def to_json(self) -> str:
        return self.model_dump_json(indent=2) + "\n"


def load_config(path: str | Path) -> RunConfig:
    return RunConfig.model_validate_json(Path(path).read_text())


def save_config(config: RunConfig, path: str | Path) -> None:
    Path(path).write_text(config.to_json())
