"""Request and response models for the HTTP service.

Every request embeds the full run configuration, so a request body is
self-contained and reproducible.  Paths refer to the service host's
filesystem; the service is a local experiment runner, not a multi-tenant
API.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from ..config import RunConfig


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GenDataRequest(_Strict):
    config: RunConfig
    out_dir: str
    force: bool = False


class GenDataResponse(_Strict):
    train_path: str
    test_path: str
    n_train: int
    n_test: int
    train_device_counts: dict[str, int]
    test_device_counts: dict[str, int]
    seen_devices: list[int]
    unseen_devices: list[int]


class ScoreRequest(_Strict):
    config: RunConfig
    dataset_path: str
    out_path: str
    force: bool = False


class EntropySummary(_Strict):
    min: float
    median: float
    max: float


class ScoreResponse(_Strict):
    partition_path: str
    n: int
    n_invariant: int
    n_specific: int
    probe_accuracy: float
    entropy: EntropySummary


class TrainRequest(_Strict):
    config: RunConfig
    dataset_path: str
    partition_path: str | None = None
    mode: Literal["curriculum", "baseline"]
    out_prefix: str
    force: bool = False
    run_index: int = Field(0, ge=0)
    target_steps: int | None = Field(None, ge=1)


class TrainResponse(_Strict):
    mode: str
    run_id: str
    steps: int
    epochs: int
    metrics_path: str
    model_path: str
    transition_epoch: int | None = None
    stage1_steps: int | None = None
    stage2_steps: int | None = None
    audit_path: str | None = None


class EvaluateRequest(_Strict):
    config: RunConfig
    dataset_path: str
    model_path: str
    out_path: str | None = None
    force: bool = False


class EvaluateResponse(_Strict):
    format: str
    overall_classwise_acc: float
    per_class_acc: list[float]
    per_device_acc: list[float | None]
    seen_acc: float | None
    unseen_acc: float | None
    confusion: list[list[int]]
    n_evaluated: int
    report_path: str | None = None


class CompareRequest(_Strict):
    config: RunConfig
    out_dir: str
    force: bool = False
    wait: bool = False


class CompareSummary(_Strict):
    out_dir: str
    n_runs: int
    results_path: str
    table_path: str
    curve_path: str
    manifest_path: str


class JobStatus(_Strict):
    job_id: str
    status: Literal["queued", "running", "done", "failed"]
    progress: list[str] = []
    result: CompareSummary | None = None
    error: str | None = None


class HealthResponse(_Strict):
    status: str
    version: str
