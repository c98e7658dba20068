"""Curriculum training: plateau detection, batch plans, trainers, logs."""

from .batching import BatchPlan, CyclicSampler
from .loop import (
    AuditEntry,
    TrainSettings,
    TrainState,
    init_train_state,
    read_audit_log,
    run_baseline,
    run_curriculum,
    run_stage1,
    run_stage2,
    stratified_holdout,
    write_audit_log,
)
from .metrics import EpochRecord, TransitionRecord, read_metrics_log, write_metrics_log
from .plateau import PlateauDetector

__all__ = [
    "AuditEntry",
    "BatchPlan",
    "CyclicSampler",
    "EpochRecord",
    "PlateauDetector",
    "TrainSettings",
    "TrainState",
    "TransitionRecord",
    "init_train_state",
    "read_audit_log",
    "read_metrics_log",
    "run_baseline",
    "run_curriculum",
    "run_stage1",
    "run_stage2",
    "stratified_holdout",
    "write_audit_log",
    "write_metrics_log",
]
