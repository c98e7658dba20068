"""Two-stage curriculum trainer and the step-matched uniform baseline.

Stage 1 trains on the domain-invariant subset only, with 10% of it held
out (stratified by scene) to drive the plateau transition.  Stage 2
mixes every batch at a fixed invariant:specific ratio from two
independent cyclic id streams, keeps the optimizer state from Stage 1,
and stops after a fixed epoch budget or a symmetric plateau on a mixed
held-out set.  The baseline trainer consumes an explicit total step
budget with uniformly shuffled batches, so a paired curriculum/baseline
comparison spends identical gradient-step counts from identical
initial parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..nn.model import SceneModel
from ..nn.optim import Optimizer, make_optimizer
from ..probe.partition import CurriculumPartition
from ..data.types import Dataset
from ..seeding import (
    CTX_BASELINE,
    CTX_STAGE1,
    CTX_STAGE2_INV,
    CTX_STAGE2_SPEC,
    CTX_VAL_FULL,
    CTX_VAL_INV,
    CTX_VAL_SPEC,
    SeedScope,
    STREAM_SHUFFLE,
    STREAM_VAL_SPLIT,
    rng_state_hash,
)
from .batching import BatchPlan, CyclicSampler
from .metrics import EpochRecord, TransitionRecord
from .plateau import PlateauDetector

STAGE1 = "stage1"
STAGE2 = "stage2"
DONE = "done"


@dataclass
class TrainSettings:
    batch_size: int = 32
    optimizer: str = "adam"
    learning_rate: float = 1e-3
    stage1_max_epochs: int = 25
    stage2_epochs: int = 60
    patience: int = 5
    min_relative_improvement: float = 1e-3
    val_fraction: float = 0.1
    invariant_ratio: float = 0.8
    stage2_early_stop: bool = True
    reset_optimizer_at_stage2: bool = False
    audit_sample_ids: bool = False


@dataclass
class AuditEntry:
    step: int
    stage: str
    ids: tuple[int, ...]


@dataclass
class TrainState:
    run_id: str
    mode: str
    model: SceneModel
    extractor_opt: Optimizer
    head_opt: Optimizer
    stage: str = STAGE1
    epoch: int = 0
    steps: int = 0
    stage1_steps: int = 0
    stage2_steps: int = 0
    transition_epoch: int | None = None
    records: list[EpochRecord | TransitionRecord] = field(default_factory=list)
    audit: list[AuditEntry] = field(default_factory=list)
    audit_enabled: bool = False


def init_train_state(run_id: str, mode: str, model: SceneModel, settings: TrainSettings) -> TrainState:
    return TrainState(
        run_id=run_id,
        mode=mode,
        model=model,
        extractor_opt=make_optimizer(settings.optimizer, settings.learning_rate),
        head_opt=make_optimizer(settings.optimizer, settings.learning_rate),
    )


def stratified_holdout(
    ids: list[int],
    scene_of: dict[int, int],
    fraction: float,
    rng: np.random.Generator,
) -> tuple[list[int], list[int]]:
    """Split ids into (held_out, pool) with per-scene largest-remainder quotas.

    The holdout gets ``floor(fraction * N)`` ids (at least 1, never the
    whole pool); both outputs are sorted for determinism.
    """
    n = len(ids)
    if n < 2:
        raise ValueError("need at least 2 ids to hold out a validation set")
    total = min(max(1, math.floor(fraction * n)), n - 1)

    by_scene: dict[int, list[int]] = {}
    for i in ids:
        by_scene.setdefault(scene_of[i], []).append(i)
    scenes = sorted(by_scene)
    quotas = {s: math.floor(fraction * len(by_scene[s])) for s in scenes}
    remainders = sorted(
        scenes,
        key=lambda s: (-(fraction * len(by_scene[s]) - quotas[s]), s),
    )
    shortfall = total - sum(quotas.values())
    for s in remainders:
        if shortfall <= 0:
            break
        if quotas[s] < len(by_scene[s]):
            quotas[s] += 1
            shortfall -= 1
    # Over-allocation can only happen via the min(total, n-1) clamp.
    for s in reversed(remainders):
        if sum(quotas.values()) <= total:
            break
        if quotas[s] > 0:
            quotas[s] -= 1

    held: list[int] = []
    for s in scenes:
        pool = sorted(by_scene[s])
        picked = rng.permutation(len(pool))[: quotas[s]]
        held.extend(pool[i] for i in picked)
    held_set = set(held)
    return sorted(held), sorted(i for i in ids if i not in held_set)


class _BatchData:
    """Row-indexed view of a dataset for id-keyed batch assembly."""

    def __init__(self, dataset: Dataset):
        self.x = dataset.feature_matrix()
        self.y = dataset.scene_labels()
        self.row_of = {s.id: i for i, s in enumerate(dataset.samples)}

    def batch(self, ids) -> tuple[np.ndarray, np.ndarray]:
        rows = [self.row_of[int(i)] for i in ids]
        return self.x[rows], self.y[rows]

    def loss_of(self, model: SceneModel, ids: list[int]) -> float:
        x, y = self.batch(ids)
        return model.loss(x, y)


def _check_partition_matches(partition: CurriculumPartition, dataset: Dataset) -> None:
    if partition.all_ids() != set(dataset.ids()):
        raise ValueError("partition ids do not match dataset ids")


def _train_epoch(
    state: TrainState,
    data: _BatchData,
    draw_batch,
    steps: int,
    stage: str | None,
) -> float:
    losses = []
    for _ in range(steps):
        ids = draw_batch()
        x, y = data.batch(ids)
        loss = state.model.train_step(x, y, state.extractor_opt, state.head_opt)
        state.steps += 1
        losses.append(loss)
        if state.audit_enabled:
            state.audit.append(
                AuditEntry(step=state.steps, stage=stage or "-", ids=tuple(int(i) for i in ids))
            )
    return float(np.mean(losses))


def run_stage1(
    state: TrainState,
    partition: CurriculumPartition,
    dataset: Dataset,
    settings: TrainSettings,
    scope: SeedScope,
) -> TrainState:
    """Train on the invariant subset until the plateau fires or the cap hits."""
    if state.stage != STAGE1:
        raise RuntimeError(f"stage1 requested but trainer is in stage {state.stage!r}")
    _check_partition_matches(partition, dataset)
    state.audit_enabled = settings.audit_sample_ids

    data = _BatchData(dataset)
    scene_of = {s.id: s.scene for s in dataset.samples}
    val_ids, pool = stratified_holdout(
        partition.invariant_ids, scene_of, settings.val_fraction,
        scope.rng(STREAM_VAL_SPLIT, CTX_VAL_INV),
    )
    if len(pool) < settings.batch_size:
        raise ValueError(
            f"invariant training pool ({len(pool)}) is smaller than one batch "
            f"({settings.batch_size}); use a smaller batch size"
        )
    sampler = CyclicSampler(pool, scope.rng(STREAM_SHUFFLE, CTX_STAGE1))
    steps_per_epoch = math.ceil(len(pool) / settings.batch_size)
    plateau = PlateauDetector(settings.patience, settings.min_relative_improvement)

    start_steps = state.steps
    for _ in range(settings.stage1_max_epochs):
        train_loss = _train_epoch(
            state, data, lambda: sampler.draw(settings.batch_size), steps_per_epoch, STAGE1
        )
        val_loss = data.loss_of(state.model, val_ids)
        state.epoch += 1
        state.records.append(
            EpochRecord(
                run_id=state.run_id,
                mode=state.mode,
                stage=STAGE1,
                epoch=state.epoch,
                steps=state.steps,
                train_loss=train_loss,
                val_loss=val_loss,
                rng_hash=rng_state_hash(sampler.rng),
            )
        )
        if plateau.update(val_loss):
            break

    state.stage1_steps = state.steps - start_steps
    state.stage = STAGE2
    state.transition_epoch = state.epoch
    state.records.append(
        TransitionRecord(run_id=state.run_id, epoch=state.epoch, steps=state.steps)
    )
    return state


def run_stage2(
    state: TrainState,
    partition: CurriculumPartition,
    dataset: Dataset,
    settings: TrainSettings,
    scope: SeedScope,
) -> TrainState:
    """Mixed fixed-ratio batches; optimizer state carries over from Stage 1."""
    if state.stage != STAGE2:
        raise RuntimeError(f"stage2 requested but trainer is in stage {state.stage!r}")
    _check_partition_matches(partition, dataset)
    if not partition.specific_ids:
        raise ValueError("specific subset is empty; nothing to mix into stage 2 batches")
    if settings.stage2_epochs == 0:
        state.stage = DONE
        return state
    state.audit_enabled = settings.audit_sample_ids

    data = _BatchData(dataset)
    scene_of = {s.id: s.scene for s in dataset.samples}
    # Same derived stream as stage 1, so the invariant holdout is identical
    # even when the stages run in separate processes.
    inv_val, inv_pool = stratified_holdout(
        partition.invariant_ids, scene_of, settings.val_fraction,
        scope.rng(STREAM_VAL_SPLIT, CTX_VAL_INV),
    )
    spec_val, spec_pool = stratified_holdout(
        partition.specific_ids, scene_of, settings.val_fraction,
        scope.rng(STREAM_VAL_SPLIT, CTX_VAL_SPEC),
    )
    val_ids = sorted(inv_val + spec_val)

    plan = BatchPlan.from_batch_size(settings.batch_size, settings.invariant_ratio)
    inv_sampler = CyclicSampler(inv_pool, scope.rng(STREAM_SHUFFLE, CTX_STAGE2_INV))
    spec_sampler = CyclicSampler(spec_pool, scope.rng(STREAM_SHUFFLE, CTX_STAGE2_SPEC))
    if plan.n_invariant > 0:
        steps_per_epoch = math.ceil(len(inv_pool) / plan.n_invariant)
        hash_rng = inv_sampler.rng
    else:
        steps_per_epoch = math.ceil(len(spec_pool) / plan.n_specific)
        hash_rng = spec_sampler.rng

    if settings.reset_optimizer_at_stage2:
        state.extractor_opt = make_optimizer(settings.optimizer, settings.learning_rate)
        state.head_opt = make_optimizer(settings.optimizer, settings.learning_rate)

    def draw_mixed() -> np.ndarray:
        return np.concatenate(
            [inv_sampler.draw(plan.n_invariant), spec_sampler.draw(plan.n_specific)]
        )

    plateau = PlateauDetector(settings.patience, settings.min_relative_improvement)
    start_steps = state.steps
    for _ in range(settings.stage2_epochs):
        train_loss = _train_epoch(state, data, draw_mixed, steps_per_epoch, STAGE2)
        val_loss = data.loss_of(state.model, val_ids)
        state.epoch += 1
        state.records.append(
            EpochRecord(
                run_id=state.run_id,
                mode=state.mode,
                stage=STAGE2,
                epoch=state.epoch,
                steps=state.steps,
                train_loss=train_loss,
                val_loss=val_loss,
                rng_hash=rng_state_hash(hash_rng),
            )
        )
        if settings.stage2_early_stop and plateau.update(val_loss):
            break

    state.stage2_steps = state.steps - start_steps
    state.stage = DONE
    return state


def run_curriculum(
    dataset: Dataset,
    partition: CurriculumPartition,
    settings: TrainSettings,
    scope: SeedScope,
    model: SceneModel,
    run_id: str = "curriculum",
) -> TrainState:
    state = init_train_state(run_id, "curriculum", model, settings)
    run_stage1(state, partition, dataset, settings, scope)
    run_stage2(state, partition, dataset, settings, scope)
    return state


def run_baseline(
    dataset: Dataset,
    settings: TrainSettings,
    scope: SeedScope,
    model: SceneModel,
    target_steps: int,
    run_id: str = "baseline",
) -> TrainState:
    """Uniformly shuffled batches over the whole subset for an exact step budget."""
    if target_steps < 1:
        raise ValueError("target_steps must be at least 1")
    state = init_train_state(run_id, "baseline", model, settings)
    state.audit_enabled = settings.audit_sample_ids

    data = _BatchData(dataset)
    scene_of = {s.id: s.scene for s in dataset.samples}
    val_ids, pool = stratified_holdout(
        dataset.ids(), scene_of, settings.val_fraction,
        scope.rng(STREAM_VAL_SPLIT, CTX_VAL_FULL),
    )
    if len(pool) < settings.batch_size:
        raise ValueError(
            f"training pool ({len(pool)}) is smaller than one batch "
            f"({settings.batch_size}); use a smaller batch size"
        )
    sampler = CyclicSampler(pool, scope.rng(STREAM_SHUFFLE, CTX_BASELINE))
    steps_per_epoch = math.ceil(len(pool) / settings.batch_size)

    while state.steps < target_steps:
        steps_now = min(steps_per_epoch, target_steps - state.steps)
        train_loss = _train_epoch(
            state, data, lambda: sampler.draw(settings.batch_size), steps_now, None
        )
        val_loss = data.loss_of(state.model, val_ids)
        state.epoch += 1
        state.records.append(
            EpochRecord(
                run_id=state.run_id,
                mode=state.mode,
                stage=None,
                epoch=state.epoch,
                steps=state.steps,
                train_loss=train_loss,
                val_loss=val_loss,
                rng_hash=rng_state_hash(sampler.rng),
            )
        )
    state.stage = DONE
    return state


def write_audit_log(state: TrainState, path: str | Path) -> None:
    lines = [f"{e.step} {e.stage} {','.join(str(i) for i in e.ids)}" for e in state.audit]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def read_audit_log(path: str | Path) -> list[AuditEntry]:
    entries = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        step, stage, ids = line.split()
        entries.append(
            AuditEntry(step=int(step), stage=stage, ids=tuple(int(i) for i in ids.split(",")))
        )
    return entries
