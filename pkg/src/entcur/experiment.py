"""End-to-end pipeline: generate, score, train, evaluate, compare.

These handlers hold the business logic behind every command.  The CLI
and the HTTP service are both thin wrappers over them, so results do
not depend on which front end invoked a run.

Seed discipline for a comparison cell (fraction, run index): one
``SeedScope`` derives every stream.  The subset draw deliberately
ignores the fraction so the subsets of one run index are nested across
fractions.  Paired baseline/curriculum runs share the model-init stream
and therefore start from identical parameters; the baseline receives
the curriculum's realized step count as its exact budget.
"""

from __future__ import annotations

import hashlib
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable

import numpy as np

from .config import RunConfig
from .data.generate import generate
from .data.io import load_dataset, save_dataset
from .data.subsets import subset
from .data.types import Dataset
from .evaluation.metrics import EvalReport, evaluate
from .evaluation.tables import RunResult, write_curve, write_results, write_table
from .nn.model import SceneModel, load_model, save_model
from .probe.partition import CurriculumPartition, build_partition, load_partition, save_partition
from .probe.train import train_domain_classifier, warm_up_scene_model
from .probe.scoring import score_dataset
from .seeding import (
    STREAM_MODEL_INIT,
    STREAM_PROBE_INIT,
    STREAM_PROBE_SHUFFLE,
    STREAM_SUBSET,
    STREAM_WARMUP_INIT,
    STREAM_WARMUP_SHUFFLE,
    SeedScope,
    derive_int_seed,
)
from .training.loop import TrainState, run_baseline, run_curriculum, write_audit_log
from .training.metrics import write_metrics_log

MANIFEST_HEADER = "entcur-manifest v1"
REPORT_HEADER = "entcur-report v1"

Progress = Callable[[str], None] | None


def _say(progress: Progress, message: str) -> None:
    if progress is not None:
        progress(message)


def fraction_key(fraction: float) -> int:
    return round(fraction * 100)


def scope_for(config: RunConfig, fraction: float = 1.0, run_index: int = 0) -> SeedScope:
    return SeedScope(config.seed, fraction_key(fraction), run_index)


def build_scene_model(config: RunConfig, train: Dataset, rng) -> SceneModel:
    return SceneModel.build(
        input_dim=train.samples[0].features.size,
        hidden_dims=config.network.hidden_dims,
        feature_dim=config.network.feature_dim,
        n_classes=train.n_scenes,
        rng=rng,
    )


def _refuse_existing(paths: list[Path], force: bool) -> None:
    existing = [p for p in paths if p.exists()]
    if existing and not force:
        raise FileExistsError(
            f"refusing to overwrite {existing[0]}; pass force to replace existing outputs"
        )


def score_training_set(
    config: RunConfig, train: Dataset, scope: SeedScope
) -> tuple[CurriculumPartition, float]:
    """Phase 1: warm-up, freeze features, train the device probe, partition.

    The probe predicts over the devices seen in training (labels are
    remapped to a dense range); the split itself is rank-based, so the
    posterior dimension only affects the entropy scale, not membership.
    """
    x = train.feature_matrix()
    model = build_scene_model(config, train, scope.rng(STREAM_WARMUP_INIT))
    if config.probe.feature_source == "warmup" and config.probe.warm_up_epochs > 0:
        model = warm_up_scene_model(
            model,
            x,
            train.scene_labels(),
            optimizer=config.training.optimizer,
            learning_rate=config.training.learning_rate,
            batch_size=config.training.batch_size,
            epochs=config.probe.warm_up_epochs,
            shuffle_rng=scope.rng(STREAM_WARMUP_SHUFFLE),
        )

    probe_index = {d: i for i, d in enumerate(sorted(train.seen_devices))}
    probe_labels = np.array([probe_index[s.device] for s in train.samples], dtype=np.int64)
    head, probe_accuracy = train_domain_classifier(
        model.features(x),
        probe_labels,
        len(probe_index),
        config.probe.to_settings(),
        init_rng=scope.rng(STREAM_PROBE_INIT),
        shuffle_rng=scope.rng(STREAM_PROBE_SHUFFLE),
    )
    scores = score_dataset(model.extractor, head, train)
    return build_partition(scores, n_devices=len(probe_index)), probe_accuracy


def _entropy_summary(partition: CurriculumPartition) -> dict:
    values = [s.value for s in partition.scores]
    return {
        "min": min(values),
        "median": float(statistics.median(values)),
        "max": max(values),
    }


def report_to_dict(report: EvalReport) -> dict:
    return {
        "format": REPORT_HEADER,
        "overall_classwise_acc": report.overall_classwise_acc,
        "per_class_acc": [float(v) for v in report.per_class_acc],
        "per_device_acc": [None if math.isnan(v) else float(v) for v in report.per_device_acc],
        "seen_acc": report.seen_acc,
        "unseen_acc": report.unseen_acc,
        "confusion": report.confusion.tolist(),
        "n_evaluated": report.n_evaluated,
    }


def file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# Command handlers


def cmd_gen_data(config: RunConfig, out_dir: str | Path, force: bool = False) -> dict:
    """Generate the benchmark and write train/test files under out_dir."""
    out = Path(out_dir)
    train_path, test_path = out / "train.txt", out / "test.txt"
    _refuse_existing([train_path, test_path], force)
    out.mkdir(parents=True, exist_ok=True)
    train, test = generate(config.generator)
    save_dataset(train, train_path)
    save_dataset(test, test_path)
    return {
        "train_path": str(train_path),
        "test_path": str(test_path),
        "n_train": len(train.samples),
        "n_test": len(test.samples),
        "train_device_counts": {str(k): v for k, v in sorted(train.device_counts().items())},
        "test_device_counts": {str(k): v for k, v in sorted(test.device_counts().items())},
        "seen_devices": list(train.seen_devices),
        "unseen_devices": list(test.unseen_devices),
    }


def cmd_score(
    config: RunConfig, dataset_path: str | Path, out_path: str | Path, force: bool = False
) -> dict:
    """Phase 1 over a dataset file; writes the score/partition file."""
    out = Path(out_path)
    _refuse_existing([out], force)
    train = load_dataset(dataset_path)
    partition, probe_accuracy = score_training_set(config, train, scope_for(config))
    out.parent.mkdir(parents=True, exist_ok=True)
    save_partition(partition, out)
    return {
        "partition_path": str(out),
        "n": partition.n,
        "n_invariant": len(partition.invariant_ids),
        "n_specific": len(partition.specific_ids),
        "probe_accuracy": probe_accuracy,
        "entropy": _entropy_summary(partition),
    }


def _default_baseline_budget(n: int, settings) -> int:
    """Curriculum's maximum epoch budget expressed in steps on this pool."""
    holdout = min(max(1, math.floor(settings.val_fraction * n)), n - 1)
    steps_per_epoch = math.ceil((n - holdout) / settings.batch_size)
    return (settings.stage1_max_epochs + settings.stage2_epochs) * steps_per_epoch


def cmd_train(
    config: RunConfig,
    dataset_path: str | Path,
    partition_path: str | Path,
    mode: str,
    out_prefix: str | Path,
    force: bool = False,
    run_index: int = 0,
    target_steps: int | None = None,
) -> dict:
    """Train one run (curriculum or baseline) from files; writes log + model."""
    if mode not in ("curriculum", "baseline"):
        raise ValueError(f"unknown mode {mode!r}; expected 'curriculum' or 'baseline'")
    prefix = Path(out_prefix)
    metrics_path = prefix.with_name(prefix.name + ".metrics.jsonl")
    model_path = prefix.with_name(prefix.name + ".model.json")
    audit_path = prefix.with_name(prefix.name + ".audit.txt")
    targets = [metrics_path, model_path]
    if config.training.audit_sample_ids:
        targets.append(audit_path)
    _refuse_existing(targets, force)

    train = load_dataset(dataset_path)
    settings = config.training.to_settings()
    scope = scope_for(config, run_index=run_index)
    model = build_scene_model(config, train, scope.rng(STREAM_MODEL_INIT))
    run_id = f"{mode}-s{run_index:02d}"

    if mode == "curriculum":
        partition = load_partition(partition_path)
        state = run_curriculum(train, partition, settings, scope, model, run_id)
    else:
        budget = target_steps or _default_baseline_budget(len(train.samples), settings)
        state = run_baseline(train, settings, scope, model, budget, run_id)

    prefix.parent.mkdir(parents=True, exist_ok=True)
    write_metrics_log(state.records, metrics_path)
    save_model(state.model, model_path)
    result = {
        "mode": mode,
        "run_id": run_id,
        "steps": state.steps,
        "epochs": state.epoch,
        "metrics_path": str(metrics_path),
        "model_path": str(model_path),
    }
    if mode == "curriculum":
        result["transition_epoch"] = state.transition_epoch
        result["stage1_steps"] = state.stage1_steps
        result["stage2_steps"] = state.stage2_steps
    if config.training.audit_sample_ids:
        write_audit_log(state, audit_path)
        result["audit_path"] = str(audit_path)
    return result


def cmd_evaluate(
    config: RunConfig,
    dataset_path: str | Path,
    model_path: str | Path,
    out_path: str | Path | None = None,
    force: bool = False,
) -> dict:
    """Evaluate a saved model on a dataset file; optionally writes the report."""
    test = load_dataset(dataset_path)
    model = load_model(model_path)
    report = report_to_dict(evaluate(model, test))
    if out_path is not None:
        out = Path(out_path)
        _refuse_existing([out], force)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(json.dumps(report, indent=2) + "\n")
        report["report_path"] = str(out)
    return report


# ---------------------------------------------------------------------------
# Paired comparison grid


def run_paired_cell(
    config: RunConfig,
    full_train: Dataset,
    test: Dataset,
    fraction: float,
    run_index: int,
    cell_dir: str | Path | None = None,
) -> dict:
    """One grid cell: subset, score, paired training, shared-test evaluation."""
    scope = SeedScope(config.seed, fraction_key(fraction), run_index)
    # Fraction-free subset seed: one run index draws nested subsets.
    sub = subset(full_train, fraction, derive_int_seed(config.seed, STREAM_SUBSET, run_index))
    partition, probe_accuracy = score_training_set(config, sub, scope)

    settings = config.training.to_settings()
    base = build_scene_model(config, sub, scope.rng(STREAM_MODEL_INIT))
    tag = f"f{fraction_key(fraction):03d}-s{run_index:02d}"
    cur = run_curriculum(sub, partition, settings, scope, base.copy(), f"{tag}-curriculum")
    bas = run_baseline(sub, settings, scope, base.copy(), cur.steps, f"{tag}-baseline")

    def to_result(state: TrainState, system: str) -> RunResult:
        report = evaluate(state.model, test)
        return RunResult(
            fraction=fraction,
            system=system,
            seed=run_index,
            overall=report.overall_classwise_acc,
            seen=report.seen_acc,
            unseen=report.unseen_acc,
        )

    out = {
        "fraction": fraction,
        "run_index": run_index,
        "probe_accuracy": probe_accuracy,
        "target_steps": cur.steps,
        "transition_epoch": cur.transition_epoch,
        "curriculum": to_result(cur, "curriculum"),
        "baseline": to_result(bas, "baseline"),
        "files": [],
    }
    if cell_dir is not None:
        cell = Path(cell_dir)
        cell.mkdir(parents=True, exist_ok=True)
        save_partition(partition, cell / "partition.txt")
        for state, name in ((cur, "curriculum"), (bas, "baseline")):
            write_metrics_log(state.records, cell / f"{name}.metrics.jsonl")
            save_model(state.model, cell / f"{name}.model.json")
            if settings.audit_sample_ids:
                write_audit_log(state, cell / f"{name}.audit.txt")
        out["files"] = sorted(str(p) for p in cell.iterdir())
    return out


def _cell_worker(
    config_json: str,
    fraction: float,
    run_index: int,
    cell_dir: str,
    train_path: str,
    test_path: str,
) -> dict:
    config = RunConfig.model_validate_json(config_json)
    full_train = load_dataset(train_path)
    test = load_dataset(test_path)
    return run_paired_cell(config, full_train, test, fraction, run_index, cell_dir)


def _write_partial(results: list[RunResult], out: Path) -> None:
    if results:
        write_results(results, out / "results.partial.csv")


def cmd_compare(
    config: RunConfig, out_dir: str | Path, force: bool = False, progress: Progress = None
) -> dict:
    """Full grid: every (fraction, run index) cell in both systems, aggregated.

    Writes, under out_dir: the config copy, data files, per-cell
    artifacts, the per-run results file, the text table, the curve data,
    and a manifest hashing every produced file.
    """
    out = Path(out_dir)
    if out.exists() and any(out.iterdir()) and not force:
        raise FileExistsError(
            f"refusing to write into non-empty {out}; pass force to replace existing outputs"
        )
    (out / "data").mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(config.to_json())
    _say(progress, "generating benchmark data")
    train, test = generate(config.generator)
    train_path, test_path = out / "data" / "train.txt", out / "data" / "test.txt"
    save_dataset(train, train_path)
    save_dataset(test, test_path)

    cells = [(f, s) for f in config.fractions for s in range(config.n_seeds)]
    cell_dirs = {
        (f, s): out / "cells" / f"f{fraction_key(f):03d}_s{s:02d}" for f, s in cells
    }
    outcomes: dict[tuple[float, int], dict] = {}
    results: list[RunResult] = []

    def absorb(key: tuple[float, int], outcome: dict) -> None:
        outcomes[key] = outcome
        results.append(outcome["baseline"])
        results.append(outcome["curriculum"])
        _say(
            progress,
            f"cell fraction={key[0]:g} seed={key[1]}: "
            f"baseline overall={outcome['baseline'].overall:.4f} "
            f"curriculum overall={outcome['curriculum'].overall:.4f}",
        )

    if config.jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=min(config.jobs, len(cells))) as pool:
            futures = {
                (f, s): pool.submit(
                    _cell_worker,
                    config.to_json(),
                    f,
                    s,
                    str(cell_dirs[(f, s)]),
                    str(train_path),
                    str(test_path),
                )
                for f, s in cells
            }
            for key, future in futures.items():
                try:
                    absorb(key, future.result())
                except Exception as exc:
                    _write_partial(results, out)
                    raise RuntimeError(
                        f"sub-run fraction={key[0]:g} seed={key[1]} failed: {exc}"
                    ) from exc
    else:
        for key in cells:
            try:
                absorb(key, run_paired_cell(config, train, test, *key, cell_dirs[key]))
            except Exception as exc:
                _write_partial(results, out)
                raise RuntimeError(
                    f"sub-run fraction={key[0]:g} seed={key[1]} failed: {exc}"
                ) from exc

    results.sort(key=lambda r: (r.fraction, r.system, r.seed))
    write_results(results, out / "results.csv")
    write_table(results, out / "table.txt")
    write_curve(results, out / "curve.txt")

    runs = [
        {
            "fraction": f,
            "seed": s,
            "system": system,
            "metrics": str((cell_dirs[(f, s)] / f"{system}.metrics.jsonl").relative_to(out)),
            "checkpoint": str((cell_dirs[(f, s)] / f"{system}.model.json").relative_to(out)),
            "target_steps": outcomes[(f, s)]["target_steps"],
        }
        for f, s in cells
        for system in ("baseline", "curriculum")
    ]
    tracked = sorted(
        str(p.relative_to(out))
        for p in out.rglob("*")
        if p.is_file() and p.name != "manifest.json"
    )
    manifest = {
        "format": MANIFEST_HEADER,
        "seed": config.seed,
        "fractions": config.fractions,
        "n_seeds": config.n_seeds,
        "runs": runs,
        "files": {rel: file_sha256(out / rel) for rel in tracked},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return {
        "out_dir": str(out),
        "n_runs": len(runs),
        "results_path": str(out / "results.csv"),
        "table_path": str(out / "table.txt"),
        "curve_path": str(out / "curve.txt"),
        "manifest_path": str(out / "manifest.json"),
    }
