"""Two-stage trainer, baseline trainer, holdout splitting and run logs."""

import numpy as np
import pytest

from entcur.config import RunConfig
from entcur.experiment import build_scene_model, scope_for, score_training_set
from entcur.nn.model import SceneModel
from entcur.probe.partition import build_partition
from entcur.probe.scoring import EntropyScore
from entcur.seeding import CTX_VAL_INV, STREAM_MODEL_INIT, STREAM_VAL_SPLIT, SeedScope
from entcur.training.loop import (
    DONE,
    STAGE1,
    STAGE2,
    TrainSettings,
    init_train_state,
    read_audit_log,
    run_baseline,
    run_curriculum,
    run_stage1,
    run_stage2,
    stratified_holdout,
    write_audit_log,
)
from entcur.training.metrics import (
    EpochRecord,
    TransitionRecord,
    read_metrics_log,
    write_metrics_log,
)


def fake_partition(dataset, seed=130):
    """Partition the dataset on synthetic scores; the trainer only needs ids."""
    rng = np.random.default_rng(seed)
    scores = [
        EntropyScore(sample_id=i, value=float(v))
        for i, v in zip(dataset.ids(), rng.random(len(dataset)))
    ]
    return build_partition(scores, n_devices=dataset.n_devices)


def tiny_model(dataset, seed=131):
    return SceneModel.build(
        dataset.n_bins, [24], 8, dataset.n_scenes, np.random.default_rng(seed)
    )


def fast_settings(**overrides):
    fields = dict(
        batch_size=16, stage1_max_epochs=3, stage2_epochs=2,
        patience=2, audit_sample_ids=True,
    )
    fields.update(overrides)
    return TrainSettings(**fields)


class TestStratifiedHoldout:
    def test_sizes(self):
        ids = list(range(100))
        scene_of = {i: i % 4 for i in ids}
        held, pool = stratified_holdout(ids, scene_of, 0.1, np.random.default_rng(132))
        assert len(held) == 10
        assert len(pool) == 90

    def test_always_holds_at_least_one(self):
        ids = list(range(10))
        scene_of = {i: 0 for i in ids}
        held, pool = stratified_holdout(ids, scene_of, 0.01, np.random.default_rng(133))
        assert len(held) == 1

    def test_never_holds_everything(self):
        ids = [3, 8, 11, 19]
        scene_of = {i: 0 for i in ids}
        held, pool = stratified_holdout(ids, scene_of, 1.0, np.random.default_rng(134))
        assert len(held) == 3
        assert len(pool) == 1

    def test_stratified_by_scene(self):
        """Scenes sized 40/40/20 at fraction 0.1 give quotas 4/4/2."""
        ids = list(range(100))
        scene_of = {i: (0 if i < 40 else 1 if i < 80 else 2) for i in ids}
        held, _ = stratified_holdout(ids, scene_of, 0.1, np.random.default_rng(135))
        per_scene = {s: sum(1 for i in held if scene_of[i] == s) for s in (0, 1, 2)}
        assert per_scene == {0: 4, 1: 4, 2: 2}

    def test_outputs_sorted_disjoint_and_cover(self):
        ids = list(range(0, 120, 2))
        scene_of = {i: i % 3 for i in ids}
        held, pool = stratified_holdout(ids, scene_of, 0.25, np.random.default_rng(136))
        assert held == sorted(held)
        assert pool == sorted(pool)
        assert set(held) & set(pool) == set()
        assert set(held) | set(pool) == set(ids)

    def test_deterministic_per_rng_seed(self):
        ids = list(range(60))
        scene_of = {i: i % 5 for i in ids}
        a = stratified_holdout(ids, scene_of, 0.1, np.random.default_rng(137))
        b = stratified_holdout(ids, scene_of, 0.1, np.random.default_rng(137))
        assert a == b

    def test_too_few_ids_rejected(self):
        with pytest.raises(ValueError, match="at least 2 ids"):
            stratified_holdout([7], {7: 0}, 0.1, np.random.default_rng(138))


class TestStage1:
    def test_no_specific_ids_before_transition(self, tiny_benchmark):
        """The per-step audit shows only invariant-subset ids in Stage 1."""
        train, _ = tiny_benchmark
        partition = fake_partition(train)
        settings = fast_settings()
        state = init_train_state("s1", "curriculum", tiny_model(train), settings)
        run_stage1(state, partition, train, settings, SeedScope(900))
        specific = set(partition.specific_ids)
        assert state.audit
        for entry in state.audit:
            assert entry.stage == STAGE1
            assert not (set(entry.ids) & specific)

    def test_same_seed_identical_losses(self, tiny_benchmark):
        train, _ = tiny_benchmark
        partition = fake_partition(train)
        settings = fast_settings(audit_sample_ids=False)
        histories = []
        for _ in range(2):
            state = init_train_state("s1", "curriculum", tiny_model(train), settings)
            run_stage1(state, partition, train, settings, SeedScope(901))
            histories.append(
                [(r.train_loss, r.val_loss) for r in state.records
                 if isinstance(r, EpochRecord)]
            )
        assert histories[0] == histories[1]

    def test_exactly_one_transition_record(self, tiny_benchmark):
        train, _ = tiny_benchmark
        partition = fake_partition(train)
        settings = fast_settings(audit_sample_ids=False)
        state = init_train_state("s1", "curriculum", tiny_model(train), settings)
        run_stage1(state, partition, train, settings, SeedScope(902))
        transitions = [r for r in state.records if isinstance(r, TransitionRecord)]
        assert len(transitions) == 1
        assert state.stage == STAGE2
        assert state.transition_epoch == state.epoch
        assert transitions[0].steps == state.stage1_steps

    def test_epoch_cap_respected(self, tiny_benchmark):
        train, _ = tiny_benchmark
        partition = fake_partition(train)
        settings = fast_settings(audit_sample_ids=False, stage1_max_epochs=2, patience=50)
        state = init_train_state("s1", "curriculum", tiny_model(train), settings)
        run_stage1(state, partition, train, settings, SeedScope(903))
        assert state.epoch == 2

    def test_pool_smaller_than_batch_rejected(self, tiny_benchmark):
        train, _ = tiny_benchmark
        partition = fake_partition(train)
        settings = fast_settings(batch_size=200)
        state = init_train_state("s1", "curriculum", tiny_model(train), settings)
        with pytest.raises(ValueError, match="smaller batch size"):
            run_stage1(state, partition, train, settings, SeedScope(904))

    def test_wrong_stage_rejected(self, tiny_benchmark):
        train, _ = tiny_benchmark
        partition = fake_partition(train)
        settings = fast_settings()
        state = init_train_state("s1", "curriculum", tiny_model(train), settings)
        state.stage = DONE
        with pytest.raises(RuntimeError, match="stage1 requested"):
            run_stage1(state, partition, train, settings, SeedScope(905))

    def test_partition_dataset_mismatch_rejected(self, tiny_benchmark):
        train, _ = tiny_benchmark
        rng = np.random.default_rng(139)
        wrong = build_partition(
            [EntropyScore(sample_id=10_000 + i, value=float(v))
             for i, v in enumerate(rng.random(40))]
        )
        settings = fast_settings()
        state = init_train_state("s1", "curriculum", tiny_model(train), settings)
        with pytest.raises(ValueError, match="do not match"):
            run_stage1(state, partition=wrong, dataset=train, settings=settings,
                       scope=SeedScope(906))


class TestStage2:
    def run_both(self, train, settings, scope):
        partition = fake_partition(train)
        state = run_curriculum(train, partition, settings, scope, tiny_model(train))
        return partition, state

    def test_every_mixed_batch_has_exact_composition(self, tiny_benchmark):
        """Every Stage 2 batch of 16 holds exactly 12 invariant and 4
        specific ids, straight from the audit log."""
        train, _ = tiny_benchmark
        partition, state = self.run_both(train, fast_settings(), SeedScope(907))
        invariant = set(partition.invariant_ids)
        stage2_entries = [e for e in state.audit if e.stage == STAGE2]
        assert stage2_entries
        for entry in stage2_entries:
            assert len(entry.ids) == 16
            n_inv = sum(1 for i in entry.ids if i in invariant)
            assert n_inv == 12
            assert len(entry.ids) - n_inv == 4

    def test_stage_ordering_in_audit(self, tiny_benchmark):
        """Audit steps are contiguous and no stage2 entry precedes the
        transition step."""
        train, _ = tiny_benchmark
        partition, state = self.run_both(train, fast_settings(), SeedScope(908))
        transition = next(r for r in state.records if isinstance(r, TransitionRecord))
        assert [e.step for e in state.audit] == list(range(1, state.steps + 1))
        for entry in state.audit:
            if entry.step <= transition.steps:
                assert entry.stage == STAGE1
            else:
                assert entry.stage == STAGE2

    def test_zero_stage2_epochs_changes_nothing_but_stage(self, tiny_benchmark):
        train, _ = tiny_benchmark
        partition = fake_partition(train)
        settings = fast_settings(audit_sample_ids=False, stage2_epochs=0)
        state = init_train_state("s2", "curriculum", tiny_model(train), settings)
        run_stage1(state, partition, train, settings, SeedScope(909))
        steps_before = state.steps
        records_before = len(state.records)
        run_stage2(state, partition, train, settings, SeedScope(909))
        assert state.stage == DONE
        assert state.steps == steps_before
        assert len(state.records) == records_before

    def test_empty_specific_subset_rejected(self, tiny_benchmark):
        train, _ = tiny_benchmark
        real = fake_partition(train)
        degenerate = build_partition(real.scores, n_devices=train.n_devices)
        degenerate.invariant_ids = real.invariant_ids + real.specific_ids
        degenerate.specific_ids = []
        settings = fast_settings(audit_sample_ids=False)
        state = init_train_state("s2", "curriculum", tiny_model(train), settings)
        state.stage = STAGE2
        with pytest.raises(ValueError, match="nothing to mix"):
            run_stage2(state, degenerate, train, settings, SeedScope(910))

    def test_optimizer_state_carries_across_stages(self, tiny_benchmark):
        """By default the stage boundary is a data-schedule change only: the
        optimizer keeps counting from Stage 1."""
        train, _ = tiny_benchmark
        _, state = self.run_both(
            train, fast_settings(audit_sample_ids=False), SeedScope(911)
        )
        assert state.extractor_opt.step_count == state.steps
        assert state.head_opt.step_count == state.steps

    def test_optimizer_reset_flag(self, tiny_benchmark):
        train, _ = tiny_benchmark
        _, state = self.run_both(
            train,
            fast_settings(audit_sample_ids=False, reset_optimizer_at_stage2=True),
            SeedScope(912),
        )
        assert state.extractor_opt.step_count == state.stage2_steps

    def test_wrong_stage_rejected(self, tiny_benchmark):
        train, _ = tiny_benchmark
        partition = fake_partition(train)
        settings = fast_settings()
        state = init_train_state("s2", "curriculum", tiny_model(train), settings)
        with pytest.raises(RuntimeError, match="stage2 requested"):
            run_stage2(state, partition, train, settings, SeedScope(913))


class TestBaseline:
    def test_exact_step_budget_with_short_final_epoch(self, tiny_benchmark):
        """162 pool ids at batch 16 give 11-step epochs; a 37-step budget
        lands as 11+11+11+4."""
        train, _ = tiny_benchmark
        settings = fast_settings(audit_sample_ids=False)
        state = run_baseline(train, settings, SeedScope(914), tiny_model(train),
                             target_steps=37)
        assert state.steps == 37
        assert state.stage == DONE
        epoch_steps = [r.steps for r in state.records]
        assert epoch_steps == [11, 22, 33, 37]

    def test_records_carry_no_stage(self, tiny_benchmark):
        train, _ = tiny_benchmark
        settings = fast_settings(audit_sample_ids=False)
        state = run_baseline(train, settings, SeedScope(915), tiny_model(train),
                             target_steps=12)
        assert all(r.stage is None for r in state.records)

    def test_audit_marks_steps_stageless(self, tiny_benchmark):
        train, _ = tiny_benchmark
        settings = fast_settings()
        state = run_baseline(train, settings, SeedScope(916), tiny_model(train),
                             target_steps=5)
        assert [e.stage for e in state.audit] == ["-"] * 5

    def test_same_seed_identical_parameters(self, tiny_benchmark):
        train, _ = tiny_benchmark
        settings = fast_settings(audit_sample_ids=False)
        finals = []
        for _ in range(2):
            state = run_baseline(train, settings, SeedScope(917), tiny_model(train),
                                 target_steps=20)
            finals.append(
                [p.copy() for p in
                 state.model.extractor.parameters() + state.model.head.parameters()]
            )
        for a, b in zip(finals[0], finals[1]):
            np.testing.assert_array_equal(a, b)

    def test_zero_budget_rejected(self, tiny_benchmark):
        train, _ = tiny_benchmark
        with pytest.raises(ValueError, match="at least 1"):
            run_baseline(train, fast_settings(), SeedScope(918), tiny_model(train),
                         target_steps=0)


class TestRunLogs:
    def test_metrics_log_byte_identical_across_reruns(self, tiny_benchmark, tmp_path):
        train, _ = tiny_benchmark
        partition = fake_partition(train)
        settings = fast_settings(audit_sample_ids=False)
        paths = []
        for name in ("a", "b"):
            state = run_curriculum(train, partition, settings, SeedScope(919),
                                   tiny_model(train))
            path = tmp_path / f"{name}.jsonl"
            write_metrics_log(state.records, path)
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_metrics_log_round_trip_structure(self, tiny_benchmark, tmp_path):
        train, _ = tiny_benchmark
        partition = fake_partition(train)
        settings = fast_settings(audit_sample_ids=False)
        state = run_curriculum(train, partition, settings, SeedScope(920),
                               tiny_model(train))
        path = tmp_path / "log.jsonl"
        write_metrics_log(state.records, path)
        rows = read_metrics_log(path)
        assert len(rows) == len(state.records)
        transitions = [r for r in rows if r.get("event") == "transition"]
        assert len(transitions) == 1
        steps = [r["steps"] for r in rows if "train_loss" in r]
        assert steps == sorted(steps)
        stage1_rows = [r for r in rows if r.get("stage") == STAGE1]
        assert all("rng" in r and len(r["rng"]) == 12 for r in stage1_rows)

    def test_audit_log_round_trip(self, tiny_benchmark, tmp_path):
        train, _ = tiny_benchmark
        partition = fake_partition(train)
        settings = fast_settings()
        state = run_curriculum(train, partition, settings, SeedScope(921),
                               tiny_model(train))
        path = tmp_path / "audit.txt"
        write_audit_log(state, path)
        assert read_audit_log(path) == state.audit


class TestStage1LearnsPlantedTask:
    def test_validation_loss_drops_at_least_twenty_percent(self, default_benchmark):
        """On the shipped benchmark with default settings, Stage 1 cuts the
        invariant validation loss far below 80% of its starting value."""
        config = RunConfig()
        train, _ = default_benchmark
        scope = scope_for(config, 1.0, 0)
        partition, _ = score_training_set(config, train, scope)
        settings = config.training.to_settings()
        model = build_scene_model(config, train, scope.rng(STREAM_MODEL_INIT))

        scene_of = {s.id: s.scene for s in train.samples}
        val_ids, _ = stratified_holdout(
            partition.invariant_ids, scene_of, settings.val_fraction,
            scope.rng(STREAM_VAL_SPLIT, CTX_VAL_INV),
        )
        rows = {s.id: i for i, s in enumerate(train.samples)}
        picked = [rows[i] for i in val_ids]
        initial = model.loss(train.feature_matrix()[picked], train.scene_labels()[picked])

        state = init_train_state("drop", "curriculum", model, settings)
        run_stage1(state, partition, train, settings, scope)
        best = min(r.val_loss for r in state.records if isinstance(r, EpochRecord))
        assert (initial - best) / initial >= 0.20
