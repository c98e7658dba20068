"""Class-wise average accuracy, its decomposition, and model evaluation."""

import numpy as np
import pytest

from entcur.data.generate import GeneratorSpec, generate, scene_templates
from entcur.data.types import Dataset
from entcur.evaluation.metrics import (
    class_wise_accuracy,
    confusion_matrix,
    evaluate,
    report_from_predictions,
)
from entcur.nn.model import SceneModel
from entcur.nn.network import Network


class TestClassWiseAccuracy:
    def test_two_class_worked_example(self):
        """Class 0 gets 1 of 2 right, class 1 gets 2 of 2: (0.5 + 1.0)/2."""
        overall, per_class = class_wise_accuracy(
            np.array([0, 1, 1, 1]), np.array([0, 0, 1, 1]), 2
        )
        assert overall == 0.75
        np.testing.assert_array_equal(per_class, [0.5, 1.0])

    def test_all_correct(self):
        labels = np.array([0, 1, 2, 0, 1, 2])
        overall, per_class = class_wise_accuracy(labels, labels, 3)
        assert overall == 1.0
        np.testing.assert_array_equal(per_class, [1.0, 1.0, 1.0])

    def test_three_class_worked_example(self):
        """Per-class rates 3/4, 1/2, 0/4 average to 0.416667."""
        labels = np.array([0, 0, 0, 0, 1, 1, 2, 2, 2, 2])
        preds = np.array([0, 0, 0, 1, 1, 2, 0, 0, 1, 1])
        overall, _ = class_wise_accuracy(preds, labels, 3)
        assert abs(overall - 0.416666666666667) < 1e-9

    def test_empty_class_raises_named_error(self):
        with pytest.raises(ValueError, match="class 1 has no samples"):
            class_wise_accuracy(np.array([0, 0, 2, 2]), np.array([0, 0, 2, 2]), 3)

    def test_skew_cannot_hide_a_weak_class(self):
        """990 easy samples of class 0 and 10 all-wrong samples of class 1:
        plain accuracy is 0.99, class-wise drops to 0.5."""
        labels = np.concatenate([np.zeros(990, dtype=int), np.ones(10, dtype=int)])
        preds = np.zeros(1000, dtype=int)
        overall, _ = class_wise_accuracy(preds, labels, 2)
        assert overall == 0.5

    def test_balanced_sets_equal_plain_accuracy(self):
        """On label sets where every class has the same count, class-wise
        accuracy collapses to plain accuracy (1000 random cases)."""
        rng = np.random.default_rng(140)
        for _ in range(1000):
            n_classes = int(rng.integers(2, 8))
            per_class = int(rng.integers(1, 12))
            labels = np.repeat(np.arange(n_classes), per_class)
            rng.shuffle(labels)
            preds = rng.integers(0, n_classes, labels.size)
            overall, _ = class_wise_accuracy(preds, labels, n_classes)
            assert abs(overall - float(np.mean(preds == labels))) < 1e-12

    def test_relabeling_invariance(self):
        """Renaming classes by a permutation applied to both predictions and
        labels leaves the metric unchanged."""
        rng = np.random.default_rng(141)
        labels = rng.integers(0, 5, 200)
        labels[:5] = np.arange(5)
        preds = rng.integers(0, 5, 200)
        base, base_per_class = class_wise_accuracy(preds, labels, 5)
        for _ in range(10):
            perm = rng.permutation(5)
            mapped, mapped_per_class = class_wise_accuracy(perm[preds], perm[labels], 5)
            assert abs(mapped - base) < 1e-12
            np.testing.assert_allclose(np.sort(mapped_per_class), np.sort(base_per_class))

    def test_constant_predictor_scores_one_over_c(self):
        for c in (2, 5, 10):
            labels = np.repeat(np.arange(c), 7)
            overall, _ = class_wise_accuracy(np.zeros(labels.size, dtype=int), labels, c)
            assert abs(overall - 1.0 / c) < 1e-12

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="equal-length"):
            class_wise_accuracy(np.array([0, 1]), np.array([0, 1, 1]), 2)

    def test_out_of_range_labels_rejected(self):
        with pytest.raises(ValueError, match="outside"):
            class_wise_accuracy(np.array([0, 1]), np.array([0, 5]), 2)


class TestConfusionMatrix:
    def test_rows_sum_to_class_counts(self):
        rng = np.random.default_rng(142)
        labels = rng.integers(0, 4, 300)
        preds = rng.integers(0, 4, 300)
        m = confusion_matrix(preds, labels, 4)
        np.testing.assert_array_equal(m.sum(axis=1), np.bincount(labels, minlength=4))
        assert m.sum() == 300

    def test_diagonal_counts_hits(self):
        labels = np.array([0, 1, 1, 2])
        preds = np.array([0, 1, 0, 2])
        m = confusion_matrix(preds, labels, 3)
        np.testing.assert_array_equal(np.diag(m), [1, 1, 1])
        assert m[1, 0] == 1


class TestReport:
    def make_report(self, devices, seen=(0, 1), unseen=(2,)):
        labels = np.array([0, 0, 1, 1, 0, 1])
        preds = np.array([0, 1, 1, 1, 0, 0])
        return report_from_predictions(
            preds, labels, np.asarray(devices), n_classes=2,
            n_devices=3, seen_devices=seen, unseen_devices=unseen,
        )

    def test_seen_unseen_cover_the_samples(self):
        report = self.make_report([0, 0, 1, 1, 2, 2])
        assert report.seen_acc is not None
        assert report.unseen_acc is not None
        assert report.n_evaluated == 6
        assert not np.isnan(report.per_device_acc).any()

    def test_absent_unseen_subset_reports_none(self):
        """With no unseen-device samples the field stays empty instead of
        fabricating a number."""
        report = self.make_report([0, 0, 1, 1, 0, 1])
        assert report.unseen_acc is None
        assert np.isnan(report.per_device_acc[2])

    def test_validate_catches_tampering(self):
        report = self.make_report([0, 0, 1, 1, 2, 2])
        report.overall_classwise_acc += 0.25
        with pytest.raises(ValueError, match="mean of per-class"):
            report.validate()

    def test_report_is_internally_consistent(self):
        report = self.make_report([0, 0, 1, 1, 2, 2])
        assert report.overall_classwise_acc == float(report.per_class_acc.mean())
        assert report.confusion.sum() == report.n_evaluated


def permuted(dataset: Dataset, rng) -> Dataset:
    order = rng.permutation(len(dataset))
    return Dataset(
        samples=[dataset.samples[i] for i in order],
        n_scenes=dataset.n_scenes,
        n_devices=dataset.n_devices,
        seen_devices=dataset.seen_devices,
        unseen_devices=dataset.unseen_devices,
        split=dataset.split,
    )


class TestEvaluate:
    def test_sample_order_does_not_matter(self, tiny_benchmark):
        train, test = tiny_benchmark
        model = SceneModel.build(
            train.n_bins, [24], 8, train.n_scenes, np.random.default_rng(143)
        )
        base = evaluate(model, test)
        shuffled = evaluate(model, permuted(test, np.random.default_rng(144)))
        assert shuffled.overall_classwise_acc == base.overall_classwise_acc
        np.testing.assert_array_equal(shuffled.per_class_acc, base.per_class_acc)
        np.testing.assert_array_equal(shuffled.confusion, base.confusion)
        assert shuffled.seen_acc == base.seen_acc
        assert shuffled.unseen_acc == base.unseen_acc

    def test_tied_logits_predict_lowest_index(self, tiny_benchmark):
        """A zeroed model emits identical logits for every class; argmax
        ties resolve to class 0, which scores exactly 1/C."""
        train, test = tiny_benchmark
        model = SceneModel.build(
            train.n_bins, [24], 8, train.n_scenes, np.random.default_rng(145)
        )
        for net in (model.extractor, model.head):
            for layer in net.layers:
                layer.weights[:] = 0.0
                layer.bias[:] = 0.0
        assert set(model.predict(test.feature_matrix())) == {0}
        report = evaluate(model, test)
        assert abs(report.overall_classwise_acc - 1.0 / test.n_scenes) < 1e-12

    def test_class_count_mismatch_rejected(self, tiny_benchmark):
        train, test = tiny_benchmark
        model = SceneModel.build(train.n_bins, [24], 8, train.n_scenes + 2,
                                 np.random.default_rng(146))
        with pytest.raises(ValueError, match="classes"):
            evaluate(model, test)


class TestNearestTemplateOracle:
    def test_template_matcher_is_device_blind_under_weak_shift(self):
        """A classifier that ignores devices entirely (nearest scene template
        in L2) scores seen and unseen devices within 2 points of each other
        when the device curves are weak. Strong curves break even this
        device-blind oracle, so the check pins a weak-curve generator."""
        spec = GeneratorSpec(curve_amplitude=0.25)
        _, test = generate(spec)
        templates = scene_templates(spec)

        extractor = Network([spec.n_bins, spec.n_bins], np.random.default_rng(147))
        extractor.layers[0].weights[:] = np.eye(spec.n_bins)
        extractor.layers[0].bias[:] = 0.0
        head = Network([spec.n_bins, spec.n_scenes], np.random.default_rng(148))
        # ||x - t||^2 = ||x||^2 - 2 t.x + ||t||^2, so argmin distance equals
        # argmax of t.x - ||t||^2 / 2.
        head.layers[0].weights[:] = templates
        head.layers[0].bias[:] = -0.5 * np.sum(templates**2, axis=1)

        report = evaluate(SceneModel(extractor, head), test)
        assert report.seen_acc is not None and report.unseen_acc is not None
        assert abs(report.seen_acc - report.unseen_acc) < 0.02
        assert report.overall_classwise_acc > 0.95
