import json

import numpy as np
import pandas as pd
import pytest

from src.components.data.batching import EncodedSplit
from src.components.evaluation.accuracy import evaluate_accuracy, predict_split, summarize_runs
from src.components.evaluation.gradient_suite import (
    OP_CHECKS,
    SuiteReport,
    all_checks,
    architecture_check,
    check_relu,
    run_suite,
)
from src.components.evaluation.run_tracker import RunMetrics, RunTracker, read_metrics
from src.components.models.factory import ARCHITECTURES, build_model
from src.components.training.trainer import EpochRecord
from src.config.models import EncoderConfig
from src.core import ops


def _split(labels):
    rng = np.random.default_rng(5)
    return EncodedSplit(ids=[rng.integers(1, 6, size=3) for _ in labels], labels=np.array(labels))


def _zero_cnn():
    rng = np.random.default_rng(0)
    cfg = EncoderConfig(filter_sizes=(2,), filters_per_size=2)
    model = build_model("cnn", rng.uniform(-1, 1, (6, 3)), 3, cfg, d=None, d_s=2, dropout=0.5, rng=rng,
                        dtype=np.float64)
    model.head.weight.data[:] = 0.0
    model.head.bias.data[:] = 0.0
    return model


class TestAccuracy:
    def test_ties_predict_the_first_category(self):
        model = _zero_cnn()
        split = _split([0, 1, 0, 2, 0])
        np.testing.assert_array_equal(predict_split(model, split, batch_size=2), [0, 0, 0, 0, 0])
        assert evaluate_accuracy(model, split, batch_size=2) == pytest.approx(0.6)

    def test_bias_decides(self):
        model = _zero_cnn()
        model.head.bias.data[:] = [0.0, 0.0, 1.0]
        assert evaluate_accuracy(model, _split([2, 2, 1])) == pytest.approx(2 / 3)

    def test_empty_split(self):
        with pytest.raises(ValueError):
            evaluate_accuracy(_zero_cnn(), EncodedSplit(ids=[], labels=np.zeros(0, dtype=np.int64)))


class TestSummarizeRuns:
    def test_mean_and_sample_std(self):
        mean, std = summarize_runs([0.9, 0.92, 0.94])
        assert mean == pytest.approx(0.92)
        assert std == pytest.approx(0.02)

    def test_single_run(self):
        assert summarize_runs([0.8]) == (0.8, 0.0)

    def test_no_runs(self):
        with pytest.raises(ValueError):
            summarize_runs([])


class TestRunTracker:
    def _metrics(self):
        return RunMetrics(
            run_name="trec-cnn-seed1", dataset="trec", model="cnn", seed=1, dev_accuracy=0.5,
            test_accuracy=0.25, best_epoch=1, epochs=2, stopped_early=False, config={"lr": 0.001},
        )

    def test_files_are_written(self, tmp_path):
        tracker = RunTracker(tmp_path / "reports", "trec-cnn-seed1")
        tracker.log_epoch(EpochRecord(0, 1.25, 0.4, 0.4, True))
        tracker.log_epoch(EpochRecord(1, 0.75, 0.5, 0.5, True))
        path = tracker.end_run(self._metrics())

        assert path == tmp_path / "reports" / "trec-cnn-seed1.metrics.json"
        metrics = read_metrics(path)
        assert metrics["test_accuracy"] == 0.25
        assert [h["epoch"] for h in metrics["history"]] == [0, 1]
        text = path.read_text(encoding="utf-8")
        assert list(json.loads(text)) == sorted(json.loads(text))

        history = pd.read_csv(tracker.history_path, sep="\t")
        assert list(history.columns) == ["epoch", "train_loss", "dev_accuracy", "best_dev_accuracy"]
        assert history["train_loss"].tolist() == [1.25, 0.75]
        assert tracker.history_path.read_text(encoding="utf-8").splitlines()[1] == "0\t1.250000\t0.400000\t0.400000"

    def test_identical_runs_give_identical_files(self, tmp_path):
        contents = []
        for name in ("a", "b"):
            tracker = RunTracker(tmp_path / name, "run")
            tracker.log_epoch(EpochRecord(0, 1.0, 0.5, 0.5, True))
            contents.append(tracker.end_run(self._metrics()).read_bytes())
        assert contents[0] == contents[1]

    def test_missing_metrics(self, tmp_path):
        assert read_metrics(tmp_path / "none.metrics.json") is None


class TestGradientSuite:
    @pytest.mark.parametrize("name", sorted(OP_CHECKS))
    def test_every_op_over_five_seeds(self, name):
        report = run_suite(checks={name: OP_CHECKS[name]})
        assert report.passed, report.lines()

    @pytest.mark.parametrize("architecture", ARCHITECTURES)
    def test_every_architecture(self, architecture):
        for seed in range(5):
            assert architecture_check(architecture, np.random.default_rng(seed)) < 1e-4

    def test_broken_backward_is_reported(self, monkeypatch):
        monkeypatch.setattr(ops.ReLU, "backward", lambda self, grad: (grad,))
        report = run_suite(seeds=(0,), checks={"relu": check_relu, "sum_all": OP_CHECKS["sum_all"]})
        assert report.failures == ["relu"]
        assert not report.passed
        assert report.lines()[-1] == "failed: 1/2"

    def test_report_lists_each_check_once(self):
        report = SuiteReport(errors={name: 0.0 for name in all_checks()})
        names = [line.split()[0] for line in report.lines()[:-1]]
        assert names == list(all_checks())
        assert len(names) == len(OP_CHECKS) + len(ARCHITECTURES)
        assert report.lines()[-1] == f"passed: {len(names)}/{len(names)}"

    def test_nan_error_counts_as_failure(self):
        assert SuiteReport(errors={"x": float("nan")}).failures == ["x"]
