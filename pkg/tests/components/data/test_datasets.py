import numpy as np
import pytest

from src.components.data.datasets import (
    AGNEWS_CATEGORIES,
    TREC_CATEGORIES,
    average_length,
    load_dataset,
    subsample,
)
from src.core.errors import DataError


class TestTrec:
    def test_split_sizes(self, data_dir):
        splits = load_dataset("trec", data_dir)
        assert (len(splits.train), len(splits.dev), len(splits.test)) == (68, 452, 30)
        assert splits.categories == TREC_CATEGORIES
        assert len(splits.categories) == 6

    def test_dev_is_the_tail_of_the_training_file(self, data_dir):
        splits = load_dataset("trec", data_dir)
        lines = (data_dir / "trec" / "train_5500.label").read_text(encoding="latin-1").splitlines()
        assert splits.dev[-1].raw == lines[-1].partition(" ")[2]
        assert splits.train[0].raw == lines[0].partition(" ")[2]

    def test_numeric_question(self, tmp_path):
        root = tmp_path / "data" / "trec"
        root.mkdir(parents=True)
        lines = ["NUM:date When was Lincoln born ?"] * 453
        (root / "train_5500.label").write_text("\n".join(lines), encoding="latin-1")
        (root / "TREC_10.label").write_text("NUM:count How many zebras are there ?\n", encoding="latin-1")
        splits = load_dataset("trec", tmp_path / "data")
        example = splits.test[0]
        assert example.tokens == ["How", "many", "zebras", "are", "there", "?"]
        assert TREC_CATEGORIES[example.label] == "NUM"

    def test_malformed_line_reports_its_number(self, data_dir):
        path = data_dir / "trec" / "TREC_10.label"
        lines = path.read_text(encoding="latin-1").splitlines()
        lines[2] = "no label here"
        path.write_text("\n".join(lines), encoding="latin-1")
        with pytest.raises(DataError, match=r"TREC_10\.label:3"):
            load_dataset("trec", data_dir)

    def test_unknown_coarse_category(self, data_dir):
        path = data_dir / "trec" / "TREC_10.label"
        path.write_text("FOO:bar What is this ?\n", encoding="latin-1")
        with pytest.raises(DataError) as info:
            load_dataset("trec", data_dir)
        assert info.value.line == 1

    def test_too_few_training_questions(self, tmp_path):
        from conftest import write_trec

        write_trec(tmp_path, train=100)
        with pytest.raises(DataError, match="452"):
            load_dataset("trec", tmp_path)


class TestSst2:
    def test_header_is_skipped(self, data_dir):
        splits = load_dataset("sst2", data_dir)
        assert (len(splits.train), len(splits.dev), len(splits.test)) == (40, 16, 16)
        assert splits.train[0].tokens == ["a", "great", ",", "moving", "film", "."]
        assert splits.train[0].label == 1
        assert splits.train[4].label == 0

    def test_unknown_label(self, data_dir):
        path = data_dir / "sst2" / "dev.tsv"
        path.write_text("sentence\tlabel\nfine film .\t1\nodd one .\t3\n", encoding="utf-8")
        with pytest.raises(DataError, match=r"dev\.tsv:3"):
            load_dataset("sst2", data_dir)

    def test_file_without_header(self, data_dir):
        (data_dir / "sst2" / "test.tsv").write_text("fine film .\t1\n", encoding="utf-8")
        assert len(load_dataset("sst2", data_dir).test) == 1

    def test_missing_split_file(self, data_dir):
        (data_dir / "sst2" / "dev.tsv").unlink()
        with pytest.raises(DataError, match="not found"):
            load_dataset("sst2", data_dir)


class TestAgnews:
    def test_classes_and_dev_carve(self, data_dir):
        splits = load_dataset("agnews", data_dir)
        assert (len(splits.train), len(splits.dev), len(splits.test)) == (36, 4, 12)
        assert AGNEWS_CATEGORIES[splits.test[2].label] == "BUSINESS"

    def test_backslash_becomes_a_space(self, data_dir):
        example = load_dataset("agnews", data_dir).test[0]
        assert example.tokens[-2:] == ["ceasefire", "plan"]
        assert example.tokens[:3] == ["Talks", "stall", "in"]

    def test_class_out_of_range(self, data_dir):
        path = data_dir / "agnews" / "test.csv"
        path.write_text('"1","a","b"\n"5","c","d"\n', encoding="utf-8")
        with pytest.raises(DataError, match=r"test\.csv:2"):
            load_dataset("agnews", data_dir)


def test_unknown_dataset(data_dir):
    with pytest.raises(ValueError):
        load_dataset("imdb", data_dir)


def test_missing_data_dir(tmp_path):
    with pytest.raises(DataError, match="data directory"):
        load_dataset("trec", tmp_path / "nowhere")


def test_empty_text_after_tokenization(data_dir):
    (data_dir / "sst2" / "test.tsv").write_text("sentence\tlabel\n   \t1\n", encoding="utf-8")
    with pytest.raises(DataError, match="empty"):
        load_dataset("sst2", data_dir)


def test_subsample_is_fixed_and_ordered(data_dir):
    dev = load_dataset("trec", data_dir).dev
    first = subsample(dev, 50)
    assert [e.raw for e in first] == [e.raw for e in subsample(dev, 50)]
    where = {id(e): i for i, e in enumerate(dev)}
    positions = [where[id(e)] for e in first]
    assert positions == sorted(positions)
    assert len(subsample(dev, None)) == len(dev)
    assert len(subsample(dev, 10_000)) == len(dev)


def test_average_length(data_dir):
    splits = load_dataset("sst2", data_dir)
    expected = np.mean([len(e.tokens) for e in splits.test])
    assert average_length(splits.test) == pytest.approx(expected)
    assert average_length([]) == 0.0
