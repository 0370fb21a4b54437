"""
Dataset loaders.

Expected layout under the data root (one directory per dataset):

    trec/train_5500.label, trec/TREC_10.label       "COARSE:fine question text"
    sst2/train.tsv, sst2/dev.tsv, sst2/test.tsv      "sentence<TAB>label"
    agnews/train.csv, agnews/test.csv                "class","title","description"

TREC and AG-news ship no dev split, so dev is the last 452 / 10000 examples of the
training file.
"""
import csv
from dataclasses import dataclass, field
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.components.data.tokenizer import tokenize
from src.core.errors import DataError

logger = logging.getLogger(__name__)

TREC_CATEGORIES = ("ABBR", "DESC", "ENTY", "HUM", "LOC", "NUM")
TREC_FILES = ("train_5500.label", "TREC_10.label")
TREC_DEV_SIZE = 452

SST2_CATEGORIES = ("NEGATIVE", "POSITIVE")
SST2_LABELS = {"0": 0, "1": 1}

AGNEWS_CATEGORIES = ("WORLD", "SPORTS", "BUSINESS", "SCI-TECH")
AGNEWS_DEV_SIZE = 10000


@dataclass
class Example:
    tokens: List[str]
    label: int
    raw: str


@dataclass
class DatasetSplits:
    name: str
    categories: Tuple[str, ...]
    train: List[Example]
    dev: List[Example]
    test: List[Example]
    sources: Dict[str, str] = field(default_factory=dict)

    def split(self, name: str) -> List[Example]:
        if name not in ("train", "dev", "test"):
            raise ValueError(f"unknown split {name!r}")
        return getattr(self, name)

    def all_examples(self) -> List[Example]:
        return self.train + self.dev + self.test


def _make_example(text: str, label: int, path: Path, line: int) -> Example:
    tokens = tokenize(text)
    if not tokens:
        raise DataError("text is empty after tokenization", path, line)
    return Example(tokens=tokens, label=label, raw=text)


def _require(path: Path) -> Path:
    if not path.is_file():
        raise DataError("file not found", path)
    return path


def _read_trec_file(path: Path) -> List[Example]:
    examples = []
    # the TREC files are not valid UTF-8
    with open(_require(path), encoding="latin-1") as f:
        for line_number, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            label_field, _, text = line.partition(" ")
            coarse, sep, fine = label_field.partition(":")
            if not sep or not fine or coarse not in TREC_CATEGORIES or not text.strip():
                raise DataError(f"expected 'COARSE:fine question', got {line[:40]!r}", path, line_number)
            examples.append(_make_example(text, TREC_CATEGORIES.index(coarse), path, line_number))
    return examples


def load_trec(path: Path) -> DatasetSplits:
    path = Path(path)
    train_all = _read_trec_file(path / TREC_FILES[0])
    test = _read_trec_file(path / TREC_FILES[1])
    if len(train_all) <= TREC_DEV_SIZE:
        raise DataError(f"need more than {TREC_DEV_SIZE} training questions, found {len(train_all)}", path)
    splits = DatasetSplits(
        name="trec",
        categories=TREC_CATEGORIES,
        train=train_all[:-TREC_DEV_SIZE],
        dev=train_all[-TREC_DEV_SIZE:],
        test=test,
    )
    _log_sizes(splits)
    return splits


def _read_sst2_file(path: Path) -> List[Example]:
    try:
        frame = pd.read_csv(
            _require(path),
            sep="\t",
            header=None,
            names=["sentence", "label"],
            dtype=str,
            quoting=csv.QUOTE_NONE,
            keep_default_na=False,
            encoding="utf-8",
        ).fillna("")
    except pd.errors.ParserError as e:
        raise DataError(f"cannot parse TSV: {e}", path) from e
    first_line = 1
    if len(frame) and frame.iloc[0]["label"].strip().lower() == "label":
        frame = frame.iloc[1:]
        first_line = 2
    examples = []
    for offset, (sentence, label) in enumerate(zip(frame["sentence"], frame["label"])):
        label = label.strip()
        if label not in SST2_LABELS:
            raise DataError(f"unknown label {label!r}", path, first_line + offset)
        examples.append(_make_example(sentence, SST2_LABELS[label], path, first_line + offset))
    return examples


def load_sst2(path: Path) -> DatasetSplits:
    path = Path(path)
    splits = DatasetSplits(
        name="sst2",
        categories=SST2_CATEGORIES,
        train=_read_sst2_file(path / "train.tsv"),
        dev=_read_sst2_file(path / "dev.tsv"),
        test=_read_sst2_file(path / "test.tsv"),
    )
    _log_sizes(splits)
    return splits


def _read_agnews_file(path: Path) -> List[Example]:
    try:
        frame = pd.read_csv(
            _require(path),
            header=None,
            names=["class_index", "title", "description"],
            dtype=str,
            keep_default_na=False,
            encoding="utf-8",
        ).fillna("")
    except pd.errors.ParserError as e:
        raise DataError(f"cannot parse CSV: {e}", path) from e
    examples = []
    columns = zip(frame["class_index"], frame["title"], frame["description"])
    for line_number, (class_index, title, description) in enumerate(columns, start=1):
        class_index = class_index.strip()
        if class_index not in ("1", "2", "3", "4"):
            raise DataError(f"class {class_index!r} outside 1..4", path, line_number)
        # the source escapes line breaks as backslashes
        text = f"{title} {description}".replace("\\", " ")
        examples.append(_make_example(text, int(class_index) - 1, path, line_number))
    return examples


def load_agnews(path: Path) -> DatasetSplits:
    path = Path(path)
    train_all = _read_agnews_file(path / "train.csv")
    test = _read_agnews_file(path / "test.csv")
    # files smaller than the full dev split (fixtures, excerpts) keep a tenth for dev
    dev_size = AGNEWS_DEV_SIZE if len(train_all) > AGNEWS_DEV_SIZE else len(train_all) // 10
    if dev_size < 1:
        raise DataError(f"training file has too few rows ({len(train_all)}) to carve a dev split", path)
    splits = DatasetSplits(
        name="agnews",
        categories=AGNEWS_CATEGORIES,
        train=train_all[:-dev_size],
        dev=train_all[-dev_size:],
        test=test,
    )
    _log_sizes(splits)
    return splits


LOADERS = {"trec": load_trec, "sst2": load_sst2, "agnews": load_agnews}


def load_dataset(name: str, data_dir: Path) -> DatasetSplits:
    if name not in LOADERS:
        raise ValueError(f"unknown dataset {name!r}")
    root = Path(data_dir)
    if not root.is_dir():
        raise DataError("data directory not found", root)
    return LOADERS[name](root / name)


def subsample(examples: Sequence[Example], size: Optional[int], seed: int = 0) -> List[Example]:
    """A fixed-seed subset of `size` examples, kept in their original order."""
    if size is None or size >= len(examples):
        return list(examples)
    chosen = np.sort(np.random.default_rng(seed).permutation(len(examples))[:size])
    return [examples[i] for i in chosen]


def average_length(examples: Sequence[Example]) -> float:
    if not examples:
        return 0.0
    return float(np.mean([len(e.tokens) for e in examples]))


def _log_sizes(splits: DatasetSplits) -> None:
    logger.info(
        f"Loaded {splits.name}: {len(splits.train)} train / {len(splits.dev)} dev / {len(splits.test)} test, "
        f"{len(splits.categories)} categories, test AvgL {average_length(splits.test):.1f}"
    )
