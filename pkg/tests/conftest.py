import csv
from pathlib import Path
from typing import List

import numpy as np
import pytest

from src.components.models.base import Batch
from src.components.data.batching import make_batch

TREC_TEMPLATES = {
    "ABBR": ["What does {w} stand for ?", "What is the abbreviation of {w} ?"],
    "DESC": ["What is the definition of {w} ?", "Why does {w} happen ?"],
    "ENTY": ["What animal is {w} ?", "What color is {w} ?"],
    "HUM": ["Who invented {w} ?", "Who was {w} ?"],
    "LOC": ["Where is {w} ?", "What country is {w} in ?"],
    "NUM": ["How many {w} are there ?", "When was {w} born ?"],
}
FILLERS = ["NASA", "radar", "Paris", "Lincoln", "the telephone", "zebras", "Everest", "gold", "Mars", "jazz", "DNA"]

SST2_POSITIVE = ["a great , moving film .", "warm and funny .", "a gorgeous , witty movie .", "truly wonderful acting ."]
SST2_NEGATIVE = ["a dull , lifeless mess .", "boring and flat .", "the plot is a clumsy failure .", "truly awful acting ."]

AGNEWS_ROWS = [
    ("1", "Talks stall in Geneva", "Diplomats fail to agree on a ceasefire\\plan"),
    ("2", "Red Sox win again", "Boston beats New York in the ninth inning"),
    ("3", "Stocks rally on earnings", "Wall Street gains as profits rise"),
    ("4", "New chip unveiled", "The processor doubles battery life for laptops"),
]


def trec_lines(count: int, offset: int = 0) -> List[str]:
    categories = list(TREC_TEMPLATES)
    lines = []
    for i in range(offset, offset + count):
        coarse = categories[i % len(categories)]
        templates = TREC_TEMPLATES[coarse]
        text = templates[(i // 6) % len(templates)].format(w=FILLERS[(i // 12) % len(FILLERS)])
        lines.append(f"{coarse}:other {text}")
    return lines


def write_trec(root: Path, train: int = 520, test: int = 30) -> Path:
    path = root / "trec"
    path.mkdir(parents=True, exist_ok=True)
    (path / "train_5500.label").write_text("\n".join(trec_lines(train)) + "\n", encoding="latin-1")
    (path / "TREC_10.label").write_text("\n".join(trec_lines(test, offset=7)) + "\n", encoding="latin-1")
    return path


def write_sst2(root: Path) -> Path:
    path = root / "sst2"
    path.mkdir(parents=True, exist_ok=True)
    sizes = {"train": 5, "dev": 2, "test": 2}
    for split, repeats in sizes.items():
        rows = ["sentence\tlabel"]
        for _ in range(repeats):
            rows += [f"{s}\t1" for s in SST2_POSITIVE] + [f"{s}\t0" for s in SST2_NEGATIVE]
        (path / f"{split}.tsv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    return path


def write_agnews(root: Path, train_repeats: int = 10, test_repeats: int = 3) -> Path:
    path = root / "agnews"
    path.mkdir(parents=True, exist_ok=True)
    for name, repeats in (("train.csv", train_repeats), ("test.csv", test_repeats)):
        with open(path / name, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, quoting=csv.QUOTE_ALL)
            for _ in range(repeats):
                writer.writerows(AGNEWS_ROWS)
    return path


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)


@pytest.fixture
def data_dir(tmp_path: Path) -> Path:
    root = tmp_path / "data"
    write_trec(root)
    write_sst2(root)
    write_agnews(root)
    return root


@pytest.fixture
def glove_file(tmp_path: Path) -> Path:
    path = tmp_path / "glove.4d.txt"
    path.write_text(
        "Who 0.1 0.2 0.3 0.4\n"
        "is 1 2 3 4\n"
        "New York 9 9 9 9 9\n"
        "? -0.5 0.5 -0.5 0.5\n"
        "unused 7 7 7 7\n",
        encoding="utf-8",
    )
    return path


@pytest.fixture
def tiny_batch(rng) -> Batch:
    """Three texts of lengths 4, 2 and 3 over a vocabulary of 7 ids (0 is padding)."""
    return make_batch([rng.integers(1, 7, size=n) for n in (4, 2, 3)], labels=np.array([0, 2, 1]))
