from dataclasses import dataclass
import logging
from pathlib import Path

import numpy as np
from tqdm import tqdm

from src.components.data.vocab import PAD, PAD_INDEX, UNK, Vocab
from src.core.errors import DataError

logger = logging.getLogger(__name__)

EMBEDDING_DIM = 300
OOV_RANGE = 0.25


@dataclass
class EmbeddingMatrix:
    weights: np.ndarray  # [|V|, dim]
    trainable: bool = True
    hits: int = 0

    @property
    def coverage(self) -> float:
        real_words = self.weights.shape[0] - 2
        return self.hits / real_words if real_words > 0 else 0.0


def _is_number(field: str) -> bool:
    try:
        float(field)
    except ValueError:
        return False
    return True


def random_embeddings(vocab: Vocab, dim: int = EMBEDDING_DIM, seed: int = 0) -> EmbeddingMatrix:
    """Every row uniform in [-0.25, 0.25] except the all-zero padding row."""
    rng = np.random.default_rng(seed)
    weights = rng.uniform(-OOV_RANGE, OOV_RANGE, (len(vocab), dim))
    weights[PAD_INDEX] = 0.0
    return EmbeddingMatrix(weights=weights)


def load_glove_subset(
    path: Path, vocab: Vocab, dim: int = EMBEDDING_DIM, seed: int = 0, progress: bool = False
) -> EmbeddingMatrix:
    """
    Copy GloVe vectors for the words of `vocab`; the rest keep the random initialization.

    Lines are `word v1 ... v_dim`. The last `dim` fields are the vector and everything
    before them is the word, so the few GloVe entries with spaces inside the word parse
    but never match a vocabulary token. A vocabulary word whose line is too short, or
    followed by extra numeric fields, has the wrong width and is rejected.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError("GloVe file not found", path)
    matrix = random_embeddings(vocab, dim, seed)
    found = set()
    with open(path, encoding="utf-8", errors="replace") as f:
        for line_number, line in enumerate(tqdm(f, desc="glove", unit=" lines", disable=not progress), start=1):
            fields = line.rstrip().split(" ")
            head, values = fields[:-dim], fields[-dim:]
            if not head or (head[0] in vocab and len(head) > 1 and all(map(_is_number, head[1:]))):
                word = fields[0]
                if word in vocab and word not in found:
                    raise DataError(
                        f"vector for {word!r} has {len(fields) - 1} values, expected {dim}", path, line_number
                    )
                continue
            word = " ".join(head)
            if word not in vocab or word in found:
                continue
            try:
                matrix.weights[vocab.index(word)] = np.array(values, dtype=np.float64)
            except ValueError as e:
                raise DataError(f"vector for {word!r} is not numeric", path, line_number) from e
            found.add(word)
    found -= {PAD, UNK}
    matrix.weights[PAD_INDEX] = 0.0
    matrix.hits = len(found)
    logger.info(f"GloVe coverage: {matrix.hits}/{len(vocab) - 2} words ({100 * matrix.coverage:.1f}%)")
    return matrix
