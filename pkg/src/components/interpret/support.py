"""
Category support of latent features and of words.

A feature f_j supports category c in proportion to how often it fires (r_j > delta)
on texts the model assigns to c. A word supports c through the features its
context distribution p(f | w, s) puts mass on:

    q(c | w, s) = sum_j q(c | f_j) p(f_j | w, s)
"""
from dataclasses import dataclass
import json
import logging
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from src.components.data.batching import EncodedSplit, iterate_batches, make_batch
from src.components.models.base import TextClassifier
from src.components.models.bolf import DolfinClassifier
from src.core.errors import DataError, DimensionError, UsageError

logger = logging.getLogger(__name__)

NEAR_UNIFORM = 0.9


@dataclass
class FeatureSupportTable:
    q: np.ndarray  # [m, d], column j is q(. | f_j)
    counts: np.ndarray  # [m, d]
    delta: float
    categories: List[str]
    unused: np.ndarray  # [d], True where the feature never fired

    @property
    def m(self) -> int:
        return self.counts.shape[0]

    @property
    def d(self) -> int:
        return self.counts.shape[1]

    @classmethod
    def from_counts(cls, counts: np.ndarray, delta: float, categories: Sequence[str]) -> "FeatureSupportTable":
        """Normalize every column; a column that never fired falls back to the uniform 1/m."""
        counts = np.asarray(counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != len(categories):
            raise DimensionError(f"counts of shape {counts.shape} do not match {len(categories)} categories")
        totals = counts.sum(axis=0)
        unused = totals == 0
        q = np.full(counts.shape, 1.0 / counts.shape[0])
        used = ~unused
        q[:, used] = counts[:, used] / totals[used]
        return cls(q=q, counts=counts, delta=float(delta), categories=list(categories), unused=unused)


@dataclass
class WordSupport:
    tokens: List[str]
    p: np.ndarray  # [n, d], row i is p(f | w_i, s)
    q: np.ndarray  # [n, m], row i is q(c | w_i, s)
    features: np.ndarray  # [n], argmax_j p(f_j | w_i, s)
    predicted: int
    r: np.ndarray  # [d]

    @property
    def feature_weights(self) -> np.ndarray:
        """p(f_j | w_i, s) of each word's argmax feature."""
        return self.p[np.arange(len(self.features)), self.features]


def _require_dolfin(model: TextClassifier) -> DolfinClassifier:
    if not isinstance(model, DolfinClassifier):
        raise UsageError(f"interpretation needs a latent-feature model, got {model.architecture}")
    return model


def _batches(texts: Sequence[np.ndarray], batch_size: int):
    for start in range(0, len(texts), batch_size):
        yield make_batch(texts[start:start + batch_size])


def estimate_feature_support(
    model: TextClassifier,
    texts: Sequence[np.ndarray],
    categories: Sequence[str],
    delta: float = 0.5,
    batch_size: int = 50,
    progress: bool = False,
) -> FeatureSupportTable:
    """
    Tally, for each text of the unlabeled corpus, the features with r_j > delta under the
    category the model predicts, then normalize per feature.
    """
    model = _require_dolfin(model)
    if len(texts) == 0:
        raise DataError("support estimation needs a non-empty corpus")
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    if len(categories) != model.num_categories:
        raise DimensionError(f"{len(categories)} category labels for a model with {model.num_categories} categories")

    counts = np.zeros((model.num_categories, model.d), dtype=np.int64)
    total = -(-len(texts) // batch_size)
    for batch in tqdm(_batches(texts, batch_size), desc="feature support", total=total, disable=not progress):
        out = model.run(batch, training=False)
        predicted = np.argmax(out.logits.data, axis=-1)
        np.add.at(counts, predicted, (out.r > delta).astype(np.int64))

    table = FeatureSupportTable.from_counts(counts, delta, categories)
    logger.info(f"Estimated q(c|f) on {len(texts)} texts; {int(table.unused.sum())}/{table.d} features never fired")
    return table


def mix_support(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Rows of `p` ([n, d]) mixed with the columns of `q` ([m, d]) into [n, m]."""
    if p.shape[-1] != q.shape[1]:
        raise DimensionError(f"word distributions {p.shape} do not match support table {q.shape}")
    return p @ q.T


def word_support(
    model: TextClassifier, table: FeatureSupportTable, ids: np.ndarray, tokens: Optional[Sequence[str]] = None
) -> WordSupport:
    model = _require_dolfin(model)
    if model.d != table.d or model.num_categories != table.m:
        raise DimensionError(
            f"support table ({table.m} categories x {table.d} features) does not match model "
            f"({model.num_categories} categories x {model.d} features)"
        )
    if len(ids) == 0:
        raise ValueError("word support needs a non-empty text")
    out = model.run(make_batch([np.asarray(ids)]), training=False)
    p = out.u[0].astype(np.float64)
    return WordSupport(
        tokens=list(tokens) if tokens is not None else [str(i) for i in ids],
        p=p,
        q=mix_support(p, table.q),
        features=np.argmax(p, axis=-1),
        predicted=int(np.argmax(out.logits.data[0])),
        r=out.r[0].astype(np.float64),
    )


def feature_informativeness(table: FeatureSupportTable) -> np.ndarray:
    """Entropy of each q(. | f_j) divided by log m: 0 for a one-hot column, 1 for a uniform one."""
    if table.m < 2:
        return np.ones(table.d)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(table.q > 0, table.q * np.log(table.q), 0.0)
    entropy = -terms.sum(axis=0) / np.log(table.m)
    entropy[table.unused] = 1.0
    return np.clip(entropy, 0.0, 1.0)


def near_uniform_features(table: FeatureSupportTable, threshold: float = NEAR_UNIFORM) -> List[int]:
    """Features whose support is too flat to favour any category."""
    return [int(j) for j in np.flatnonzero(feature_informativeness(table) >= threshold)]


def texts_predicted_as(
    model: TextClassifier, split: EncodedSplit, category: int, limit: Optional[int] = None, batch_size: int = 50
) -> List[int]:
    """Indices, in split order, of the texts the model assigns to `category`."""
    found: List[int] = []
    offset = 0
    for batch in iterate_batches(split, batch_size):
        for i in np.flatnonzero(model.predict(batch) == category):
            found.append(offset + int(i))
            if limit is not None and len(found) >= limit:
                return found
        offset += batch.size
    return found


def save_table(table: FeatureSupportTable, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "categories": table.categories,
        "delta": table.delta,
        "counts": table.counts.tolist(),
        "q": table.q.tolist(),
        "unused": table.unused.tolist(),
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_table(path: Path) -> FeatureSupportTable:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
        table = FeatureSupportTable.from_counts(payload["counts"], payload["delta"], payload["categories"])
        stored_q = np.asarray(payload["q"], dtype=np.float64)
    except FileNotFoundError:
        raise
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise DataError(f"unreadable support table: {e}", path) from e
    if stored_q.shape != table.q.shape or not np.allclose(stored_q, table.q, rtol=0.0, atol=1e-9):
        raise DataError("stored q(c|f) does not match its counts", path)
    return table
