from dataclasses import asdict, dataclass, field
import logging
from typing import Callable, Dict, List, Optional

import numpy as np
from tqdm import tqdm

from src.components.data.batching import EncodedSplit, iterate_batches
from src.components.evaluation.accuracy import evaluate_accuracy
from src.components.models.base import TextClassifier
from src.components.training.adam import Adam
from src.components.training.early_stopping import EarlyStopping
from src.config.models import TrainConfig
from src.core.errors import DivergenceError
from src.core.ops import cross_entropy
from src.core.tensor import backward

logger = logging.getLogger(__name__)


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    dev_accuracy: float
    best_dev_accuracy: float
    improved: bool

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass
class TrainResult:
    history: List[EpochRecord] = field(default_factory=list)
    best_epoch: int = -1
    best_dev_accuracy: float = 0.0
    stopped_early: bool = False


def _snapshot(model: TextClassifier) -> Dict[str, np.ndarray]:
    return {name: p.data.copy() for name, p in model.parameters().items()}


def _restore(model: TextClassifier, snapshot: Dict[str, np.ndarray]) -> None:
    for name, p in model.parameters().items():
        p.data = snapshot[name].copy()


def train(
    model: TextClassifier,
    train_split: EncodedSplit,
    dev_split: EncodedSplit,
    cfg: TrainConfig,
    progress: bool = False,
    on_epoch: Optional[Callable[[EpochRecord], None]] = None,
) -> TrainResult:
    """
    Minimise the mean cross-entropy with Adam, keeping the parameters of the best dev epoch.

    The training split is reshuffled every epoch and dropout masks are drawn from the same
    generator seeded with `cfg.seed`, so a run is a pure function of (model, data, seed).
    """
    if len(train_split) == 0 or len(dev_split) == 0:
        raise ValueError("training needs non-empty train and dev splits")

    rng = np.random.default_rng(cfg.seed)
    optimizer = Adam(model.parameters(), lr=cfg.lr)
    stopper = EarlyStopping(cfg.patience)
    result = TrainResult()
    best = _snapshot(model)

    for epoch in range(cfg.max_epochs):
        order = rng.permutation(len(train_split))
        batches = iterate_batches(train_split, cfg.batch, order)
        total_loss = 0.0
        for step, batch in enumerate(
            tqdm(batches, desc=f"epoch {epoch}", total=-(-len(train_split) // cfg.batch), disable=not progress)
        ):
            model.zero_grad()
            loss = cross_entropy(model.logits(batch, training=True, rng=rng), batch.labels)
            value = loss.item()
            if not np.isfinite(value):
                raise DivergenceError(f"loss became {value} at epoch {epoch}, batch {step}")
            backward(loss)
            optimizer.step()
            total_loss += value * batch.size

        train_loss = total_loss / len(train_split)
        dev_accuracy = evaluate_accuracy(model, dev_split, cfg.batch)
        improved = stopper.update(dev_accuracy, epoch)
        if improved:
            best = _snapshot(model)
        record = EpochRecord(epoch, train_loss, dev_accuracy, stopper.best_score, improved)
        result.history.append(record)
        logger.info(
            f"epoch {epoch}: train loss {train_loss:.4f}, dev accuracy {dev_accuracy:.4f}, "
            f"best {stopper.best_score:.4f} (epoch {stopper.best_epoch})"
        )
        if on_epoch is not None:
            on_epoch(record)
        if stopper.should_stop:
            logger.info(f"Early stopping after epoch {epoch}")
            result.stopped_early = True
            break

    _restore(model, best)
    result.best_epoch = stopper.best_epoch
    result.best_dev_accuracy = stopper.best_score
    return result
