import logging

logger = logging.getLogger(__name__)


class EarlyStopping:
    """Stop once the monitored score (higher is better) has not improved for `patience` epochs."""

    def __init__(self, patience: int = 10):
        assert patience > 0
        self.patience = patience
        self.best_score = float("-inf")
        self.best_epoch = -1
        self.epochs_without_improvement = 0

    def update(self, score: float, epoch: int) -> bool:
        """Record the score of `epoch`; returns True when it is a new best."""
        if score > self.best_score:
            self.best_score = score
            self.best_epoch = epoch
            self.epochs_without_improvement = 0
            return True
        self.epochs_without_improvement += 1
        logger.info(f"Early stopping counter: {self.epochs_without_improvement}/{self.patience}")
        return False

    @property
    def should_stop(self) -> bool:
        return self.epochs_without_improvement >= self.patience
