import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.components.data.batching import EncodedSplit, encode_split
from src.components.data.datasets import DatasetSplits, Example, load_dataset, subsample
from src.components.data.embeddings import EmbeddingMatrix, load_glove_subset, random_embeddings
from src.components.data.tokenizer import tokenize
from src.components.data.vocab import Vocab
from src.components.evaluation.accuracy import evaluate_accuracy
from src.components.evaluation.gradient_suite import SuiteReport, run_suite
from src.components.evaluation.run_tracker import RunMetrics, RunTracker
from src.components.interpret.render import (
    ansi_report,
    html_report,
    render_feature_subscripts,
    render_heatmap,
    render_highlight,
)
from src.components.interpret.support import (
    FeatureSupportTable,
    WordSupport,
    estimate_feature_support,
    load_table,
    near_uniform_features,
    save_table,
    texts_predicted_as,
    word_support,
)
from src.components.models.base import TextClassifier
from src.components.models.checkpoint import load_parameters, read_checkpoint, save_checkpoint
from src.components.models.factory import build_model
from src.components.training.trainer import train
from src.config.models import RunConfig
from src.core.errors import CheckpointError, DataError, NumericError, UsageError

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

logger = logging.getLogger(__name__)

# fields that identify a trained model; stored in checkpoint headers and metrics files
CHECKPOINT_FIELDS = {
    "dataset", "model", "d", "d_s", "seed", "dtype", "train_limit", "lr", "batch", "patience",
    "dropout", "max_epochs", "filter_sizes", "filters_per_size", "lstm_hidden",
}
SUBSAMPLE_SEED = 0
REPORT_TEXTS = 5
GRADCHECK_SEEDS = 5


class Coordinator:
    """Runs one command of the command line against a resolved `RunConfig`."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg

    def load_data(self, train_limit: Optional[int] = None) -> DatasetSplits:
        if self.cfg.data_dir is None:
            raise DataError("no data directory configured; pass --data-dir or set DOLFIN_DATA_DIR")
        splits = load_dataset(self.cfg.dataset, self.cfg.data_dir)
        if train_limit is not None and train_limit < len(splits.train):
            splits.train = subsample(splits.train, train_limit, seed=SUBSAMPLE_SEED)
            logger.info(f"Training on a fixed subsample of {len(splits.train)} examples")
        return splits

    @staticmethod
    def build_vocab(splits: DatasetSplits) -> Vocab:
        return Vocab.build(example.tokens for example in splits.all_examples())

    def load_embeddings(self, vocab: Vocab) -> EmbeddingMatrix:
        if self.cfg.glove is None:
            logger.warning("No GloVe file configured; every word vector is randomly initialized")
            return random_embeddings(vocab, seed=self.cfg.seed)
        return load_glove_subset(self.cfg.glove, vocab, seed=self.cfg.seed, progress=self.cfg.progress)

    def _build(self, cfg: RunConfig, embedding: np.ndarray, num_categories: int) -> TextClassifier:
        return build_model(
            cfg.model,
            embedding,
            num_categories,
            cfg.encoder_config(),
            d=cfg.d if cfg.is_dolfin else None,
            d_s=cfg.d_s,
            dropout=cfg.dropout,
            rng=np.random.default_rng(cfg.seed),
            dtype=np.dtype(cfg.dtype),
        )

    def restore(self) -> Tuple[TextClassifier, DatasetSplits, Vocab, Dict[str, Any]]:
        """Rebuild the checkpointed model together with the data and vocabulary it was trained on."""
        path = self.cfg.checkpoint_path
        header, arrays = read_checkpoint(path)
        if header.get("dataset") != self.cfg.dataset:
            raise CheckpointError(
                f"checkpoint was trained on {header.get('dataset')!r}, not {self.cfg.dataset!r}", path=path
            )
        if header.get("architecture") != self.cfg.model:
            raise CheckpointError(
                f"checkpoint holds a {header.get('architecture')!r} model, not {self.cfg.model!r}", path=path
            )
        try:
            trained = RunConfig(**header["config"])
        except (KeyError, TypeError, ValueError) as e:
            raise CheckpointError(f"header has no usable run configuration: {e}", path=path) from e

        splits = self.load_data(trained.train_limit)
        vocab = self.build_vocab(splits)
        if vocab.fingerprint() != header.get("vocab_hash"):
            raise CheckpointError(
                f"vocabulary of the {self.cfg.dataset} data ({len(vocab)} words) does not match the checkpoint "
                f"({header.get('vocab_size')} words)",
                path=path,
            )
        if "embedding" not in arrays:
            raise CheckpointError("checkpoint has no embedding table", path=path)
        embedding = np.zeros(arrays["embedding"].shape)
        model = self._build(trained, embedding, len(splits.categories))
        load_parameters(model, arrays)
        logger.info(f"Restored {model.architecture} from {path}")
        return model, splits, vocab, header

    def cmd_train(self) -> RunMetrics:
        cfg = self.cfg
        splits = self.load_data(cfg.train_limit)
        vocab = self.build_vocab(splits)
        embeddings = self.load_embeddings(vocab)
        model = self._build(cfg, embeddings.weights, len(splits.categories))
        train_split = encode_split(splits.train, vocab)
        dev_split = encode_split(splits.dev, vocab)
        test_split = encode_split(splits.test, vocab)

        tracker = RunTracker(cfg.report_dir, cfg.run_name)
        result = train(model, train_split, dev_split, cfg.train_config(), cfg.progress, on_epoch=tracker.log_epoch)

        config = cfg.model_dump(mode="json", include=CHECKPOINT_FIELDS)
        header = {
            "dataset": cfg.dataset,
            "categories": list(splits.categories),
            "vocab_hash": vocab.fingerprint(),
            "vocab_size": len(vocab),
            "dimensions": model.dimensions(),
            "config": config,
        }
        save_checkpoint(cfg.checkpoint_path, model, header)
        # report what a later `eval` will see: the stored float32 weights
        _, arrays = read_checkpoint(cfg.checkpoint_path)
        load_parameters(model, arrays)

        metrics = RunMetrics(
            run_name=cfg.run_name,
            dataset=cfg.dataset,
            model=cfg.model,
            seed=cfg.seed,
            dev_accuracy=evaluate_accuracy(model, dev_split, cfg.batch),
            test_accuracy=evaluate_accuracy(model, test_split, cfg.batch),
            best_epoch=result.best_epoch,
            epochs=len(result.history),
            stopped_early=result.stopped_early,
            config=config,
            extra={"glove_coverage": round(embeddings.coverage, 6), "vocab_size": len(vocab)},
        )
        tracker.end_run(metrics)
        return metrics

    def cmd_eval(self) -> float:
        model, splits, vocab, _ = self.restore()
        split = encode_split(splits.split(self.cfg.split), vocab)
        accuracy = evaluate_accuracy(model, split, self.cfg.batch)
        logger.info(f"{self.cfg.split} accuracy of {self.cfg.checkpoint_path}: {accuracy:.4f}")
        print(f"{self.cfg.split} accuracy: {accuracy:.4f}")
        return accuracy

    def support_table(self, model: TextClassifier, splits: DatasetSplits, vocab: Vocab) -> FeatureSupportTable:
        """The q(c|f) table of `--support-table` if present, otherwise estimated on the dev texts."""
        path = self.cfg.support_table
        if path is not None and Path(path).is_file():
            table = load_table(path)
            if table.d != model.d or list(table.categories) != list(splits.categories):
                raise UsageError(
                    f"support table {path} covers {table.d} features over {table.categories}, "
                    f"the model has {model.d} features over {list(splits.categories)}"
                )
            if table.delta != self.cfg.delta:
                logger.warning(f"Support table {path} was estimated with delta {table.delta}, using it as is")
            return table
        texts = [vocab.encode(example.tokens) for example in splits.dev]
        table = estimate_feature_support(
            model, texts, splits.categories, delta=self.cfg.delta, batch_size=self.cfg.batch, progress=self.cfg.progress
        )
        save_table(table, path or self.cfg.report_dir / f"{self.cfg.run_name}.support.json")
        return table

    def _category_index(self, categories: Tuple[str, ...]) -> Optional[int]:
        if self.cfg.category is None:
            return None
        if self.cfg.category not in categories:
            raise UsageError(f"unknown category {self.cfg.category!r}; expected one of {', '.join(categories)}")
        return categories.index(self.cfg.category)

    def _report_examples(
        self, model: TextClassifier, splits: DatasetSplits, vocab: Vocab, category: Optional[int]
    ) -> List[Tuple[List[str], Optional[int]]]:
        if self.cfg.text is not None:
            tokens = tokenize(self.cfg.text)
            if not tokens:
                raise UsageError("the text to interpret is empty")
            return [(tokens, None)]
        examples: List[Example] = splits.split(self.cfg.split)
        if category is None:
            chosen = examples[:REPORT_TEXTS]
        else:
            encoded = EncodedSplit(
                ids=[vocab.encode(e.tokens) for e in examples], labels=np.array([e.label for e in examples])
            )
            chosen = [examples[i] for i in texts_predicted_as(model, encoded, category, limit=REPORT_TEXTS)]
        if not chosen:
            raise DataError(f"no {self.cfg.split} texts to interpret")
        return [(e.tokens, e.label) for e in chosen]

    def cmd_interpret(self) -> Path:
        model, splits, vocab, _ = self.restore()
        if not self.cfg.is_dolfin:
            raise UsageError(f"{self.cfg.model} has no latent features to interpret")
        categories = splits.categories
        category = self._category_index(categories)
        table = self.support_table(model, splits, vocab)
        fmt = self.cfg.format

        feature_labels = [f"f{j}" for j in range(table.d)]
        flat = near_uniform_features(table)
        sections = [
            ("q(c|f)", render_heatmap(table.q.T, feature_labels, categories, fmt)),
            ("Near-uniform features", ", ".join(feature_labels[j] for j in flat) or "none"),
        ]
        subscripts: List[Tuple[WordSupport, str, str]] = []
        for k, (tokens, gold) in enumerate(self._report_examples(model, splits, vocab, category)):
            ws = word_support(model, table, vocab.encode(tokens), tokens)
            predicted = categories[ws.predicted]
            sections.append(
                (f"Text {k + 1}: q(c|w,s), predicted {predicted}", render_highlight(ws, categories, category, fmt))
            )
            sections.append((f"Text {k + 1}: p(f|w,s)", render_heatmap(ws.p, tokens, feature_labels, fmt)))
            subscripts.append((ws, categories[gold] if gold is not None else "?", predicted))
        sections.append(("Most probable feature per word", render_feature_subscripts(subscripts, fmt)))

        title = f"{self.cfg.run_name}: latent-feature interpretation"
        if fmt == "html":
            document, suffix = html_report(title, sections), "html"
        else:
            document, suffix = ansi_report(title, sections), "txt"
            print(document)
        path = self.cfg.report_dir / f"{self.cfg.run_name}.interpret.{suffix}"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(document, encoding="utf-8")
        logger.info(f"Wrote interpretation report to {path}")
        return path

    def cmd_gradcheck(self) -> SuiteReport:
        report = run_suite(seeds=range(self.cfg.seed, self.cfg.seed + GRADCHECK_SEEDS))
        for line in report.lines():
            print(line)
        if not report.passed:
            raise NumericError(f"gradient check failed for: {', '.join(report.failures)}")
        return report

    def run(self):
        commands = {
            "train": self.cmd_train,
            "eval": self.cmd_eval,
            "interpret": self.cmd_interpret,
            "gradcheck": self.cmd_gradcheck,
        }
        return commands[self.cfg.command]()
