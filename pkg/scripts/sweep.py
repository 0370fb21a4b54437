"""
Train every requested model over several seeds and report mean and sample standard
deviation of the test accuracy, as JSON and CSV under the report directory.

    PYTHONPATH=. python scripts/sweep.py --dataset trec --models cnn dolfin-conv \
        --data-dir data --glove glove.840B.300d.txt
"""
import argparse
import json
import logging
from pathlib import Path

import pandas as pd

from src.components.evaluation.accuracy import summarize_runs
from src.config.models import RunConfig
from src.orchestrator.coordinator import Coordinator

logger = logging.getLogger(__name__)


def sweep(base: dict, models, seeds, report_dir: Path) -> pd.DataFrame:
    runs = []
    for model in models:
        for seed in seeds:
            cfg = RunConfig(command="train", model=model, seed=seed, report_dir=report_dir, **base)
            metrics = Coordinator(cfg).cmd_train()
            runs.append({
                "model": model,
                "seed": seed,
                "dev_accuracy": metrics.dev_accuracy,
                "test_accuracy": metrics.test_accuracy,
                "epochs": metrics.epochs,
            })
    return pd.DataFrame(runs)


def summarize(runs: pd.DataFrame) -> dict:
    summary = {}
    for model, group in runs.groupby("model", sort=False):
        mean, std = summarize_runs(group["test_accuracy"].tolist())
        summary[model] = {"runs": len(group), "test_accuracy_mean": mean, "test_accuracy_std": std}
        logger.info(f"{model}: {100 * mean:.2f} +- {100 * std:.2f} over {len(group)} runs")
    return summary


def main():
    parser = argparse.ArgumentParser(description="Five-seed accuracy sweep")
    parser.add_argument("--dataset", choices=["trec", "sst2", "agnews"], required=True)
    parser.add_argument("--models", nargs="+", default=["cnn", "dolfin-conv"])
    parser.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    parser.add_argument("--data-dir", type=Path, required=True)
    parser.add_argument("--glove", type=Path)
    parser.add_argument("--train-limit", type=int)
    parser.add_argument("--report-dir", type=Path, default=Path("reports"))
    args = parser.parse_args()

    base = {"dataset": args.dataset, "data_dir": args.data_dir, "glove": args.glove,
            "train_limit": args.train_limit, "progress": False}
    runs = sweep(base, args.models, args.seeds, args.report_dir)
    summary = summarize(runs)

    args.report_dir.mkdir(parents=True, exist_ok=True)
    runs.to_csv(args.report_dir / f"{args.dataset}.sweep.csv", index=False, float_format="%.6f")
    with open(args.report_dir / f"{args.dataset}.sweep.json", "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    print(json.dumps(summary, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
