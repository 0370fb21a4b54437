"""
Command line: python -m src.main {train,eval,interpret,gradcheck} [flags]

Every flag mirrors a RunConfig field. Values are resolved as
flags > --config file > environment (DOLFIN_*) > defaults.
Exit codes: 0 success, 1 usage, 2 data, 3 numeric failure.
"""
import argparse
import logging
from pathlib import Path
import sys
from typing import Any, Dict, List, Optional

import pydantic

from src.config.models import RunConfig
from src.config.settings import Settings
from src.core.errors import DataError, DimensionError, NumericError, UsageError

logger = logging.getLogger(__name__)

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="file of 'key = value' lines, overridden by flags")
    parser.add_argument("--dataset", choices=["trec", "sst2", "agnews"])
    parser.add_argument("--model", choices=["cnn", "bilstm", "dolfin-conv", "dolfin-bilstm"])
    parser.add_argument("--d", type=int, help="number of latent features (default 20/10/100 per dataset)")
    parser.add_argument("--d-s", dest="d_s", type=int, help="width of the text vector")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--dtype", choices=["float32", "float64"])
    parser.add_argument("--delta", type=float, help="firing threshold for q(c|f) estimation")
    parser.add_argument("--data-dir", dest="data_dir", type=Path)
    parser.add_argument("--glove", type=Path, help="GloVe text file (300d)")
    parser.add_argument("--checkpoint", type=Path)
    parser.add_argument("--checkpoint-dir", dest="checkpoint_dir", type=Path)
    parser.add_argument("--report-dir", dest="report_dir", type=Path)
    parser.add_argument("--support-table", dest="support_table", type=Path)
    parser.add_argument("--split", choices=["train", "dev", "test"])
    parser.add_argument("--text", help="text to interpret instead of split examples")
    parser.add_argument("--category", help="category label to highlight / select texts by")
    parser.add_argument("--format", choices=["html", "ansi"])
    parser.add_argument("--train-limit", dest="train_limit", type=int, help="train on a fixed subsample")
    parser.add_argument("--no-progress", dest="progress", action="store_false")
    parser.add_argument("--lr", type=float)
    parser.add_argument("--batch", type=int)
    parser.add_argument("--patience", type=int)
    parser.add_argument("--dropout", type=float)
    parser.add_argument("--max-epochs", dest="max_epochs", type=int)
    parser.add_argument("--filter-sizes", dest="filter_sizes", help="comma-separated window widths")
    parser.add_argument("--filters-per-size", dest="filters_per_size", type=int)
    parser.add_argument("--lstm-hidden", dest="lstm_hidden", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="python -m src.main", description="Interpretable text classification with latent features")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (
        ("train", "train a model and write its checkpoint and metrics"),
        ("eval", "accuracy of a checkpoint on one split"),
        ("interpret", "highlight word support and feature heatmaps"),
        ("gradcheck", "finite-difference check of every op and architecture"),
    ):
        # unset flags stay out of the namespace so lower-priority sources can fill them
        _add_run_flags(commands.add_parser(name, help=help_text, argument_default=argparse.SUPPRESS))
    return parser


def read_config_file(path: Path) -> Dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise DataError("config file not found", path)
    values = {}
    for line_number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise UsageError(f"{path}:{line_number}: expected 'key = value'")
        if key not in RunConfig.model_fields or key == "command":
            raise UsageError(f"{path}:{line_number}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def settings_values(settings: Settings) -> Dict[str, Any]:
    values = {
        "data_dir": settings.data_dir,
        "glove": settings.glove_path,
        "checkpoint_dir": settings.checkpoint_dir,
        "report_dir": settings.report_dir,
    }
    return {key: value for key, value in values.items() if value}


def resolve_config(argv: Optional[List[str]] = None, settings: Optional[Settings] = None) -> RunConfig:
    args = vars(build_parser().parse_args(argv))
    merged: Dict[str, Any] = settings_values(settings or Settings())
    config_path = args.pop("config", None)
    if config_path is not None:
        merged.update(read_config_file(config_path))
    merged.update(args)
    return RunConfig(**merged)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        cfg = resolve_config(argv)
        # imported here so that `--help` and usage errors skip loading the models
        from src.orchestrator.coordinator import Coordinator

        Coordinator(cfg).run()
    except (UsageError, DimensionError, pydantic.ValidationError) as e:
        logger.error(f"usage: {e}")
        return EXIT_USAGE
    except (DataError, FileNotFoundError) as e:
        logger.error(f"data error: {e}")
        return EXIT_DATA
    except NumericError as e:
        logger.error(f"numeric failure: {e}")
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
