from pathlib import Path
from typing import Literal, Optional, Tuple

import pydantic

DEFAULT_LATENT_FEATURES = {"trec": 20, "sst2": 10, "agnews": 100}

Dataset = Literal["trec", "sst2", "agnews"]
ModelKind = Literal["cnn", "bilstm", "dolfin-conv", "dolfin-bilstm"]
Command = Literal["train", "eval", "interpret", "gradcheck"]


class EncoderConfig(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(frozen=True)

    kind: Literal["conv", "bilstm"] = "conv"
    filter_sizes: Tuple[int, ...] = (3, 4, 5)
    filters_per_size: int = 100
    lstm_hidden: int = 100

    @pydantic.field_validator("filter_sizes")
    @classmethod
    def _positive_sizes(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if not value or any(size <= 0 for size in value):
            raise ValueError("filter sizes must be a non-empty list of positive integers")
        return value

    @pydantic.field_validator("filters_per_size", "lstm_hidden")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @property
    def output_width(self) -> int:
        if self.kind == "conv":
            return len(self.filter_sizes) * self.filters_per_size
        return 2 * self.lstm_hidden


class TrainConfig(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(frozen=True)

    lr: float = 0.001
    batch: int = 50
    patience: int = 10
    dropout: float = 0.5
    max_epochs: int = 100
    seed: int = 1

    @pydantic.field_validator("lr", "batch", "patience", "max_epochs")
    @classmethod
    def _positive(cls, value):
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @pydantic.field_validator("dropout")
    @classmethod
    def _rate(cls, value: float) -> float:
        if not 0.0 <= value < 1.0:
            raise ValueError("dropout rate must lie in [0, 1)")
        return value


class RunConfig(pydantic.BaseModel):
    command: Command = "train"
    dataset: Dataset = "trec"
    model: ModelKind = "dolfin-conv"
    d: Optional[int] = None
    d_s: int = 100
    seed: int = 1
    dtype: Literal["float32", "float64"] = "float32"
    delta: float = 0.5

    data_dir: Optional[Path] = None
    glove: Optional[Path] = None
    checkpoint: Optional[Path] = None
    checkpoint_dir: Path = Path("checkpoints")
    report_dir: Path = Path("reports")
    support_table: Optional[Path] = None

    split: Literal["train", "dev", "test"] = "test"
    text: Optional[str] = None
    category: Optional[str] = None
    format: Literal["html", "ansi"] = "html"
    train_limit: Optional[int] = None
    progress: bool = True

    lr: float = 0.001
    batch: int = 50
    patience: int = 10
    dropout: float = 0.5
    max_epochs: int = 100
    filter_sizes: Tuple[int, ...] = (3, 4, 5)
    filters_per_size: int = 100
    lstm_hidden: int = 100

    @pydantic.field_validator("delta")
    @classmethod
    def _delta_range(cls, value: float) -> float:
        if not 0.0 <= value <= 1.0:
            raise ValueError("delta must lie in [0, 1]")
        return value

    @pydantic.field_validator("d", "d_s", "train_limit")
    @classmethod
    def _positive(cls, value):
        if value is not None and value <= 0:
            raise ValueError("must be positive")
        return value

    @pydantic.field_validator("filter_sizes", mode="before")
    @classmethod
    def _parse_sizes(cls, value):
        if isinstance(value, str):
            return tuple(int(part) for part in value.replace(",", " ").split())
        return value

    @pydantic.model_validator(mode="after")
    def _default_latent_features(self) -> "RunConfig":
        if self.d is None:
            self.d = DEFAULT_LATENT_FEATURES[self.dataset]
        return self

    @property
    def run_name(self) -> str:
        return f"{self.dataset}-{self.model}-seed{self.seed}"

    @property
    def checkpoint_path(self) -> Path:
        return self.checkpoint or self.checkpoint_dir / f"{self.run_name}.ckpt"

    @property
    def is_dolfin(self) -> bool:
        return self.model.startswith("dolfin")

    def encoder_config(self) -> EncoderConfig:
        kind = "bilstm" if self.model.endswith("bilstm") else "conv"
        return EncoderConfig(
            kind=kind,
            filter_sizes=self.filter_sizes,
            filters_per_size=self.filters_per_size,
            lstm_hidden=self.lstm_hidden,
        )

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            lr=self.lr,
            batch=self.batch,
            patience=self.patience,
            dropout=self.dropout,
            max_epochs=self.max_epochs,
            seed=self.seed,
        )
