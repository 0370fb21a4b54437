from typing import Optional

import numpy as np

from src.components.encoders.base import Encoder
from src.components.encoders.bilstm import BiLSTMEncoder
from src.components.encoders.conv import ConvEncoder
from src.components.models.baselines import BiLSTMClassifier, CNNClassifier
from src.components.models.base import TextClassifier
from src.components.models.bolf import DolfinClassifier
from src.config.models import EncoderConfig
from src.core.errors import UsageError
from src.core.tensor import Tensor

ARCHITECTURES = ("cnn", "bilstm", "dolfin-conv", "dolfin-bilstm")


def encoder_kind(architecture: str) -> str:
    return "bilstm" if architecture.endswith("bilstm") else "conv"


def build_encoder(cfg: EncoderConfig, input_width: int, rng: np.random.Generator, dtype) -> Encoder:
    if cfg.kind == "conv":
        return ConvEncoder(input_width, cfg, rng, dtype)
    return BiLSTMEncoder(input_width, cfg, rng, dtype)


def build_model(
    architecture: str,
    embedding: np.ndarray,
    num_categories: int,
    encoder_cfg: EncoderConfig,
    d: Optional[int],
    d_s: int,
    dropout: float,
    rng: np.random.Generator,
    dtype=np.float32,
    trainable_embedding: bool = True,
) -> TextClassifier:
    if architecture not in ARCHITECTURES:
        raise UsageError(f"unknown architecture {architecture!r}; expected one of {', '.join(ARCHITECTURES)}")
    if encoder_cfg.kind != encoder_kind(architecture):
        encoder_cfg = encoder_cfg.model_copy(update={"kind": encoder_kind(architecture)})
    table = Tensor(embedding, requires_grad=trainable_embedding, dtype=dtype)
    encoder = build_encoder(encoder_cfg, table.shape[1], rng, dtype)
    if architecture == "cnn":
        return CNNClassifier(table, encoder, num_categories, dropout, rng)
    if architecture == "bilstm":
        return BiLSTMClassifier(table, encoder, num_categories, dropout, rng)
    if d is None:
        raise UsageError(f"{architecture} needs the number of latent features d")
    return DolfinClassifier(table, encoder, num_categories, d, d_s, dropout, rng)
