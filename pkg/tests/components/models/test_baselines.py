import numpy as np
import pytest

from src.components.data.batching import make_batch
from src.components.models.factory import ARCHITECTURES, build_model
from src.config.models import EncoderConfig
from src.core.errors import UsageError

NUM_CATEGORIES = 4


def _model(architecture, rng, d=3):
    embedding = rng.uniform(-0.5, 0.5, (8, 4))
    embedding[0] = 0.0
    cfg = EncoderConfig(filter_sizes=(3, 4), filters_per_size=2, lstm_hidden=3)
    return build_model(architecture, embedding, NUM_CATEGORIES, cfg, d=d, d_s=5, dropout=0.5, rng=rng,
                       dtype=np.float64)


@pytest.mark.parametrize("architecture", ["cnn", "bilstm"])
def test_zero_output_layer_is_uniform(architecture, rng, tiny_batch):
    model = _model(architecture, rng)
    model.head.weight.data[:] = 0.0
    model.head.bias.data[:] = 0.0
    np.testing.assert_allclose(model.predict_proba(tiny_batch), 1.0 / NUM_CATEGORIES)


@pytest.mark.parametrize("architecture", ARCHITECTURES)
def test_padding_does_not_change_predictions(architecture, rng):
    model = _model(architecture, rng)
    short = np.array([2, 5])
    alone = model.predict_proba(make_batch([short]))[0]
    padded = model.predict_proba(make_batch([short, np.array([1, 3, 4, 6, 7, 2])]))[0]
    np.testing.assert_allclose(padded, alone, atol=1e-12)


@pytest.mark.parametrize("architecture", ARCHITECTURES)
def test_parameters_start_with_the_embedding(architecture, rng):
    names = list(_model(architecture, rng).parameters())
    assert names[0] == "embedding"
    assert names[-2:] == ["classifier.weight", "classifier.bias"]


def test_cnn_text_width_is_all_filters(rng):
    model = _model("cnn", rng)
    assert model.head.weight.shape == (4, NUM_CATEGORIES)
    assert model.dimensions() == {"d_s": 4}


def test_bilstm_text_width_is_both_directions(rng):
    assert _model("bilstm", rng).head.weight.shape == (6, NUM_CATEGORIES)


def test_predict_breaks_ties_towards_lowest_index(rng, tiny_batch):
    model = _model("cnn", rng)
    model.head.weight.data[:] = 0.0
    model.head.bias.data[:] = 0.0
    np.testing.assert_array_equal(model.predict(tiny_batch), [0, 0, 0])


def test_unknown_architecture(rng):
    with pytest.raises(UsageError, match="unknown architecture"):
        _model("transformer", rng)


def test_dolfin_needs_feature_count(rng):
    with pytest.raises(UsageError):
        _model("dolfin-conv", rng, d=None)


def test_encoder_kind_follows_architecture(rng):
    assert _model("dolfin-bilstm", rng).encoder.kind == "bilstm"
    assert _model("cnn", rng).encoder.kind == "conv"
