import numpy as np
import pytest

from src.components.data.batching import make_batch
from src.components.encoders.base import EncodedSequence
from src.components.models.bolf import (
    BagVector,
    BolfParams,
    LatentDistribution,
    classify,
    compose_text_vector,
    latent_distributions,
    truncated_sum,
)
from src.components.models.factory import build_model
from src.config.models import EncoderConfig
from src.core.errors import DimensionError
from src.core.gradcheck import finite_diff_check
from src.core.ops import cross_entropy, sum_all, mul
from src.core.tensor import constant

D_ENC, D, D_S, M = 5, 4, 6, 3


@pytest.fixture
def params(rng):
    return BolfParams.create(D_ENC, D, D_S, M, rng, np.float64)


def _seq(values) -> EncodedSequence:
    values = np.asarray(values, dtype=np.float64)
    return EncodedSequence(vectors=constant(values), d_enc=values.shape[-1], kind="conv")


def _model(architecture, rng, d=D):
    embedding = rng.uniform(-0.5, 0.5, (9, 4))
    embedding[0] = 0.0
    cfg = EncoderConfig(filter_sizes=(2, 3), filters_per_size=3, lstm_hidden=3)
    return build_model(architecture, embedding, M, cfg, d=d, d_s=D_S, dropout=0.5, rng=rng, dtype=np.float64)


def test_zero_lsl_gives_uniform_rows(params, rng):
    params.lsl_weight.data[:] = 0.0
    params.lsl_bias.data[:] = 0.0
    u = latent_distributions(_seq(rng.standard_normal((3, D_ENC))), params).u.data
    np.testing.assert_allclose(u, 1.0 / D)


def test_rows_sum_to_one(params, rng):
    u = latent_distributions(_seq(rng.standard_normal((6, D_ENC)) * 4), params).u.data
    np.testing.assert_allclose(u.sum(axis=-1), 1.0, atol=1e-12)


def test_width_mismatch(params, rng):
    with pytest.raises(DimensionError):
        latent_distributions(_seq(rng.standard_normal((3, D_ENC + 1))), params)


def test_single_word_bag_is_its_distribution():
    u = np.array([[0.1, 0.6, 0.3]])
    np.testing.assert_array_equal(truncated_sum(LatentDistribution(constant(u))).r.data, u[0])


def test_saturated_slot_is_truncated():
    u = np.array([[0.9, 0.1], [0.8, 0.2], [0.6, 0.4]])
    np.testing.assert_allclose(truncated_sum(LatentDistribution(constant(u))).r.data, [1.0, 0.7])


def test_truncated_sum_matches_recomputation(rng):
    u = rng.dirichlet(np.ones(10), size=5)
    r = truncated_sum(LatentDistribution(constant(u))).r.data
    expected = [min(1.0, sum(u[i, j] for i in range(5))) for j in range(10)]
    np.testing.assert_allclose(r, expected, atol=1e-15)


def test_bag_ignores_word_order(rng):
    u = rng.dirichlet(np.ones(6), size=4)
    r = truncated_sum(LatentDistribution(constant(u))).r.data
    shuffled = truncated_sum(LatentDistribution(constant(u[rng.permutation(4)]))).r.data
    np.testing.assert_allclose(shuffled, r, atol=1e-15)


def test_duplicating_a_word_never_lowers_the_bag(rng):
    u = rng.dirichlet(np.ones(5), size=1)
    single = truncated_sum(LatentDistribution(constant(u))).r.data
    double = truncated_sum(LatentDistribution(constant(np.vstack([u, u])))).r.data
    assert np.all(double >= single)


def test_masked_positions_add_no_mass():
    u = np.array([[[0.5, 0.5], [0.9, 0.1]]])
    r = truncated_sum(LatentDistribution(constant(u), mask=np.array([[True, False]]))).r.data
    np.testing.assert_array_equal(r, [[0.5, 0.5]])


def test_zero_bag_gives_zero_text_vector(params):
    s = compose_text_vector(BagVector(constant(np.zeros(D))), params).data
    np.testing.assert_array_equal(s, np.zeros(D_S))


def test_one_hot_bag_selects_feature_vector(params):
    r = np.zeros(D)
    r[2] = 1.0
    s = compose_text_vector(BagVector(constant(r)), params).data
    np.testing.assert_allclose(s, np.maximum(params.feature_table.data[2], 0.0))


def test_zero_classifier_is_uniform(params, rng):
    params.classifier.weight.data[:] = 0.0
    params.classifier.bias.data[:] = 0.0
    p = classify(constant(rng.standard_normal(D_S)), params).data
    np.testing.assert_allclose(p, 1.0 / M)


@pytest.mark.parametrize("architecture", ["dolfin-conv", "dolfin-bilstm"])
def test_run_outputs_are_valid(architecture, rng, tiny_batch):
    model = _model(architecture, rng)
    out = model.run(tiny_batch)
    assert out.logits.shape == (3, M)
    assert np.all((out.r >= 0.0) & (out.r <= 1.0))
    assert [u.shape for u in out.u] == [(4, D), (2, D), (3, D)]
    for u in out.u:
        np.testing.assert_allclose(u.sum(axis=-1), 1.0, atol=1e-9)
    np.testing.assert_allclose(model.predict_proba(tiny_batch).sum(axis=-1), 1.0, atol=1e-9)


def test_batched_conv_matches_one_text_at_a_time(rng, tiny_batch):
    model = _model("dolfin-conv", rng)
    batched = model.run(tiny_batch)
    for i, n in enumerate(tiny_batch.lengths):
        alone = model.run(make_batch([tiny_batch.ids[i, :n]]))
        np.testing.assert_allclose(alone.logits.data[0], batched.logits.data[i], atol=1e-12)
        np.testing.assert_allclose(alone.r[0], batched.r[i], atol=1e-12)


def test_dropout_only_at_train_time(rng, tiny_batch):
    model = _model("dolfin-conv", rng)
    eval_a = model.logits(tiny_batch).data
    eval_b = model.logits(tiny_batch).data
    np.testing.assert_array_equal(eval_a, eval_b)
    train = model.logits(tiny_batch, training=True, rng=np.random.default_rng(3)).data
    assert not np.allclose(train, eval_a)


@pytest.mark.parametrize("seed", range(5))
def test_end_to_end_gradient_on_three_words(seed):
    rng = np.random.default_rng(seed)
    model = _model("dolfin-conv", rng)
    batch = make_batch([np.array([3, 1, 5])], labels=np.array([2]))
    # feature table through the whole head, then the composition alone
    table = model.params.feature_table

    def f(t):
        model.params.feature_table = t
        try:
            return cross_entropy(model.logits(batch), batch.labels)
        finally:
            model.params.feature_table = table

    assert finite_diff_check(f, constant(table.data.copy())) < 1e-4
    assert finite_diff_check(
        lambda r: sum_all(mul(compose_text_vector(BagVector(r), model.params), constant(np.ones(D_S)))),
        constant(rng.uniform(0, 1, D)),
    ) < 1e-4
