import numpy as np
import pytest

from isofno import darcy
from isofno.errors import ConfigurationError, ShapeError
from isofno.grid import GroupElement, apply_group
from isofno.model import ModelConfig, forward, init_parameters
from isofno.training import METRIC_COLUMNS, AdamState, TrainConfig, adam_step, cosine_lr, fit_normalization, train


@pytest.fixture(scope="module")
def tiny_data():
    return darcy.generate_dataset(6, 0, 16), darcy.generate_dataset(2, 100, 16)


def test_cosine_schedule():
    cfg = TrainConfig(epochs=100)
    assert cosine_lr(0, cfg) == pytest.approx(0.001)
    assert cosine_lr(50, cfg) == pytest.approx(0.0005)
    assert cosine_lr(100, cfg) == pytest.approx(0.0, abs=1e-18)
    assert cosine_lr(100, TrainConfig(epochs=100, lr_min=1e-5)) == pytest.approx(1e-5)
    lrs = [cosine_lr(e, cfg) for e in range(101)]
    assert all(a >= b for a, b in zip(lrs, lrs[1:]))
    with pytest.raises(ValueError):
        cosine_lr(101, cfg)


def test_train_config_validation():
    with pytest.raises(ConfigurationError):
        TrainConfig(epochs=0)
    with pytest.raises(ConfigurationError):
        TrainConfig(lr0=1e-4, lr_min=1e-3)


def _params():
    cfg = ModelConfig("standard", 3, 2, 1, projection_hidden=4)
    return init_parameters(cfg, 0)


def test_adam_zero_gradient_no_decay():
    p = _params()
    tc = TrainConfig(weight_decay=0.0)
    q, state = adam_step(p, p.zeros_like(), AdamState.zeros(p.size), 1e-3, tc)
    assert np.array_equal(q.to_vector(), p.to_vector())
    assert state.step == 1


def test_adam_first_step_is_lr_sign():
    p = _params()
    tc = TrainConfig(weight_decay=0.0)
    g = np.random.default_rng(0).standard_normal(p.size)
    q, _ = adam_step(p, p.with_vector(g), AdamState.zeros(p.size), 1e-3, tc)
    np.testing.assert_allclose(q.to_vector() - p.to_vector(), -1e-3 * np.sign(g), rtol=0, atol=1e-8)


def test_adam_weight_decay_is_decoupled():
    p = _params()
    tc = TrainConfig(weight_decay=0.1)
    q, _ = adam_step(p, p.zeros_like(), AdamState.zeros(p.size), 1e-2, tc)
    np.testing.assert_allclose(q.to_vector(), p.to_vector() * (1 - 1e-3), rtol=1e-15)


def test_adam_shape_check():
    p = _params()
    with pytest.raises(ShapeError):
        adam_step(p, p.zeros_like(), AdamState.zeros(3), 1e-3, TrainConfig())


def test_fit_normalization():
    rng = np.random.default_rng(1)
    samples = [(rng.standard_normal((4, 4)) * 2 + 1, rng.standard_normal((4, 4))) for _ in range(3)]
    p = fit_normalization(_params(), samples)
    a = np.stack([s[0] for s in samples])
    assert p.a_mean == pytest.approx(a.mean()) and p.a_std == pytest.approx(a.std())


def test_single_partial_batch(tiny_data):
    train_set, test_set = tiny_data
    cfg = ModelConfig("iso", 4, 3, 2, projection_hidden=8)
    seen = []

    def cb(epoch, params, row):
        seen.append((epoch, row.copy()))

    params, history = train(TrainConfig(epochs=1, batch_size=20), cfg, train_set[:4], test_set, callback=cb)
    assert history.shape == (1, len(METRIC_COLUMNS))
    assert len(seen) == 1 and np.array_equal(seen[0][1], history[0])
    # exactly one Adam step was taken: every weight moved by at most ~lr
    start = init_parameters(cfg, 0).to_vector()
    assert np.abs(params.to_vector() - start).max() <= 1.0001e-3


def test_training_is_deterministic(tiny_data):
    train_set, test_set = tiny_data
    cfg = ModelConfig("standard", 4, 3, 2, projection_hidden=8)
    tc = TrainConfig(epochs=2, batch_size=4, seed=3)
    p1, h1 = train(tc, cfg, train_set, test_set)
    p2, h2 = train(tc, cfg, train_set, test_set)
    assert np.array_equal(p1.to_vector(), p2.to_vector())
    assert np.array_equal(h1, h2)


def test_training_reduces_loss():
    train_set, test_set = darcy.generate_dataset(8, 0, 32), darcy.generate_dataset(2, 100, 32)
    cfg = ModelConfig("iso", 8, 6, 2, projection_hidden=16, padding=4)
    _, history = train(TrainConfig(epochs=20, batch_size=2, lr0=3e-3), cfg, train_set, test_set)
    assert history[-1, 0] < 0.5 * history[0, 0]


def test_trained_iso_model_stays_equivariant(tiny_data):
    train_set, test_set = tiny_data
    cfg = ModelConfig("iso", 4, 3, 2, projection_hidden=8, padding=2)
    params, _ = train(TrainConfig(epochs=2, batch_size=3), cfg, train_set, test_set)
    a = train_set[0].a
    u = forward(cfg, params, a)
    for g in (GroupElement.FLIP_X, GroupElement.ROT90, GroupElement.ANTI_TRANSPOSE):
        assert np.abs(forward(cfg, params, apply_group(g, a)) - apply_group(g, u)).max() < 1e-9


def test_mixed_resolutions_rejected(tiny_data):
    train_set, _ = tiny_data
    other = darcy.generate_dataset(1, 0, 32)
    with pytest.raises(ConfigurationError):
        train(TrainConfig(epochs=1), ModelConfig("iso", 4, 3, 1), train_set, other)
