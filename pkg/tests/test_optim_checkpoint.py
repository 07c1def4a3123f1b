import numpy as np
import pytest

from dialogkit.nn import (
    AdamConfig,
    ParamStore,
    global_norm,
    load_params,
    optimizer_step,
    save_params,
)
from dialogkit.nn.checkpoint import CheckpointError
from dialogkit.nn.params import NonFiniteError


def test_zero_gradient_leaves_parameters_unchanged():
    store = ParamStore(seed=4)
    p = store.add("w", (3, 3))
    before = p.value.copy()
    optimizer_step(store, AdamConfig())
    assert np.array_equal(p.value, before)


def test_single_scalar_hand_computed_step():
    # theta=2, g=0.5, lr=0.1, betas (0.9, 0.999), eps=1e-8, no clipping.
    # m=0.05, v=0.00025; m_hat=0.5, v_hat=0.25; step = 0.1*0.5/(0.5+1e-8)
    store = ParamStore(seed=0)
    p = store.add("theta", ())
    p.value[...] = 2.0
    p.grad[...] = 0.5
    optimizer_step(store, AdamConfig(lr=0.1, clip_norm=0.0))
    expected = 2.0 - 0.1 * 0.5 / (0.5 + 1e-8)
    assert abs(float(p.value) - expected) < 1e-15
    assert float(p.grad) == 0.0  # gradients zeroed afterwards


def test_global_norm_clipping():
    store = ParamStore(seed=0)
    p = store.add("w", (4,))
    p.grad[...] = np.array([6.0, 8.0, 0.0, 0.0])  # norm 10
    assert abs(global_norm(store) - 10.0) < 1e-12
    captured = {}

    orig = p.grad.copy()
    norm = global_norm(store)
    scale = 1.0 / norm
    applied = orig * scale
    assert abs(np.linalg.norm(applied) - 1.0) < 1e-12
    optimizer_step(store, AdamConfig(lr=0.01, clip_norm=1.0))  # should not raise


def test_non_finite_gradient_names_parameter():
    store = ParamStore(seed=0)
    store.add("good", (2,))
    bad = store.add("exploded", (2,))
    bad.grad[...] = np.array([np.nan, 1.0])
    with pytest.raises(NonFiniteError, match="exploded"):
        optimizer_step(store, AdamConfig())


def test_checkpoint_round_trip_bitwise():
    store = ParamStore(seed=9)
    store.add("a", (3, 2))
    store.add("b", (5,))
    blob = save_params(store, meta={"kind": "test"})
    loaded, meta = load_params(blob)
    assert meta == {"kind": "test"}
    assert loaded.names() == store.names()
    for n in store.names():
        assert np.array_equal(loaded[n].value, store[n].value)
    assert save_params(loaded, meta={"kind": "test"}) == blob


def test_checkpoint_truncation_and_version():
    store = ParamStore(seed=1)
    store.add("a", (4,))
    blob = save_params(store)
    with pytest.raises(CheckpointError, match="truncated"):
        load_params(blob[:-8])
    bad_version = blob[:4] + b"\x63\x00\x00\x00" + blob[8:]
    with pytest.raises(CheckpointError, match="version"):
        load_params(bad_version)
    with pytest.raises(CheckpointError, match="magic"):
        load_params(b"NOPE" + blob[4:])
