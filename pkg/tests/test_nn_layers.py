import math

import numpy as np
import pytest

from dialogkit.nn import (
    BiLstm,
    Embedding,
    Linear,
    Lstm,
    ParamStore,
    finite_diff_check,
    softmax,
    softmax_xent,
)
from dialogkit.nn.layers import mean_pool, mean_pool_backward


def test_lstm_zero_weights_gives_zero_states():
    store = ParamStore(seed=0)
    lstm = Lstm(store, "l", 3, 4)
    for p in store.params.values():
        p.value[...] = 0.0
    x = np.zeros((2, 5, 3))
    hs, (h, c), _ = lstm.forward(x)
    # i=f=o=0.5, g=tanh(0)=0 -> c=0, h=0 at every step
    assert np.allclose(hs, 0.0)
    assert np.allclose(h, 0.0)
    assert np.allclose(c, 0.0)


def _hand_lstm_step(x, h_prev, c_prev, Wx, Wh, b, H):
    """Scalar-arithmetic evaluation of one cell step (the oracle)."""

    def sig(v):
        return 1.0 / (1.0 + math.exp(-v))

    z = [sum(x[k] * Wx[k][j] for k in range(len(x))) + sum(h_prev[k] * Wh[k][j] for k in range(H)) + b[j]
         for j in range(4 * H)]
    i = [sig(z[j]) for j in range(H)]
    f = [sig(z[H + j]) for j in range(H)]
    g = [math.tanh(z[2 * H + j]) for j in range(H)]
    o = [sig(z[3 * H + j]) for j in range(H)]
    c = [f[j] * c_prev[j] + i[j] * g[j] for j in range(H)]
    h = [o[j] * math.tanh(c[j]) for j in range(H)]
    return h, c


def test_lstm_single_step_matches_hand_evaluation():
    store = ParamStore(seed=7)
    lstm = Lstm(store, "l", 2, 2)
    Wx = [[0.1, -0.2, 0.3, 0.0, 0.5, -0.1, 0.2, 0.4],
          [-0.3, 0.1, 0.0, 0.2, -0.5, 0.3, 0.1, -0.2]]
    Wh = [[0.2, 0.1, -0.1, 0.3, 0.0, 0.2, -0.3, 0.1],
          [0.0, -0.2, 0.4, 0.1, 0.2, -0.1, 0.0, 0.3]]
    b = [0.1, -0.1, 1.0, 1.0, 0.0, 0.2, -0.2, 0.1]
    lstm.Wx.value[...] = np.array(Wx)
    lstm.Wh.value[...] = np.array(Wh)
    lstm.b.value[...] = np.array(b)
    x = [0.7, -0.4]
    expect_h, expect_c = _hand_lstm_step(x, [0.0, 0.0], [0.0, 0.0], Wx, Wh, b, 2)
    hs, (h, c), _ = lstm.forward(np.array(x).reshape(1, 1, 2))
    assert np.allclose(h[0], expect_h, atol=1e-12)
    assert np.allclose(c[0], expect_c, atol=1e-12)
    assert np.allclose(hs[0, 0], expect_h, atol=1e-12)


def test_bilstm_concatenates_directions():
    store = ParamStore(seed=1)
    h = 5
    bi = BiLstm(store, "b", 3, h)
    x = np.random.default_rng(0).normal(size=(2, 3, 3))
    hs, _, _ = bi.forward(x)
    assert hs.shape == (2, 3, 2 * h)


def test_lstm_empty_input():
    store = ParamStore(seed=0)
    lstm = Lstm(store, "l", 3, 4)
    hs, (h, c), cache = lstm.forward(np.zeros((2, 0, 3)))
    assert hs.shape == (2, 0, 4)
    assert np.allclose(h, 0.0) and np.allclose(c, 0.0)
    dx = lstm.backward(cache, None)
    assert dx.shape == (2, 0, 3)


def test_lstm_masked_rows_match_short_sequences():
    store = ParamStore(seed=3)
    lstm = Lstm(store, "l", 2, 3)
    rng = np.random.default_rng(5)
    x = rng.normal(size=(1, 4, 2))
    short, (h_short, c_short), _ = lstm.forward(x[:, :2, :])
    mask = np.array([[1.0, 1.0, 0.0, 0.0]])
    padded, (h_pad, c_pad), _ = lstm.forward(x, mask)
    assert np.allclose(h_short, h_pad)
    assert np.allclose(c_short, c_pad)
    assert np.allclose(padded[:, :2], short)
    assert np.allclose(padded[:, 2:], 0.0)


def test_linear_softmax_uniform_on_zero_weights():
    store = ParamStore(seed=0)
    lin = Linear(store, "out", 4, 3)
    lin.W.value[...] = 0.0
    y, _ = lin.forward(np.array([1.0, 2.0, 3.0, 4.0]))
    p = softmax(y)
    assert np.allclose(p, [1 / 3] * 3, atol=1e-12)


def test_softmax_closed_form():
    p = softmax(np.array([math.log(2.0), 0.0]))
    assert np.allclose(p, [2 / 3, 1 / 3], atol=1e-12)


def test_softmax_sums_to_one():
    rng = np.random.default_rng(42)
    for _ in range(50):
        x = rng.normal(size=rng.integers(2, 8)) * rng.uniform(0.1, 50)
        assert abs(softmax(x).sum() - 1.0) < 1e-12


def test_gradcheck_linear_softmax():
    store = ParamStore(seed=11)
    lin = Linear(store, "out", 5, 4)
    x = np.random.default_rng(2).normal(size=(6, 5))
    gold = np.array([0, 1, 2, 3, 1, 0])

    def loss(s):
        y, cache = lin.forward(x)
        l, dy, _ = softmax_xent(y, gold)
        lin.backward(cache, dy)
        return l

    assert finite_diff_check(loss, store) < 1e-6


def test_gradcheck_lstm_masked():
    store = ParamStore(seed=13)
    lstm = Lstm(store, "l", 3, 4)
    proj = Linear(store, "p", 4, 2)
    rng = np.random.default_rng(3)
    x = rng.normal(size=(3, 4, 3))
    mask = np.array([[1, 1, 1, 1], [1, 1, 0, 0], [1, 0, 0, 0]], dtype=np.float64)
    gold = np.array([0, 1, 0])

    def loss(s):
        hs, (h, c), cache = lstm.forward(x, mask)
        y, pcache = proj.forward(h + hs.sum(axis=1))
        l, dy, _ = softmax_xent(y, gold)
        dh = proj.backward(pcache, dy)
        lstm.backward(cache, np.repeat(dh[:, None, :], 4, axis=1) * mask[:, :, None], dh_final=dh)
        return l

    assert finite_diff_check(loss, store, epsilon=1e-5) < 1e-6


def test_gradcheck_bilstm_embedding_pool():
    store = ParamStore(seed=17)
    emb = Embedding(store, "emb", 7, 3)
    bi = BiLstm(store, "b", 3, 3)
    out = Linear(store, "o", 6, 2)
    ids = np.array([[1, 2, 3], [4, 5, 0]])
    mask = np.array([[1, 1, 1], [1, 1, 0]], dtype=np.float64)
    gold = np.array([0, 1])

    def loss(s):
        vecs, ecache = emb.forward(ids)
        hs, _, bcache = bi.forward(vecs, mask)
        pooled, mcache = mean_pool(hs, mask)
        y, ocache = out.forward(pooled)
        l, dy, _ = softmax_xent(y, gold)
        dpooled = out.backward(ocache, dy)
        dhs = mean_pool_backward(mcache, dpooled)
        dvecs = bi.backward(bcache, dhs)
        emb.backward(ecache, dvecs)
        return l

    # relative error on near-zero coordinates is dominated by FD roundoff,
    # so this asserts the release-gate tolerance rather than a tighter one
    assert finite_diff_check(loss, store, epsilon=1e-5) < 1e-4


def test_gradcheck_quadratic_is_exact():
    store = ParamStore(seed=1)
    store.add("theta", (6,))

    def loss(s):
        th = s["theta"]
        th.grad += th.value
        return 0.5 * float(np.sum(th.value**2))

    assert finite_diff_check(loss, store) < 1e-9


def test_gradcheck_constant_loss_zero_grads():
    store = ParamStore(seed=1)
    store.add("theta", (4,))

    def loss(s):
        return 3.5

    assert finite_diff_check(loss, store) == 0.0
