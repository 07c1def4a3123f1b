"""Layers with explicit forward caches and hand-derived backward passes.

All arrays are float64. Batched shapes:
  Embedding  ids [...]            -> vectors [..., d]
  Linear     x   [..., d_in]      -> y [..., d_out]
  Lstm       x   [B, L, d], mask [B, L] -> hs [B, L, h], final (h, c) [B, h]

The LSTM supports right-padded sequences: masked steps carry state through
unchanged, so the state at the last index equals the state at each row's last
real step, and rows whose mask is all zero yield zero states.
"""

from __future__ import annotations

import numpy as np

from .params import ParamStore


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def logsumexp(x: np.ndarray, axis: int = -1, keepdims: bool = False) -> np.ndarray:
    m = np.max(x, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    out = m + np.log(np.sum(np.exp(x - m), axis=axis, keepdims=True))
    return out if keepdims else np.squeeze(out, axis=axis)


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    m = np.max(x, axis=axis, keepdims=True)
    e = np.exp(x - m)
    return e / np.sum(e, axis=axis, keepdims=True)


def softmax_xent(logits: np.ndarray, gold: np.ndarray, weight: float = 1.0):
    """Mean cross-entropy over rows. Returns (loss, dlogits, probs)."""
    probs = softmax(logits, axis=-1)
    n = logits.shape[0]
    picked = probs[np.arange(n), gold]
    loss = -np.mean(np.log(np.maximum(picked, 1e-300))) * weight
    dlogits = probs.copy()
    dlogits[np.arange(n), gold] -= 1.0
    dlogits *= weight / n
    return loss, dlogits, probs


class Embedding:
    def __init__(self, store: ParamStore, name: str, rows: int, dim: int):
        self.E = store.add(name, (rows, dim))

    def forward(self, ids: np.ndarray):
        return self.E.value[ids], ids

    def backward(self, cache, dvecs: np.ndarray) -> None:
        ids = cache
        np.add.at(self.E.grad, ids.reshape(-1), dvecs.reshape(-1, self.E.value.shape[1]))


class Linear:
    def __init__(self, store: ParamStore, name: str, d_in: int, d_out: int, bias: bool = True):
        self.W = store.add(f"{name}.W", (d_in, d_out))
        self.b = store.add(f"{name}.b", (d_out,), init="zeros") if bias else None

    def forward(self, x: np.ndarray):
        y = x @ self.W.value
        if self.b is not None:
            y = y + self.b.value
        return y, x

    def backward(self, cache, dy: np.ndarray) -> np.ndarray:
        x = cache
        x2 = x.reshape(-1, x.shape[-1])
        dy2 = dy.reshape(-1, dy.shape[-1])
        self.W.grad += x2.T @ dy2
        if self.b is not None:
            self.b.grad += dy2.sum(axis=0)
        return dy @ self.W.value.T


class Lstm:
    """Single-direction LSTM cell unrolled over time, gate order (i, f, g, o)."""

    def __init__(self, store: ParamStore, name: str, d_in: int, hidden: int):
        self.hidden = hidden
        self.Wx = store.add(f"{name}.Wx", (d_in, 4 * hidden))
        self.Wh = store.add(f"{name}.Wh", (hidden, 4 * hidden))
        self.b = store.add(f"{name}.b", (4 * hidden,), init="lstm_bias")

    def forward(self, x: np.ndarray, mask: np.ndarray | None = None):
        B, L, _ = x.shape
        H = self.hidden
        if mask is None:
            mask = np.ones((B, L), dtype=np.float64)
        hs = np.zeros((B, L, H))
        h = np.zeros((B, H))
        c = np.zeros((B, H))
        steps = []
        for t in range(L):
            m = mask[:, t : t + 1]
            z = x[:, t, :] @ self.Wx.value + h @ self.Wh.value + self.b.value
            i = sigmoid(z[:, :H])
            f = sigmoid(z[:, H : 2 * H])
            g = np.tanh(z[:, 2 * H : 3 * H])
            o = sigmoid(z[:, 3 * H :])
            c_new = f * c + i * g
            hraw = np.tanh(c_new)
            h_new = o * hraw
            steps.append((h, c, i, f, g, o, hraw, m))
            h = m * h_new + (1.0 - m) * h
            c = m * c_new + (1.0 - m) * c
            hs[:, t, :] = m * h_new  # masked positions emit zeros
        cache = (x, mask, steps)
        return hs, (h, c), cache

    def backward(self, cache, dhs: np.ndarray | None, dh_final: np.ndarray | None = None,
                 dc_final: np.ndarray | None = None) -> np.ndarray:
        x, mask, steps = cache
        B, L, _ = x.shape
        H = self.hidden
        dx = np.zeros_like(x)
        dh_next = np.zeros((B, H)) if dh_final is None else dh_final.copy()
        dc_next = np.zeros((B, H)) if dc_final is None else dc_final.copy()
        for t in range(L - 1, -1, -1):
            h_prev, c_prev, i, f, g, o, hraw, m = steps[t]
            dh = dh_next.copy()
            if dhs is not None:
                dh += m * dhs[:, t, :]
            # contributions only flow through the gates on unmasked rows
            do = m * dh * hraw
            dc = dc_next + m * dh * o * (1.0 - hraw * hraw)
            di = dc * g * m
            df = dc * c_prev * m
            dg = dc * i * m
            dzi = di * i * (1.0 - i)
            dzf = df * f * (1.0 - f)
            dzg = dg * (1.0 - g * g)
            dzo = do * o * (1.0 - o)
            dz = np.concatenate([dzi, dzf, dzg, dzo], axis=1)
            self.Wx.grad += x[:, t, :].T @ dz
            self.Wh.grad += h_prev.T @ dz
            self.b.grad += dz.sum(axis=0)
            dx[:, t, :] = dz @ self.Wx.value.T
            dh_next = dz @ self.Wh.value.T + (1.0 - m) * dh
            dc_next = dc * f * m + (1.0 - m) * dc_next
        return dx


class BiLstm:
    """Bidirectional wrapper: concatenates forward and reversed-direction outputs."""

    def __init__(self, store: ParamStore, name: str, d_in: int, hidden: int):
        self.fw = Lstm(store, f"{name}.fw", d_in, hidden)
        self.bw = Lstm(store, f"{name}.bw", d_in, hidden)
        self.hidden = hidden

    def forward(self, x: np.ndarray, mask: np.ndarray | None = None):
        hs_f, final_f, cache_f = self.fw.forward(x, mask)
        x_rev = x[:, ::-1, :]
        mask_rev = None if mask is None else mask[:, ::-1]
        hs_b_rev, final_b, cache_b = self.bw.forward(x_rev, mask_rev)
        hs_b = hs_b_rev[:, ::-1, :]
        hs = np.concatenate([hs_f, hs_b], axis=2)
        cache = (cache_f, cache_b)
        return hs, (final_f, final_b), cache

    def backward(self, cache, dhs: np.ndarray,
                 dfinal_f: tuple | None = None, dfinal_b: tuple | None = None) -> np.ndarray:
        cache_f, cache_b = cache
        H = self.hidden
        dh_f = dhs[:, :, :H]
        dh_b = dhs[:, :, H:][:, ::-1, :]
        dx = self.fw.backward(
            cache_f, dh_f,
            None if dfinal_f is None else dfinal_f[0],
            None if dfinal_f is None else dfinal_f[1],
        )
        dx_rev = self.bw.backward(
            cache_b, dh_b,
            None if dfinal_b is None else dfinal_b[0],
            None if dfinal_b is None else dfinal_b[1],
        )
        return dx + dx_rev[:, ::-1, :]


def mean_pool(x: np.ndarray, mask: np.ndarray):
    """Masked mean over axis 1. x [B, N, d], mask [B, N]; empty rows give zeros."""
    counts = mask.sum(axis=1, keepdims=True)
    safe = np.maximum(counts, 1.0)
    pooled = (x * mask[:, :, None]).sum(axis=1) / safe
    return pooled, (mask, safe, x.shape)


def mean_pool_backward(cache, dpooled: np.ndarray) -> np.ndarray:
    mask, safe, shape = cache
    return (dpooled[:, None, :] / safe[:, :, None]) * mask[:, :, None]
