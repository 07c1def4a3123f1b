"""Adam with global-norm gradient clipping. Gradients are zeroed after a step."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import NonFiniteError, ParamStore


@dataclass
class AdamConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    clip_norm: float = 5.0  # 0 disables clipping


def global_norm(store: ParamStore) -> float:
    total = 0.0
    for p in store.params.values():
        total += float(np.sum(p.grad * p.grad))
    return float(np.sqrt(total))


def optimizer_step(store: ParamStore, cfg: AdamConfig) -> None:
    for p in store.params.values():
        if not np.all(np.isfinite(p.grad)):
            raise NonFiniteError(f"gradient of {p.name!r} is not finite")

    scale = 1.0
    if cfg.clip_norm and cfg.clip_norm > 0:
        norm = global_norm(store)
        if norm > cfg.clip_norm:
            scale = cfg.clip_norm / norm

    state = store.opt_state
    if not state:
        state["t"] = 0
        state["m"] = {n: np.zeros_like(p.value) for n, p in store.params.items()}
        state["v"] = {n: np.zeros_like(p.value) for n, p in store.params.items()}
    state["t"] += 1
    t = state["t"]
    bc1 = 1.0 - cfg.beta1**t
    bc2 = 1.0 - cfg.beta2**t
    for name, p in store.params.items():
        g = p.grad * scale
        m = state["m"][name]
        v = state["v"][name]
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * g * g
        p.value -= cfg.lr * (m / bc1) / (np.sqrt(v / bc2) + cfg.eps)
    store.zero_grads()
