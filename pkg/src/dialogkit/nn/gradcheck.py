"""Central finite-difference gradient verification.

Every hand-derived backward pass in this package is gated by this check: a
loss function is evaluated at theta +/- eps per coordinate and compared to the
analytic gradient. Coordinates may be subsampled for large tensors.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .params import ParamStore


def finite_diff_check(
    loss_fn: Callable[[ParamStore], float],
    store: ParamStore,
    epsilon: float = 1e-5,
    max_coords_per_param: int = 0,
    rng: np.random.Generator | None = None,
    atol: float = 1e-6,
) -> float:
    """Max relative error between analytic and numeric gradients.

    ``loss_fn`` must populate ``store`` gradients when called (a full forward +
    backward) and be deterministic. ``max_coords_per_param`` > 0 samples that
    many coordinates per tensor instead of sweeping all of them.

    Coordinates where both gradients are below ``atol`` count as matching:
    the absolute noise of central differences on an O(1) float64 loss is
    around 1e-11..1e-10 at epsilon=1e-5, so a 1e-4 relative tolerance is only
    meaningful for derivatives comfortably above that floor.
    """
    rng = rng or np.random.default_rng(0)
    store.zero_grads()
    loss_fn(store)
    analytic = {n: p.grad.copy() for n, p in store.params.items()}
    store.zero_grads()

    worst = 0.0
    for name, p in store.params.items():
        flat = p.value.reshape(-1)
        n = flat.size
        if max_coords_per_param and n > max_coords_per_param:
            coords = rng.choice(n, size=max_coords_per_param, replace=False)
        else:
            coords = range(n)
        a_flat = analytic[name].reshape(-1)
        for j in coords:
            orig = flat[j]
            flat[j] = orig + epsilon
            up = loss_fn(store)
            store.zero_grads()
            flat[j] = orig - epsilon
            down = loss_fn(store)
            store.zero_grads()
            flat[j] = orig
            numeric = (up - down) / (2.0 * epsilon)
            if abs(a_flat[j]) < atol and abs(numeric) < atol:
                continue
            denom = max(abs(a_flat[j]), abs(numeric), atol)
            err = abs(a_flat[j] - numeric) / denom
            worst = max(worst, err)
    return worst
