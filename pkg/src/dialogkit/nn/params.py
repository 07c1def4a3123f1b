"""Named parameter collections with paired gradient buffers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class NonFiniteError(FloatingPointError):
    """A parameter or gradient went NaN/Inf; names the offender."""


@dataclass
class Param:
    name: str
    value: np.ndarray
    grad: np.ndarray

    def check_finite(self) -> None:
        if not np.all(np.isfinite(self.value)):
            raise NonFiniteError(f"parameter {self.name!r} contains non-finite values")
        if not np.all(np.isfinite(self.grad)):
            raise NonFiniteError(f"gradient of {self.name!r} contains non-finite values")


@dataclass
class ParamStore:
    """Registry of named float64 parameters. Shapes are fixed at creation."""

    seed: int = 0
    params: dict[str, Param] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._rng = np.random.default_rng(self.seed)
        # Adam state, created lazily by the optimizer
        self.opt_state: dict = {}

    def add(self, name: str, shape: tuple[int, ...], init: str = "uniform") -> Param:
        """Register a parameter.

        init: "uniform" = U(-1/sqrt(fan_in), +1/sqrt(fan_in)) with fan_in the
        first dimension; "zeros"; or "lstm_bias" = zeros with the forget-gate
        block set to +1 (shape must be (4h,)).
        """
        if name in self.params:
            raise ValueError(f"duplicate parameter {name!r}")
        if init == "zeros":
            value = np.zeros(shape, dtype=np.float64)
        elif init == "lstm_bias":
            value = np.zeros(shape, dtype=np.float64)
            h = shape[0] // 4
            value[h : 2 * h] = 1.0
        elif init == "uniform":
            fan_in = shape[0] if shape else 1
            bound = 1.0 / np.sqrt(max(fan_in, 1))
            value = self._rng.uniform(-bound, bound, size=shape)
        else:
            raise ValueError(f"unknown init {init!r}")
        p = Param(name=name, value=value, grad=np.zeros(shape, dtype=np.float64))
        self.params[name] = p
        return p

    def __getitem__(self, name: str) -> Param:
        return self.params[name]

    def zero_grads(self) -> None:
        for p in self.params.values():
            p.grad[...] = 0.0

    def names(self) -> list[str]:
        return list(self.params)

    def num_values(self) -> int:
        return sum(p.value.size for p in self.params.values())

    def copy(self) -> "ParamStore":
        out = ParamStore(seed=self.seed)
        for name, p in self.params.items():
            out.params[name] = Param(name, p.value.copy(), p.grad.copy())
        return out
