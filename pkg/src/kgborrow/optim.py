"""Sparse AdaGrad for embedding matrices.

Each parameter matrix carries an accumulator of the same shape. A step
adds the squared gradient to the accumulator and then moves the parameter
by ``lr * grad / (sqrt(acc) + eps)``; only the rows named in the update
are touched, so embedding training scales with the batch, not the table.
"""

from dataclasses import dataclass

import numpy as np


class NonFiniteGradientError(ValueError):
    """Raised before any state is mutated when a gradient has NaN/Inf."""


@dataclass
class AdaGradState:
    accumulator: np.ndarray
    epsilon: float = 1e-10

    @classmethod
    def for_params(cls, params: np.ndarray, epsilon: float = 1e-10) -> "AdaGradState":
        return cls(np.zeros_like(params), epsilon)


def adagrad_step(
    params: np.ndarray,
    grads: np.ndarray,
    state: AdaGradState,
    lr: float,
    rows: np.ndarray | None = None,
) -> None:
    """Apply one AdaGrad step in place.

    With ``rows`` given, ``grads`` holds one gradient row per entry of
    ``rows`` (which must be unique); otherwise ``grads`` matches the full
    parameter shape. Zero-gradient coordinates are left untouched, so a
    null step changes neither the parameters nor the accumulator.
    """
    if lr <= 0:
        raise ValueError(f"learning rate must be positive, got {lr}")
    if params.shape != state.accumulator.shape:
        raise ValueError("accumulator shape does not match parameters")
    grads = np.asarray(grads, dtype=np.float64)
    if not np.all(np.isfinite(grads)):
        raise NonFiniteGradientError("non-finite gradient, step aborted")
    if rows is None:
        if grads.shape != params.shape:
            raise ValueError(f"gradient shape {grads.shape} != parameter shape {params.shape}")
        acc = state.accumulator
        acc += grads * grads
        with np.errstate(invalid="ignore", divide="ignore"):
            update = np.where(grads != 0.0, lr * grads / (np.sqrt(acc) + state.epsilon), 0.0)
        params -= update
        return
    if grads.shape[0] != len(rows) or grads.shape[1:] != params.shape[1:]:
        raise ValueError(f"gradient shape {grads.shape} does not match {len(rows)} rows")
    acc = state.accumulator[rows] + grads * grads
    state.accumulator[rows] = acc
    with np.errstate(invalid="ignore", divide="ignore"):
        update = np.where(grads != 0.0, lr * grads / (np.sqrt(acc) + state.epsilon), 0.0)
    params[rows] -= update
