"""Classical 5-4-3-4-5 autoencoder with hand-written backpropagation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .detectors import threshold_from_losses, training_matrix
from .optim import Adam

LAYER_SIZES = (5, 4, 3, 4, 5)
N_PARAMS = sum(n_out * n_in + n_out for n_in, n_out in zip(LAYER_SIZES, LAYER_SIZES[1:]))


@dataclass(frozen=True, eq=False)
class CaeParams:
    """Flat parameter vector, laid out as W1, b1, W2, b2, W3, b3, W4, b4."""

    flat: np.ndarray

    def __post_init__(self):
        flat = np.array(self.flat, dtype=float).reshape(-1)
        if flat.size != N_PARAMS:
            raise ValueError(f"expected {N_PARAMS} parameters, got {flat.size}")
        flat.setflags(write=False)
        object.__setattr__(self, "flat", flat)

    @property
    def size(self) -> int:
        return self.flat.size

    @property
    def layers(self) -> list[tuple[np.ndarray, np.ndarray]]:
        out, pos = [], 0
        for n_in, n_out in zip(LAYER_SIZES, LAYER_SIZES[1:]):
            W = self.flat[pos : pos + n_out * n_in].reshape(n_out, n_in)
            pos += n_out * n_in
            b = self.flat[pos : pos + n_out]
            pos += n_out
            out.append((W, b))
        return out

    @classmethod
    def zeros(cls) -> CaeParams:
        return cls(np.zeros(N_PARAMS))

    @classmethod
    def init(cls, seed: int) -> CaeParams:
        rng = np.random.default_rng([seed, 5])
        parts = []
        for n_in, n_out in zip(LAYER_SIZES, LAYER_SIZES[1:]):
            bound = 1.0 / np.sqrt(n_in)
            parts.append(rng.uniform(-bound, bound, size=n_out * n_in))
            parts.append(rng.uniform(-bound, bound, size=n_out))
        return cls(np.concatenate(parts))


@dataclass(frozen=True)
class CaeConfig:
    epochs: int = 500
    learning_rate: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")


def _batch(X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != LAYER_SIZES[0]:
        raise ValueError(f"expected input width {LAYER_SIZES[0]}, got {X.shape[1]}")
    return X


def _forward(params: CaeParams, X: np.ndarray):
    acts, pre = [X], []
    layers = params.layers
    for k, (W, b) in enumerate(layers):
        z = acts[-1] @ W.T + b
        pre.append(z)
        acts.append(np.tanh(z) if k == len(layers) - 1 else np.maximum(z, 0.0))
    return acts, pre


def cae_forward(params: CaeParams, x) -> np.ndarray:
    """Reconstruction of a single row (or of each row of a batch)."""
    X = _batch(x)
    out = _forward(params, X)[0][-1]
    return out[0] if np.ndim(x) == 1 else out


def cae_scores(params: CaeParams, X) -> np.ndarray:
    X = _batch(X)
    return ((X - _forward(params, X)[0][-1]) ** 2).sum(axis=1)


def cae_gradient(params: CaeParams, X) -> tuple[CaeParams, float]:
    """Gradient of the mean per-row squared reconstruction error, and that loss."""
    X = _batch(X)
    if X.shape[0] == 0:
        raise ValueError("empty batch")
    n = X.shape[0]
    acts, pre = _forward(params, X)
    out = acts[-1]
    resid = X - out
    loss = float((resid**2).sum() / n)

    layers = params.layers
    grads = [None] * len(layers)
    delta = (-2.0 / n) * resid * (1.0 - out**2)
    for k in range(len(layers) - 1, -1, -1):
        W, _ = layers[k]
        grads[k] = (delta.T @ acts[k], delta.sum(axis=0))
        if k:
            delta = (delta @ W) * (pre[k - 1] > 0)
    flat = np.concatenate([np.concatenate([gW.reshape(-1), gb]) for gW, gb in grads])
    return CaeParams(flat), loss


@dataclass(frozen=True, eq=False)
class CaeModel:
    params: CaeParams
    config: CaeConfig
    tau: float
    train_mean_loss: float
    loss_history: tuple[float, ...] = field(default=(), repr=False)

    def scores(self, X) -> np.ndarray:
        return cae_scores(self.params, X)


def train_cae(X_train, config: CaeConfig = CaeConfig()) -> CaeModel:
    X = _batch(training_matrix(X_train))
    params = CaeParams.init(config.seed)
    opt = Adam(N_PARAMS, config.learning_rate)
    history = []
    flat = params.flat.copy()
    for _ in range(config.epochs):
        grad, loss = cae_gradient(CaeParams(flat), X)
        history.append(loss)
        flat = opt.step(flat, grad.flat)
    params = CaeParams(flat)
    mean_loss, tau = threshold_from_losses(cae_scores(params, X))
    history.append(mean_loss)
    return CaeModel(params, config, tau, mean_loss, tuple(history))
