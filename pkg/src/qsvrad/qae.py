"""Quantum autoencoder detector: encoding layer, one trainable layer, trash-qubit loss.

The trainable layer is RY on every qubit, RX on every qubit, then RZZ on every
pair ``i < j``; parameters are stored in that order. The loss is the expected
Hamming weight of the trash-qubit measurement, e.g. ``p(01) + p(10) + 2 p(11)``
for two trash qubits. Gradients use the two-term parameter-shift rule, which is
exact because every generator is a Pauli string.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .detectors import threshold_from_losses, training_matrix
from .kernel import EncodingSpec, encode_feature_vector
from .optim import Adam
from .statevector import GateOp, StateVector, apply_circuit, sample_counts, subset_marginals


@dataclass(frozen=True)
class QaeConfig:
    n_qubits: int = 5
    trash_qubits: tuple[int, ...] = (3, 4)
    epochs: int = 10
    batch_size: int = 1
    learning_rate: float = 0.01
    init_scale: float = 0.01
    seed: int = 0
    shots: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "trash_qubits", tuple(int(q) for q in self.trash_qubits))
        if not 0 < len(self.trash_qubits) < self.n_qubits:
            raise ValueError("need at least one trash qubit and fewer trash qubits than qubits")
        if self.batch_size != 1:
            raise ValueError("only batch_size 1 is supported")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.shots is not None and self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")

    @property
    def n_params(self) -> int:
        n = self.n_qubits
        return 2 * n + n * (n - 1) // 2

    @property
    def encoding(self) -> EncodingSpec:
        return EncodingSpec(self.n_qubits)


@dataclass(frozen=True, eq=False)
class QaeModel:
    params: np.ndarray
    config: QaeConfig
    tau: float = 0.0
    train_mean_loss: float = 0.0
    # mean training loss at initialization, then after each epoch
    loss_history: tuple[float, ...] = field(default=(), repr=False)

    def scores(self, X) -> np.ndarray:
        return np.array([qae_loss(self.params, x, self.config) for x in np.atleast_2d(X)])


def trainable_gates(params, n_qubits: int) -> list[GateOp]:
    params = np.asarray(params, dtype=float)
    gates = [GateOp("RY", (i,), params[i]) for i in range(n_qubits)]
    gates += [GateOp("RX", (i,), params[n_qubits + i]) for i in range(n_qubits)]
    pairs = combinations(range(n_qubits), 2)
    gates += [GateOp("RZZ", pair, params[2 * n_qubits + k]) for k, pair in enumerate(pairs)]
    return gates


def _check(params, x, config: QaeConfig) -> tuple[np.ndarray, np.ndarray]:
    params = np.asarray(params, dtype=float).reshape(-1)
    x = np.asarray(x, dtype=float).reshape(-1)
    if params.size != config.n_params:
        raise ValueError(f"expected {config.n_params} parameters, got {params.size}")
    if x.size != config.n_qubits:
        raise ValueError(f"expected {config.n_qubits} features, got {x.size}")
    return params, x


def _trash_loss(encoded: StateVector, params, config: QaeConfig) -> float:
    state = apply_circuit(encoded, trainable_gates(params, config.n_qubits))
    if config.shots is not None:
        counts = sample_counts(state, config.shots, [config.seed, 3])
        weight = sum(c * sum(bits[q] == "1" for q in config.trash_qubits) for bits, c in counts.items())
        return weight / config.shots
    dist = subset_marginals(state, config.trash_qubits)
    weights = np.array([label.count("1") for label in dist.labels])
    return float(weights @ dist.probabilities)


def qae_loss(params, x, config: QaeConfig = QaeConfig()) -> float:
    params, x = _check(params, x, config)
    return _trash_loss(encode_feature_vector(x, config.encoding), params, config)


def _shift_gradient(encoded: StateVector, params: np.ndarray, config: QaeConfig) -> np.ndarray:
    grad = np.empty_like(params)
    shifted = params.copy()
    for k in range(params.size):
        shifted[k] = params[k] + np.pi / 2
        plus = _trash_loss(encoded, shifted, config)
        shifted[k] = params[k] - np.pi / 2
        minus = _trash_loss(encoded, shifted, config)
        shifted[k] = params[k]
        grad[k] = 0.5 * (plus - minus)
    return grad


def qae_gradient(params, x, config: QaeConfig = QaeConfig()) -> np.ndarray:
    params, x = _check(params, x, config)
    return _shift_gradient(encode_feature_vector(x, config.encoding), params, config)


def train_qae(X_train, config: QaeConfig = QaeConfig()) -> QaeModel:
    X = training_matrix(X_train)
    if X.shape[1] != config.n_qubits:
        raise ValueError(f"expected {config.n_qubits} features, got {X.shape[1]}")
    rng = np.random.default_rng([config.seed, 4])
    params = rng.uniform(-config.init_scale, config.init_scale, size=config.n_params)
    # the encoding does not depend on the parameters, so prepare it once per sample
    encoded = [encode_feature_vector(x, config.encoding) for x in X]
    opt = Adam(params.size, config.learning_rate)
    history = [float(np.mean([_trash_loss(e, params, config) for e in encoded]))]
    for _ in range(config.epochs):
        for idx in rng.permutation(len(encoded)):
            params = opt.step(params, _shift_gradient(encoded[idx], params, config))
        history.append(float(np.mean([_trash_loss(e, params, config) for e in encoded])))
    params.setflags(write=False)
    losses = [_trash_loss(e, params, config) for e in encoded]
    mean_loss, tau = threshold_from_losses(losses)
    return QaeModel(params, config, tau, mean_loss, tuple(history))

