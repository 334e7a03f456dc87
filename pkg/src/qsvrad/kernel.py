"""IQP-style fidelity kernel: RZ layer, shifted RX layer, all-pairs RYY layer."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .statevector import (
    GateOp,
    StateVector,
    apply_circuit,
    inverse_circuit,
    sample_counts,
    zero_state,
)


@dataclass(frozen=True)
class EncodingSpec:
    n_features: int = 5
    shift: int = 1

    def __post_init__(self):
        if self.n_features < 2:
            raise ValueError(f"n_features must be >= 2, got {self.n_features}")
        if not 1 <= self.shift < self.n_features:
            raise ValueError(f"shift must be in [1, {self.n_features}), got {self.shift}")


@dataclass(frozen=True)
class Exact:
    pass


@dataclass(frozen=True)
class Shots:
    count: int
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError(f"shot count must be >= 1, got {self.count}")


KernelMode = Exact | Shots
EXACT = Exact()


def parse_kernel_mode(text: str, seed: int = 0) -> KernelMode:
    """Parse ``"exact"`` or ``"shots:<N>"``."""
    if text == "exact":
        return EXACT
    if text.startswith("shots:"):
        try:
            count = int(text.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad shot count in kernel mode {text!r}") from None
        return Shots(count, seed)
    raise ValueError(f"kernel mode must be 'exact' or 'shots:<N>', got {text!r}")


def _as_vector(x, spec: EncodingSpec) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != spec.n_features:
        raise ValueError(f"expected {spec.n_features} features, got {x.size}")
    return x


def encoding_gates(x, spec: EncodingSpec) -> list[GateOp]:
    x = _as_vector(x, spec)
    n = spec.n_features
    gates = [GateOp("RZ", (i,), x[i]) for i in range(n)]
    gates += [GateOp("RX", (i,), x[(i + spec.shift) % n]) for i in range(n)]
    gates += [GateOp("RYY", (i, j), x[i] * x[j]) for i, j in combinations(range(n), 2)]
    return gates


def encode_feature_vector(x, spec: EncodingSpec) -> StateVector:
    return apply_circuit(zero_state(spec.n_features), encoding_gates(x, spec))


def _shot_fidelity(xi, xj, spec: EncodingSpec, mode: Shots, stream: Sequence[int]) -> float:
    gates = encoding_gates(xj, spec) + inverse_circuit(encoding_gates(xi, spec))
    state = apply_circuit(zero_state(spec.n_features), gates)
    rng = np.random.default_rng([mode.seed, *stream])
    counts = sample_counts(state, mode.count, rng)
    return counts.get("0" * spec.n_features, 0) / mode.count


def kernel_entry(xi, xj, spec: EncodingSpec, mode: KernelMode = EXACT, stream: Sequence[int] = ()) -> float:
    """Fidelity |<psi(xi)|psi(xj)>|^2.

    In shot mode the all-zero frequency of U(xi)^† U(xj)|0> is returned; ``stream``
    is appended to the seed so that matrix entries draw independent samples.
    """
    xi, xj = _as_vector(xi, spec), _as_vector(xj, spec)
    if isinstance(mode, Shots):
        return _shot_fidelity(xi, xj, spec, mode, stream)
    overlap = np.vdot(encode_feature_vector(xi, spec).amplitudes, encode_feature_vector(xj, spec).amplitudes)
    return float(abs(overlap) ** 2)


def _rows(X, spec: EncodingSpec, what: str) -> np.ndarray:
    try:
        X = np.asarray(X, dtype=float)
    except ValueError:
        raise ValueError(f"{what} has ragged rows") from None
    if X.ndim != 2:
        raise ValueError(f"{what} must be a 2-D sequence of feature vectors")
    if X.shape[0] == 0:
        raise ValueError(f"{what} is empty")
    if X.shape[1] != spec.n_features:
        raise ValueError(f"{what} rows have {X.shape[1]} features, expected {spec.n_features}")
    return X


def _state_matrix(X: np.ndarray, spec: EncodingSpec) -> np.ndarray:
    return np.stack([encode_feature_vector(x, spec).amplitudes for x in X])


def gram_matrix(X, spec: EncodingSpec, mode: KernelMode = EXACT) -> np.ndarray:
    X = _rows(X, spec, "X")
    m = X.shape[0]
    K = np.empty((m, m))
    if isinstance(mode, Shots):
        for i in range(m):
            for j in range(i, m):
                K[i, j] = K[j, i] = _shot_fidelity(X[i], X[j], spec, mode, (0, i, j))
        return K
    S = _state_matrix(X, spec)
    F = np.abs(S.conj() @ S.T) ** 2
    iu = np.triu_indices(m, 1)
    K[iu] = F[iu]
    K.T[iu] = F[iu]
    np.fill_diagonal(K, 1.0)
    return K


def cross_kernel(A, B, spec: EncodingSpec, mode: KernelMode = EXACT) -> np.ndarray:
    """Matrix of kernel_entry(A[a], B[b]) with shape (len(A), len(B))."""
    A = _rows(A, spec, "A")
    B = _rows(B, spec, "B")
    if isinstance(mode, Shots):
        return np.array(
            [[_shot_fidelity(a, b, spec, mode, (1, i, j)) for j, b in enumerate(B)] for i, a in enumerate(A)]
        )
    SA, SB = _state_matrix(A, spec), _state_matrix(B, spec)
    return np.abs(SA.conj() @ SB.T) ** 2


def write_kernel_csv(K: np.ndarray, path) -> None:
    """Row-major square matrix, no header, 17 significant digits."""
    K = np.asarray(K, dtype=float)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for row in K:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")


@dataclass(frozen=True)
class QuantumKernel:
    """Kernel binding for the reconstruction detector."""

    spec: EncodingSpec = EncodingSpec()
    mode: KernelMode = EXACT

    def gram(self, X) -> np.ndarray:
        return gram_matrix(X, self.spec, self.mode)

    def cross(self, A, B) -> np.ndarray:
        return cross_kernel(A, B, self.spec, self.mode)
