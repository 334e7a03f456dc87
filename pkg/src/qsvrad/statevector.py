"""Dense statevector simulation for small Pauli-rotation circuits.

Qubit 0 is the most significant bit: amplitude index ``k`` corresponds to the
big-endian bitstring ``format(k, f"0{n}b")``. Rotations follow
``R_P(theta) = exp(-i * theta / 2 * P)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_QUBITS = 12

SINGLE_QUBIT_KINDS = ("RX", "RY", "RZ")
TWO_QUBIT_KINDS = ("RYY", "RZZ")


class CircuitError(ValueError):
    """Raised for malformed gates or incompatible registers."""


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise CircuitError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != 2**self.n_qubits:
            raise CircuitError(
                f"expected {2**self.n_qubits} amplitudes for {self.n_qubits} qubits, got {amps.size}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.probabilities())))


@dataclass(frozen=True)
class GateOp:
    kind: str
    targets: tuple[int, ...]
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if self.kind in SINGLE_QUBIT_KINDS:
            if len(self.targets) != 1:
                raise CircuitError(f"{self.kind} takes exactly one target, got {self.targets}")
        elif self.kind in TWO_QUBIT_KINDS:
            if len(self.targets) != 2:
                raise CircuitError(f"{self.kind} takes exactly two targets, got {self.targets}")
            if self.targets[0] == self.targets[1]:
                raise CircuitError(f"{self.kind} targets must be distinct, got {self.targets}")
        else:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if any(t < 0 for t in self.targets):
            raise CircuitError(f"negative target index in {self.targets}")

    def inverse(self) -> GateOp:
        return GateOp(self.kind, self.targets, -self.angle)


@dataclass(frozen=True)
class BitstringDistribution:
    qubits: tuple[int, ...]
    labels: tuple[str, ...]
    probabilities: np.ndarray

    def __getitem__(self, label: str) -> float:
        return float(self.probabilities[self.labels.index(label)])

    def as_dict(self) -> dict[str, float]:
        return {label: float(p) for label, p in zip(self.labels, self.probabilities)}


def zero_state(n_qubits: int) -> StateVector:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise CircuitError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def _axis_index(n: int, fixed: dict[int, int]) -> tuple:
    idx: list = [slice(None)] * n
    for axis, value in fixed.items():
        idx[axis] = value
    return tuple(idx)


def _apply_inplace(psi: np.ndarray, n: int, gate: GateOp) -> None:
    """Apply ``gate`` to the tensor ``psi`` of shape ``(2,) * n`` in place."""
    if any(t >= n for t in gate.targets):
        raise CircuitError(f"gate targets {gate.targets} out of range for {n} qubits")
    c = np.cos(gate.angle / 2)
    s = np.sin(gate.angle / 2)

    if gate.kind == "RZ":
        (q,) = gate.targets
        psi[_axis_index(n, {q: 0})] *= np.exp(-0.5j * gate.angle)
        psi[_axis_index(n, {q: 1})] *= np.exp(0.5j * gate.angle)
        return
    if gate.kind in ("RX", "RY"):
        (q,) = gate.targets
        i0, i1 = _axis_index(n, {q: 0}), _axis_index(n, {q: 1})
        a0, a1 = psi[i0].copy(), psi[i1].copy()
        if gate.kind == "RX":
            psi[i0] = c * a0 - 1j * s * a1
            psi[i1] = -1j * s * a0 + c * a1
        else:
            psi[i0] = c * a0 - s * a1
            psi[i1] = s * a0 + c * a1
        return

    q0, q1 = gate.targets
    i00 = _axis_index(n, {q0: 0, q1: 0})
    i01 = _axis_index(n, {q0: 0, q1: 1})
    i10 = _axis_index(n, {q0: 1, q1: 0})
    i11 = _axis_index(n, {q0: 1, q1: 1})
    if gate.kind == "RZZ":
        even, odd = np.exp(-0.5j * gate.angle), np.exp(0.5j * gate.angle)
        psi[i00] *= even
        psi[i11] *= even
        psi[i01] *= odd
        psi[i10] *= odd
        return
    # RYY: Y⊗Y maps |00> -> -|11>, |11> -> -|00>, |01> -> |10>, |10> -> |01>
    a00, a01, a10, a11 = psi[i00].copy(), psi[i01].copy(), psi[i10].copy(), psi[i11].copy()
    psi[i00] = c * a00 + 1j * s * a11
    psi[i11] = c * a11 + 1j * s * a00
    psi[i01] = c * a01 - 1j * s * a10
    psi[i10] = c * a10 - 1j * s * a01


def apply_rotation(state: StateVector, gate: GateOp) -> StateVector:
    return apply_circuit(state, (gate,))


def apply_circuit(state: StateVector, gates: Iterable[GateOp]) -> StateVector:
    """Apply a gate sequence, copying the amplitudes once."""
    n = state.n_qubits
    psi = state.amplitudes.reshape((2,) * n).copy()
    for gate in gates:
        _apply_inplace(psi, n, gate)
    return StateVector(n, psi.reshape(-1))


def inverse_circuit(gates: Sequence[GateOp]) -> list[GateOp]:
    return [g.inverse() for g in reversed(gates)]


def _check_same_register(a: StateVector, b: StateVector) -> None:
    if a.n_qubits != b.n_qubits:
        raise CircuitError(f"register size mismatch: {a.n_qubits} vs {b.n_qubits}")


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    _check_same_register(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def prob_all_zero(state: StateVector) -> float:
    return float(abs(state.amplitudes[0]) ** 2)


def _validate_qubits(n: int, qubits: Sequence[int]) -> tuple[int, ...]:
    qubits = tuple(int(q) for q in qubits)
    if not qubits:
        raise CircuitError("qubit subset must be non-empty")
    if len(set(qubits)) != len(qubits):
        raise CircuitError(f"duplicate qubit indices in {qubits}")
    if any(q < 0 or q >= n for q in qubits):
        raise CircuitError(f"qubit indices {qubits} out of range for {n} qubits")
    return qubits


def subset_marginals(state: StateVector, qubits: Sequence[int]) -> BitstringDistribution:
    """Marginal distribution of ``qubits``; the first listed qubit is the leftmost bit."""
    n = state.n_qubits
    qubits = _validate_qubits(n, qubits)
    probs = state.probabilities().reshape((2,) * n)
    rest = tuple(ax for ax in range(n) if ax not in qubits)
    marginal = probs.sum(axis=rest) if rest else probs
    # remaining axes are in ascending qubit order; reorder to the requested order
    order = sorted(qubits)
    marginal = np.transpose(marginal, [order.index(q) for q in qubits]).reshape(-1)
    k = len(qubits)
    labels = tuple(format(i, f"0{k}b") for i in range(2**k))
    return BitstringDistribution(qubits, labels, marginal)


def sample_counts(
    state: StateVector, shots: int, seed: int | Sequence[int] | np.random.Generator
) -> dict[str, int]:
    """Draw ``shots`` computational-basis measurements of every qubit."""
    if shots < 1:
        raise CircuitError(f"shots must be >= 1, got {shots}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    probs = state.probabilities()
    probs = probs / probs.sum()
    counts = rng.multinomial(shots, probs)
    n = state.n_qubits
    return {format(int(k), f"0{n}b"): int(counts[k]) for k in np.flatnonzero(counts)}
