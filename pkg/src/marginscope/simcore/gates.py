"""Gate definitions and statevector evolution.

The gate set is the closure of what the experiments need: H, X, single-qubit
rotations, CNOT, the two-qubit ZZ rotation and a general diagonal phase.
Rotations follow the half-angle convention ``R_P(t) = exp(-i t P / 2)``.

``apply_gates_array`` evolves a whole batch of states at once (shape
``(batch, dim)``) and accepts per-row rotation angles, which is what the
variational training loops lean on.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from ..errors import InvalidInputError
from .state import StateVector

ROTATION_KINDS = ("rx", "ry", "rz", "rzz")
SINGLE_QUBIT_KINDS = ("h", "x", "rx", "ry", "rz")


@dataclass(frozen=True)
class Gate:
    """One circuit element.

    ``angle`` is set for rotation kinds only and may be a scalar or an array
    of per-batch-row angles.  ``phases`` is the diagonal of a
    ``diagonal-phase`` gate (length ``2**n`` unit-modulus entries).
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float | np.ndarray | None = None
    phases: np.ndarray | None = None

    def inverse(self) -> "Gate":
        if self.kind in ROTATION_KINDS:
            return Gate(self.kind, self.qubits, -np.asarray(self.angle) if isinstance(self.angle, np.ndarray) else -self.angle)
        if self.kind == "phases":
            return Gate(self.kind, self.qubits, phases=np.conj(self.phases))
        return self  # h, x, cnot are involutions


def h(q: int) -> Gate:
    return Gate("h", (q,))


def x(q: int) -> Gate:
    return Gate("x", (q,))


def rx(q: int, angle) -> Gate:
    return Gate("rx", (q,), angle)


def ry(q: int, angle) -> Gate:
    return Gate("ry", (q,), angle)


def rz(q: int, angle) -> Gate:
    return Gate("rz", (q,), angle)


def cnot(control: int, target: int) -> Gate:
    return Gate("cnot", (control, target))


def rzz(q1: int, q2: int, angle) -> Gate:
    return Gate("rzz", (q1, q2), angle)


def diagonal_phase(phases: np.ndarray) -> Gate:
    return Gate("phases", (), phases=np.asarray(phases, dtype=np.complex128))


@lru_cache(maxsize=64)
def _bit_values(n: int, q: int) -> np.ndarray:
    """0/1 value of qubit q (MSB-first) for every basis index."""
    idx = np.arange(1 << n)
    return (idx >> (n - 1 - q)) & 1


@lru_cache(maxsize=64)
def _flip_permutation(n: int, q: int) -> np.ndarray:
    return np.arange(1 << n) ^ (1 << (n - 1 - q))


@lru_cache(maxsize=64)
def _cnot_permutation(n: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(1 << n)
    ctrl_on = ((idx >> (n - 1 - control)) & 1) == 1
    return np.where(ctrl_on, idx ^ (1 << (n - 1 - target)), idx)


def _as_angle(angle, batch: int) -> np.ndarray | float:
    """Validate an angle as a scalar or per-row (batch,) array."""
    arr = np.asarray(angle, dtype=np.float64)
    if arr.ndim == 0:
        return float(arr)
    if arr.shape != (batch,):
        raise InvalidInputError(
            f"angle array of shape {arr.shape} does not match batch {batch}",
            module="simcore",
        )
    return arr


def _check_qubits(gate: Gate, n: int) -> None:
    if len(set(gate.qubits)) != len(gate.qubits):
        raise InvalidInputError(f"{gate.kind} gate repeats a qubit index", module="simcore")
    for q in gate.qubits:
        if not 0 <= q < n:
            raise InvalidInputError(
                f"{gate.kind} gate targets qubit {q}, valid range is 0..{n - 1}",
                module="simcore",
            )


def _lift(value, ndim: int):
    """Reshape a per-row array so it broadcasts against an ndim-rank view."""
    if isinstance(value, np.ndarray) and value.ndim == 1:
        return value.reshape(value.shape[0], *([1] * (ndim - 1)))
    return value


def _qubit_view(amps: np.ndarray, q: int, n: int) -> np.ndarray:
    """(batch, 2**q, 2, rest) view of a (batch, dim) block, axis 2 = qubit q."""
    return amps.reshape(amps.shape[0], 1 << q, 2, -1)


def _two_qubit_view(amps: np.ndarray, q1: int, q2: int, n: int) -> np.ndarray:
    """(batch, A, 2, C, 2, rest) view; axis 2 is min(q1,q2), axis 4 the other."""
    lo, hi = sorted((q1, q2))
    return amps.reshape(amps.shape[0], 1 << lo, 2, 1 << (hi - lo - 1), 2, -1)


def apply_gate_array(amps: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Apply one gate to a (batch, dim) complex array, in place.

    All kernels work on reshaped views so only the mixed half of the block
    is ever copied, and diagonal gates need one complex exponential per
    batch row rather than per amplitude.
    """
    _check_qubits(gate, n)
    batch = amps.shape[0]
    if gate.kind == "h":
        v = _qubit_view(amps, gate.qubits[0], n)
        a0 = v[:, :, 0, :].copy()
        a1 = v[:, :, 1, :]
        scale = 1.0 / np.sqrt(2.0)
        v[:, :, 0, :] = (a0 + a1) * scale
        v[:, :, 1, :] = (a0 - a1) * scale
    elif gate.kind == "x":
        v = _qubit_view(amps, gate.qubits[0], n)
        a0 = v[:, :, 0, :].copy()
        v[:, :, 0, :] = v[:, :, 1, :]
        v[:, :, 1, :] = a0
    elif gate.kind in ("rx", "ry", "rz"):
        t = _as_angle(gate.angle, batch)
        v = _qubit_view(amps, gate.qubits[0], n)
        if gate.kind == "rz":
            phase = np.exp(0.5j * np.asarray(t))
            v[:, :, 0, :] *= _lift(np.conj(phase), 3)
            v[:, :, 1, :] *= _lift(phase, 3)
        else:
            c = _lift(np.cos(np.asarray(t) / 2.0), 3)
            s = _lift(np.sin(np.asarray(t) / 2.0), 3)
            a0 = v[:, :, 0, :].copy()
            a1 = v[:, :, 1, :]
            if gate.kind == "rx":
                v[:, :, 0, :] = c * a0 + (-1j * s) * a1
                v[:, :, 1, :] = (-1j * s) * a0 + c * a1
            else:
                v[:, :, 0, :] = c * a0 - s * a1
                v[:, :, 1, :] = s * a0 + c * a1
    elif gate.kind == "cnot":
        control, target = gate.qubits
        v = _two_qubit_view(amps, control, target, n)
        if control < target:
            block = v[:, :, 1, :, :, :]  # control bit set; swap target axis
            t0 = block[:, :, :, 0, :].copy()
            block[:, :, :, 0, :] = block[:, :, :, 1, :]
            block[:, :, :, 1, :] = t0
        else:
            t0 = v[:, :, 0, :, 1, :].copy()
            v[:, :, 0, :, 1, :] = v[:, :, 1, :, 1, :]
            v[:, :, 1, :, 1, :] = t0
    elif gate.kind == "rzz":
        t = _as_angle(gate.angle, batch)
        phase = np.exp(-0.5j * np.asarray(t))  # even-parity blocks
        v = _two_qubit_view(amps, gate.qubits[0], gate.qubits[1], n)
        even, odd = _lift(phase, 4), _lift(np.conj(phase), 4)
        v[:, :, 0, :, 0, :] *= even
        v[:, :, 1, :, 1, :] *= even
        v[:, :, 0, :, 1, :] *= odd
        v[:, :, 1, :, 0, :] *= odd
    elif gate.kind == "phases":
        if gate.phases is None or gate.phases.shape != (amps.shape[1],):
            raise InvalidInputError("diagonal-phase gate needs a full-length diagonal", module="simcore")
        amps *= gate.phases
    else:
        raise InvalidInputError(f"unknown gate kind {gate.kind!r}", module="simcore")
    return amps


def apply_gates_array(amps: np.ndarray, gates: Sequence[Gate], n: int) -> np.ndarray:
    """Apply a gate sequence to a (batch, dim) or (dim,) array, returning a copy."""
    single = amps.ndim == 1
    work = np.array(amps, dtype=np.complex128, copy=True)
    if single:
        work = work[None, :]
    for gate in gates:
        apply_gate_array(work, gate, n)
    return work[0] if single else work


def apply_circuit(state: StateVector, gates: Sequence[Gate]) -> StateVector:
    """Evolve a state through a circuit; gate indices are validated upfront."""
    for gate in gates:
        _check_qubits(gate, state.n_qubits)
    amps = apply_gates_array(state.amplitudes, gates, state.n_qubits)
    return StateVector(state.n_qubits, amps)


def circuit_inverse(gates: Sequence[Gate]) -> list[Gate]:
    return [g.inverse() for g in reversed(gates)]
