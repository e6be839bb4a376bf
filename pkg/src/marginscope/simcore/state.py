"""Normalized statevectors over n qubits."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..csvio import write_csv
from ..errors import InvalidInputError

NORM_TOL = 1e-10


@dataclass(frozen=True)
class StateVector:
    """Complex amplitude vector of length 2**n_qubits with unit norm."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.n_qubits < 1:
            raise InvalidInputError("n_qubits must be >= 1", module="simcore")
        if amps.shape != (1 << self.n_qubits,):
            raise InvalidInputError(
                f"amplitude length {amps.shape} does not match 2**{self.n_qubits}",
                module="simcore",
            )
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvalidInputError(
                f"statevector squared norm {norm2!r} deviates from 1 beyond {NORM_TOL}",
                module="simcore",
            )
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def inner(self, other: "StateVector") -> complex:
        if other.n_qubits != self.n_qubits:
            raise InvalidInputError("qubit counts differ", module="simcore")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def basis_state(n_qubits: int, index: int) -> StateVector:
    if not 0 <= index < (1 << n_qubits):
        raise InvalidInputError(f"basis index {index} out of range", module="simcore")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(n_qubits, amps)


def dump_amplitudes(state: StateVector, path: str | Path) -> Path:
    """Debug dump, one row per basis index: ``index,re,im``."""
    rows = [(i, float(a.real), float(a.imag)) for i, a in enumerate(state.amplitudes)]
    return write_csv(path, ["index", "re", "im"], rows)
