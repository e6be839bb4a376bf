"""Dense statevector simulation and random-object sampling.

Conventions: qubit 0 is the leftmost (most significant) bit of a basis
index, so the basis state written ``|b0 b1 ... b_{n-1}>`` has integer index
``sum(b_q * 2**(n-1-q))``.  All operations are pure; ``StateVector``
amplitudes are immutable after construction.
"""

from .state import StateVector, basis_state, dump_amplitudes
from .gates import (
    Gate,
    apply_circuit,
    apply_gates_array,
    circuit_inverse,
    cnot,
    diagonal_phase,
    h,
    rx,
    ry,
    rz,
    rzz,
    x,
)
from .observables import (
    DiagonalObservable,
    Observable,
    PauliSumObservable,
    PermutedDiagonalObservable,
    ProjectorPairObservable,
    diagonal_values,
    expectation,
    expectation_array,
    permuted_observable,
)
from .sampling import sample_haar_state, sample_haar_vector, sample_unitary

__all__ = [
    "StateVector",
    "basis_state",
    "dump_amplitudes",
    "Gate",
    "apply_circuit",
    "apply_gates_array",
    "circuit_inverse",
    "h",
    "x",
    "rx",
    "ry",
    "rz",
    "cnot",
    "rzz",
    "diagonal_phase",
    "Observable",
    "DiagonalObservable",
    "PauliSumObservable",
    "ProjectorPairObservable",
    "PermutedDiagonalObservable",
    "diagonal_values",
    "expectation",
    "expectation_array",
    "permuted_observable",
    "sample_haar_state",
    "sample_haar_vector",
    "sample_unitary",
]
