"""Observable representations and expectation values.

Four Hermitian forms cover every experiment: a real diagonal, a weighted sum
of Pauli strings, a signed pair of rank-one projectors, and a diagonal whose
entries were permuted.  Expectations are always real; a residual imaginary
part beyond tolerance indicates a non-Hermitian input and raises.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import InvalidInputError
from ..rng import RandomStream
from .gates import _bit_values
from .state import StateVector

HERMITIAN_TOL = 1e-10

_PAULI_CHARS = frozenset("IXYZ")


@dataclass(frozen=True)
class DiagonalObservable:
    """Real value per computational basis index."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def dim(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class PauliSumObservable:
    """Sum of coefficient-weighted Pauli strings, e.g. (0.5, "IZ")."""

    terms: tuple[tuple[float, str], ...]

    def __post_init__(self):
        if not self.terms:
            raise InvalidInputError("pauli sum needs at least one term", module="simcore")
        n = len(self.terms[0][1])
        for _, string in self.terms:
            if len(string) != n or not set(string) <= _PAULI_CHARS:
                raise InvalidInputError(f"bad pauli string {string!r}", module="simcore")

    @property
    def n_qubits(self) -> int:
        return len(self.terms[0][1])

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def is_diagonal(self) -> bool:
        return all(set(s) <= {"I", "Z"} for _, s in self.terms)


@dataclass(frozen=True)
class ProjectorPairObservable:
    """(I + sign * (|one><one| - |zero><zero|)) / 2 for orthogonal states."""

    state_one: StateVector
    state_zero: StateVector
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise InvalidInputError("sign must be +1 or -1", module="simcore")
        if self.state_one.n_qubits != self.state_zero.n_qubits:
            raise InvalidInputError("projector states must share qubit count", module="simcore")
        overlap = abs(self.state_one.inner(self.state_zero))
        if overlap > 1e-9:
            raise InvalidInputError(
                f"projector pair is not orthogonal (|<1|0>| = {overlap:.2e})",
                module="simcore",
            )

    @property
    def dim(self) -> int:
        return self.state_one.dim


@dataclass(frozen=True)
class PermutedDiagonalObservable:
    """A diagonal observable conjugated by a basis permutation.

    ``values[i]`` is already the permuted diagonal entry at index ``i``;
    the generating permutation is kept for provenance.  The spectrum is
    identical to the base observable's.
    """

    values: np.ndarray
    base_values: np.ndarray
    transpositions: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for name in ("values", "base_values"):
            vals = np.asarray(getattr(self, name), dtype=np.float64).copy()
            vals.flags.writeable = False
            object.__setattr__(self, name, vals)

    @property
    def dim(self) -> int:
        return self.values.shape[0]


Observable = Union[
    DiagonalObservable,
    PauliSumObservable,
    ProjectorPairObservable,
    PermutedDiagonalObservable,
]


def diagonal_values(obs: Observable) -> np.ndarray:
    """Dense diagonal of a diagonal-in-the-computational-basis observable."""
    if isinstance(obs, (DiagonalObservable, PermutedDiagonalObservable)):
        return obs.values
    if isinstance(obs, PauliSumObservable) and obs.is_diagonal():
        n = obs.n_qubits
        diag = np.zeros(1 << n)
        for coeff, string in obs.terms:
            term = np.full(1 << n, coeff)
            for q, ch in enumerate(string):
                if ch == "Z":
                    term *= 1.0 - 2.0 * _bit_values(n, q)
            diag += term
        return diag
    raise InvalidInputError("observable is not diagonal", module="simcore")


def _pauli_string_expectations(amps: np.ndarray, string: str) -> np.ndarray:
    """<psi| P |psi> per row of a (batch, dim) amplitude block."""
    n = len(string)
    dim = 1 << n
    if amps.shape[-1] != dim:
        raise InvalidInputError("dimension mismatch between state and observable", module="simcore")
    flip_mask = 0
    phase = np.ones(dim, dtype=np.complex128)
    for q, ch in enumerate(string):
        bit = 1 << (n - 1 - q)
        bits = _bit_values(n, q)
        if ch == "X":
            flip_mask ^= bit
        elif ch == "Y":
            flip_mask ^= bit
            # Y|0> = i|1>, Y|1> = -i|0>; phase keyed on the source bit
            phase = phase * np.where(bits == 0, 1j, -1j)
        elif ch == "Z":
            phase = phase * (1.0 - 2.0 * bits)
    idx = np.arange(dim) ^ flip_mask
    transformed = (amps * phase)[:, idx]
    return np.einsum("bi,bi->b", np.conj(amps), transformed)


def expectation_array(amps: np.ndarray, obs: Observable) -> np.ndarray:
    """Real expectation values for a (batch, dim) amplitude block."""
    single = amps.ndim == 1
    block = amps[None, :] if single else amps
    if isinstance(obs, (DiagonalObservable, PermutedDiagonalObservable)):
        if block.shape[-1] != obs.dim:
            raise InvalidInputError("dimension mismatch between state and observable", module="simcore")
        values = (np.abs(block) ** 2) @ obs.values
    elif isinstance(obs, PauliSumObservable):
        acc = np.zeros(block.shape[0], dtype=np.complex128)
        for coeff, string in obs.terms:
            acc += coeff * _pauli_string_expectations(block, string)
        worst = float(np.max(np.abs(acc.imag))) if acc.size else 0.0
        if worst > HERMITIAN_TOL:
            raise InvalidInputError(
                f"expectation has imaginary part {worst:.2e}; observable is not Hermitian",
                module="simcore",
            )
        values = acc.real
    elif isinstance(obs, ProjectorPairObservable):
        if block.shape[-1] != obs.dim:
            raise InvalidInputError("dimension mismatch between state and observable", module="simcore")
        p_one = np.abs(block @ np.conj(obs.state_one.amplitudes)) ** 2
        p_zero = np.abs(block @ np.conj(obs.state_zero.amplitudes)) ** 2
        values = 0.5 * (1.0 + obs.sign * (p_one - p_zero))
    else:
        raise InvalidInputError(f"unsupported observable {type(obs).__name__}", module="simcore")
    return values[0] if single else values


def expectation(state: StateVector, obs: Observable) -> float:
    return float(expectation_array(state.amplitudes, obs))


def permuted_observable(
    obs: Observable, k_transpositions: int, stream: RandomStream
) -> PermutedDiagonalObservable:
    """Conjugate a diagonal observable by k uniformly random transpositions.

    The diagonal entries are shuffled, the spectrum is untouched.  k = 0
    returns an identity-permuted copy.  The sampled transpositions are kept
    on the result so a run can be replayed.
    """
    base = diagonal_values(obs)
    dim = base.shape[0]
    if k_transpositions < 0:
        raise InvalidInputError("k_transpositions must be >= 0", module="simcore")
    gen = stream.generator()
    values = base.copy()
    pairs = []
    for _ in range(k_transpositions):
        i, j = gen.choice(dim, size=2, replace=False)
        values[i], values[j] = values[j], values[i]
        pairs.append((int(i), int(j)))
    return PermutedDiagonalObservable(values=values, base_values=base, transpositions=tuple(pairs))
