import math

import numpy as np
import pytest

from marginscope.errors import InvalidInputError
from marginscope.rng import RandomStream
from marginscope.simcore import (
    DiagonalObservable,
    PauliSumObservable,
    ProjectorPairObservable,
    StateVector,
    apply_circuit,
    apply_gates_array,
    basis_state,
    circuit_inverse,
    cnot,
    diagonal_phase,
    dump_amplitudes,
    expectation,
    expectation_array,
    h,
    permuted_observable,
    rx,
    ry,
    rz,
    rzz,
    sample_haar_state,
    sample_haar_vector,
    sample_unitary,
    x,
)


def test_statevector_rejects_bad_norm_and_length():
    with pytest.raises(InvalidInputError):
        StateVector(1, np.array([1.0, 1.0]))
    with pytest.raises(InvalidInputError):
        StateVector(2, np.array([1.0, 0.0]))


def test_empty_circuit_is_identity():
    state = sample_haar_state(3, "complex", RandomStream(0))
    out = apply_circuit(state, [])
    assert np.allclose(out.amplitudes, state.amplitudes)


def test_h_involution_on_zero():
    out = apply_circuit(basis_state(1, 0), [h(0), h(0)])
    assert abs(out.amplitudes[0] - 1.0) < 1e-12


def test_cnot_truth_table():
    # qubit 0 is the most significant bit: |10> has index 2
    out = apply_circuit(basis_state(2, 2), [cnot(0, 1)])
    assert abs(out.amplitudes[3] - 1.0) < 1e-12
    out = apply_circuit(basis_state(2, 1), [cnot(0, 1)])
    assert abs(out.amplitudes[1] - 1.0) < 1e-12


def test_gate_index_out_of_range_rejected():
    with pytest.raises(InvalidInputError):
        apply_circuit(basis_state(2, 0), [h(2)])
    with pytest.raises(InvalidInputError):
        apply_circuit(basis_state(2, 0), [cnot(1, 1)])


def _random_circuit(n, depth, gen):
    gates = []
    for _ in range(depth):
        kind = gen.integers(0, 6)
        q = int(gen.integers(0, n))
        angle = float(gen.uniform(-np.pi, np.pi))
        if kind == 0:
            gates.append(h(q))
        elif kind == 1:
            gates.append(x(q))
        elif kind == 2:
            gates.append(rx(q, angle))
        elif kind == 3:
            gates.append(ry(q, angle))
        elif kind == 4:
            gates.append(rz(q, angle))
        else:
            if n == 1:
                gates.append(ry(q, angle))
            else:
                q2 = int(gen.integers(0, n - 1))
                q2 = q2 + 1 if q2 >= q else q2
                gates.append(rzz(q, q2, angle) if gen.integers(0, 2) else cnot(q, q2))
    return gates


def test_circuit_inverse_restores_state():
    gen = np.random.default_rng(7)
    for trial in range(200):
        n = int(gen.integers(1, 7))
        depth = int(gen.integers(1, 21))
        gates = _random_circuit(n, depth, gen)
        state = sample_haar_state(n, "complex", RandomStream(900 + trial))
        there = apply_circuit(state, gates)
        back = apply_circuit(there, circuit_inverse(gates))
        assert np.linalg.norm(back.amplitudes - state.amplitudes) < 1e-9


def test_rotation_inverse_is_angle_negation():
    state = sample_haar_state(2, "complex", RandomStream(3))
    for gate in (rx(0, 0.8), ry(1, -1.1), rz(0, 2.2), rzz(0, 1, 0.5)):
        out = apply_circuit(state, [gate, gate.inverse()])
        assert np.linalg.norm(out.amplitudes - state.amplitudes) < 1e-10


def test_diagonal_phase_gate():
    phases = np.exp(1j * np.linspace(0, 1, 4))
    state = sample_haar_state(2, "complex", RandomStream(4))
    out = apply_circuit(state, [diagonal_phase(phases)])
    assert np.allclose(out.amplitudes, state.amplitudes * phases)
    back = apply_circuit(out, [diagonal_phase(phases).inverse()])
    assert np.allclose(back.amplitudes, state.amplitudes)


def test_batched_matches_single():
    gen = np.random.default_rng(11)
    gates = _random_circuit(3, 12, gen)
    block = sample_haar_vector(8, "complex", RandomStream(5), count=6)
    batched = apply_gates_array(block, gates, 3)
    for i in range(6):
        single = apply_gates_array(block[i], gates, 3)
        assert np.allclose(batched[i], single, atol=1e-12)


def test_expectation_projector_eigenstate():
    obs = ProjectorPairObservable(basis_state(1, 0), basis_state(1, 1), sign=1)
    assert expectation(basis_state(1, 0), obs) == pytest.approx(1.0)
    assert expectation(basis_state(1, 1), obs) == pytest.approx(0.0)


def test_expectation_middle_flip_projector_on_basis_state():
    # (I - X_mid)/2 on any computational basis state gives 1/2
    n = 5
    mid = n // 2
    string = "".join("X" if q == mid else "I" for q in range(n))
    obs = PauliSumObservable(((0.5, "I" * n), (-0.5, string)))
    assert expectation(basis_state(n, 0), obs) == pytest.approx(0.5)


def test_expectation_dimension_mismatch():
    obs = DiagonalObservable(np.arange(4, dtype=float))
    with pytest.raises(InvalidInputError):
        expectation(basis_state(1, 0), obs)


def test_pauli_string_expectations_against_dense():
    gen = np.random.default_rng(13)
    n = 3
    paulis = {"I": np.eye(2), "X": np.array([[0, 1], [1, 0]], dtype=complex),
              "Y": np.array([[0, -1j], [1j, 0]]), "Z": np.diag([1.0, -1.0]).astype(complex)}
    for string in ("XYZ", "IZX", "YYI", "ZZZ", "IXI"):
        dense = paulis[string[0]]
        for ch in string[1:]:
            dense = np.kron(dense, paulis[ch])
        psi = gen.standard_normal(8) + 1j * gen.standard_normal(8)
        psi /= np.linalg.norm(psi)
        obs = PauliSumObservable(((1.0, string),))
        want = float(np.real(np.conj(psi) @ dense @ psi))
        got = float(expectation_array(psi, obs))
        assert got == pytest.approx(want, abs=1e-12)


def test_expectation_linearity_for_pauli_sums():
    gen = np.random.default_rng(17)
    psi = gen.standard_normal(8) + 1j * gen.standard_normal(8)
    psi /= np.linalg.norm(psi)
    a, b = 0.7, -1.3
    term_a = PauliSumObservable(((1.0, "XZI"),))
    term_b = PauliSumObservable(((1.0, "IYX"),))
    combined = PauliSumObservable(((a, "XZI"), (b, "IYX")))
    lhs = float(expectation_array(psi, combined))
    rhs = a * float(expectation_array(psi, term_a)) + b * float(expectation_array(psi, term_b))
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_haar_state_norm_and_determinism():
    for convention in ("complex", "real-sphere"):
        s1 = sample_haar_state(4, convention, RandomStream(8).child(convention))
        s2 = sample_haar_state(4, convention, RandomStream(8).child(convention))
        assert abs(np.linalg.norm(s1.amplitudes) - 1.0) < 1e-10
        assert np.array_equal(s1.amplitudes, s2.amplitudes)


@pytest.mark.parametrize(
    "convention,expected_var",
    [("complex", 1.0 / 12.0), ("real-sphere", 1.0 / 8.0)],
)
def test_haar_single_qubit_overlap_variance(convention, expected_var):
    # overlap with |0><0| is Beta-distributed; its variance is the oracle
    draws = sample_haar_vector(2, convention, RandomStream(99).child(convention), count=1_000_000)
    p0 = np.abs(draws[:, 0]) ** 2
    var = p0.var()
    m2 = (p0 - p0.mean()) ** 2
    se_var = m2.std() / math.sqrt(len(p0))
    assert abs(var - expected_var) < 3 * se_var


def test_haar_invariance_under_fixed_unitary():
    dim = 8
    w = sample_unitary(dim, RandomStream(21).child("w"))
    diag = np.linspace(0.0, 1.0, dim)
    obs = DiagonalObservable(diag)
    draws = sample_haar_vector(dim, "complex", RandomStream(21).child("states"), count=50_000)
    vals_plain = expectation_array(draws, obs)
    vals_rotated = expectation_array(draws @ w.T, obs)
    se = math.sqrt(vals_plain.var() / len(vals_plain) + vals_rotated.var() / len(vals_rotated))
    assert abs(vals_plain.mean() - vals_rotated.mean()) < 3 * se


def test_sample_unitary_is_unitary_with_unit_columns():
    u = sample_unitary(6, RandomStream(31))
    assert np.max(np.abs(u.conj().T @ u - np.eye(6))) < 1e-10
    assert np.allclose(np.linalg.norm(u, axis=0), 1.0)


def test_sample_unitary_first_entry_moment():
    total, count = 0.0, 0
    sq = []
    for i in range(20_000):
        u = sample_unitary(2, RandomStream(77).child(i))
        sq.append(abs(u[0, 0]) ** 2)
    sq = np.array(sq)
    se = sq.std() / math.sqrt(len(sq))
    assert abs(sq.mean() - 0.5) < 3 * se


def test_permuted_observable_preserves_sorted_diagonal():
    obs = DiagonalObservable(np.arange(16, dtype=float))
    permuted = permuted_observable(obs, 5, RandomStream(40))
    assert sorted(permuted.values.tolist()) == sorted(obs.values.tolist())
    identity = permuted_observable(obs, 0, RandomStream(41))
    assert np.array_equal(identity.values, obs.values)
    assert len(permuted.transpositions) == 5


def test_amplitude_dump_schema(tmp_path):
    path = dump_amplitudes(basis_state(1, 1), tmp_path / "amps.csv")
    text = path.read_text()
    assert text.splitlines()[0] == "index,re,im"
    assert text.splitlines()[2].startswith("1,1")
