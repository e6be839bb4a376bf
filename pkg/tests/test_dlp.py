import math

import numpy as np
import pytest

from marginscope.dlp import (
    ConceptLabeler,
    DlpInstance,
    DlpReport,
    dlp_label,
    dlp_report,
    dlp_state,
    discrete_log,
    find_generator,
    h1_failure_bound,
    hyperplane_states,
    multiplicative_order,
    zs_margin,
    zs_margin_counting,
)
from marginscope.errors import InvalidInputError, ResourceCapError
from marginscope.margin import MarginSpec, efficiency_diagnostics
from marginscope.moments import Spectrum, haar_mean
from marginscope.rng import RandomStream


def test_find_generator_small_primes():
    assert find_generator(11) == 2
    assert find_generator(7) == 3
    assert find_generator(5) == 2  # candidate 4 has order 2, rejected


def test_find_generator_rejects_composites():
    with pytest.raises(InvalidInputError):
        find_generator(9)
    assert multiplicative_order(4, 5) == 2


def test_discrete_log_conventions():
    inst = DlpInstance(p=11, g=2, s=1, k_exp=1)
    assert discrete_log(inst, 8) == 3
    assert discrete_log(inst, 2) == 1
    assert discrete_log(inst, 1) == 10  # g**(p-1) = 1, exponents run 1..p-1
    assert pow(2, discrete_log(inst, 7), 11) == 7


def test_labels_partition_group():
    inst = DlpInstance(p=11, g=2, s=1, k_exp=1)
    assert dlp_label(inst, 8) == 1  # log 3 inside [1, 5]
    assert dlp_label(inst, 6) == 0  # log 9 outside
    assert dlp_label(inst, pow(2, 1, 11)) == 1  # left endpoint x = g**s
    labeler = ConceptLabeler(inst)
    zeros, ones = labeler.class_counts()
    assert zeros == ones == 5


def test_label_balance_across_concepts():
    inst0 = DlpInstance(p=23, g=find_generator(23), s=1, k_exp=2)
    for s in range(1, 23):
        inst = DlpInstance(p=23, g=inst0.g, s=s, k_exp=2)
        ones = sum(dlp_label(inst, x) for x in range(1, 23))
        assert ones == 11


def test_dlp_state_structure():
    inst = DlpInstance(p=11, g=2, s=1, k_exp=1)
    state = dlp_state(inst, 1)
    support = np.nonzero(state.amplitudes)[0].tolist()
    assert support == [1, 2]
    assert np.allclose(state.amplitudes[support], 1 / math.sqrt(2))
    single = DlpInstance(p=11, g=2, s=1, k_exp=0)
    state0 = dlp_state(single, 7)
    assert np.argmax(np.abs(state0.amplitudes)) == 7
    assert abs(np.sum(np.abs(state.amplitudes) ** 2) - 1.0) < 1e-12


def test_hyperplane_states_supports_and_orthogonality():
    inst = DlpInstance(p=11, g=2, s=1, k_exp=1)
    psi1, psi0 = hyperplane_states(inst)
    support1 = sorted(np.nonzero(psi1.amplitudes)[0].tolist())
    assert support1 == [2, 4, 5, 8, 10]  # g**1..g**5 mod 11
    assert abs(psi1.inner(psi0)) < 1e-12
    amp = math.sqrt(2 / (11 - 1))
    assert np.allclose(np.abs(psi1.amplitudes[support1]), amp)
    assert len(np.nonzero(psi0.amplitudes)[0]) == 5


def test_margin_of_orthogonal_state_is_half():
    inst = DlpInstance(p=11, g=2, s=1, k_exp=1)
    # index 0 is outside the group support entirely
    from marginscope.simcore import basis_state, expectation
    from marginscope.dlp import zs_observable

    assert expectation(basis_state(inst.n_qubits, 0), zs_observable(inst, 3)) == pytest.approx(0.5)


@pytest.mark.parametrize("p,k_exp", [(11, 1), (59, 2), (103, 3)])
def test_two_oracle_margin_agreement(p, k_exp):
    g = find_generator(p)
    inst = DlpInstance(p=p, g=g, s=3 % (p - 1) + 1, k_exp=k_exp)
    for x in range(1, p):
        sv = zs_margin(inst, x)
        counting = zs_margin_counting(inst, x)
        assert abs(sv - counting) < 1e-12


def test_margin_multiset_symmetric_under_concept_shift():
    p, g = 59, find_generator(59)
    s = 5
    shifted = (s - 1 + (p - 1) // 2) % (p - 1) + 1
    a = sorted(zs_margin_counting(DlpInstance(p=p, g=g, s=s, k_exp=2), x) for x in range(1, p))
    b = sorted(
        zs_margin_counting(DlpInstance(p=p, g=g, s=shifted, k_exp=2), x) for x in range(1, p)
    )
    assert np.allclose(a, b, atol=1e-12)


def test_typical_margin_value_at_p103():
    inst = DlpInstance(p=103, g=find_generator(103), s=1, k_exp=3)
    bulk = (1 - inst.delta_cap) / 2
    margins = [zs_margin_counting(inst, x) for x in range(1, 103)]
    close = [z for z in margins if abs(z - bulk) < 0.02]
    assert len(close) > 50  # the bulk of points sits near (1 - delta)/2


def test_haar_mean_of_margin_observable_is_half():
    for n in (4, 6, 10):
        assert haar_mean(Spectrum.signed_projector_pair(n)) == pytest.approx(0.5)


def test_delta_cap_values_and_admissibility():
    assert DlpInstance(p=59, g=2, s=1, k_exp=2).delta_cap == pytest.approx(8 / 59)
    with pytest.raises(InvalidInputError):
        DlpInstance(p=11, g=2, s=1, k_exp=3)  # delta = 16/11 not in (0, 1/2)
    with pytest.raises(InvalidInputError):
        DlpInstance(p=11, g=3, s=1, k_exp=1)  # 3 is not a generator mod 11


def test_report_fields_and_sandwiches():
    inst = DlpInstance(p=59, g=2, s=1, k_exp=2)
    spec = MarginSpec(M=2000, delta=0.05)
    report = dlp_report(inst, spec, RandomStream(4), trials_per_point=10)
    assert isinstance(report, DlpReport)
    d = inst.delta_cap
    assert report.g10_pass and report.sigma2 <= d * d
    assert d / 4 <= report.a1 <= d
    assert report.haar_mean_value == pytest.approx(0.5)
    assert 0.0 <= report.empirical.rate_shots <= 1.0
    row = report.csv_row()
    assert row[0] == 59 and row[5] == pytest.approx(d)


def test_report_prime_cap():
    inst = DlpInstance(p=1021, g=find_generator(1021), s=1, k_exp=6)
    with pytest.raises(ResourceCapError):
        dlp_report(inst, MarginSpec(M=100, delta=0.1), RandomStream(0), prime_cap=500)


def test_h1_bound_vacuous_when_window_wins():
    inst = DlpInstance(p=59, g=2, s=1, k_exp=2)
    bound, vacuous = h1_failure_bound(inst, MarginSpec(M=5, delta=0.05))
    assert vacuous and bound == 1.0
    bound_big_m, vac2 = h1_failure_bound(inst, MarginSpec(M=10**9, delta=0.05))
    assert not vac2
    d = inst.delta_cap
    assert bound_big_m == pytest.approx(min(1.0, d * d / (d / 2 - d * d) ** 2), rel=1e-6)


def test_gap_scaling_is_polynomial_in_n():
    series = []
    for p in (59, 103, 251, 509, 1021):
        g = find_generator(p)
        n = (p - 1).bit_length()
        inst = DlpInstance(p=p, g=g, s=1, k_exp=n - 4)
        zs = np.array([zs_margin_counting(inst, x) for x in range(1, p)])
        series.append((n, float(zs.mean()), float(zs.var())))
    report = efficiency_diagnostics(series, b=0.5)
    assert report.gap_decay == "polynomial"
    assert report.var_decay == "polynomial"
    assert -1.5 < report.gap_exponent < -0.2
