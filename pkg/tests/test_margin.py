import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import binom

from marginscope.errors import InfeasibleError, InvalidInputError
from marginscope.margin import (
    CORRECT,
    INCORRECT,
    UNRESOLVED,
    EmpiricalFailure,
    MarginSpec,
    bernstein_bound,
    bernstein_condition,
    chebyshev_failure_bound,
    class_margin,
    efficiency_diagnostics,
    empirical_failure,
    make_margin_sample,
    required_copies,
    resolvable_threshold,
    simulate_classification,
    subgaussian_bound,
    subgaussian_condition,
)
from marginscope.rng import RandomStream


# ------------------------------------------------------------ class margin


def test_class_margin_examples():
    assert class_margin(0.3, 0, 0.5) == pytest.approx(0.3)
    assert class_margin(0.8, 1, 0.5) == pytest.approx(0.2)
    assert class_margin(0.1, 1, 0.25) == pytest.approx(0.7)


def test_class_margin_rejects_bad_threshold():
    with pytest.raises(InvalidInputError):
        class_margin(0.5, 0, 0.0)
    with pytest.raises(InvalidInputError):
        class_margin(0.5, 1, 1.0)


def test_margin_grid_equivalence_and_range():
    # z < b exactly when the point lies strictly on its class's side of b
    for b in np.linspace(0.1, 0.9, 9):
        for y in (0, 1):
            for o in np.linspace(0.0, 1.0, 101):
                z = class_margin(float(o), y, float(b))
                assert -1e-12 <= z <= 1.0 + 1e-12
                correct_side = o > b if y == 1 else o < b
                if abs(o - b) > 1e-12:
                    assert (z < b) == correct_side
                else:
                    assert z == pytest.approx(b, abs=1e-12)
    assert class_margin(0.0, 1, 0.3) == pytest.approx(1.0)
    assert class_margin(1.0, 1, 0.3) == pytest.approx(0.0)


@settings(max_examples=200, deadline=None)
@given(
    o=st.floats(min_value=0.0, max_value=1.0),
    y=st.integers(min_value=0, max_value=1),
    b=st.floats(min_value=0.01, max_value=0.99),
)
def test_class_margin_stays_in_unit_interval(o, y, b):
    z = class_margin(o, y, b)
    assert 0.0 <= z <= 1.0 + 1e-12


def test_margin_sample_consistency():
    sample = make_margin_sample(3, 1, 0.8, 0.5)
    assert sample.z == pytest.approx(0.2)
    assert sample.y == 1 and sample.o == 0.8


# ------------------------------------------------------------ resolution window


def test_resolvable_threshold_values():
    assert resolvable_threshold(MarginSpec(M=50, delta=2 / math.e)) == pytest.approx(0.4)
    assert resolvable_threshold(MarginSpec(M=1000, delta=0.05)) == pytest.approx(0.4570530, abs=1e-6)
    huge = resolvable_threshold(MarginSpec(M=10**12, delta=0.5))
    assert abs(huge - 0.5) < 1e-5


def test_window_monotonicity():
    base = resolvable_threshold(MarginSpec(M=100, delta=0.1))
    assert resolvable_threshold(MarginSpec(M=400, delta=0.1)) > base
    assert resolvable_threshold(MarginSpec(M=100, delta=0.01)) < base


# ------------------------------------------------------------ shot simulation


def test_simulate_classification_degenerate_margins():
    spec = MarginSpec(M=100, delta=0.05)
    assert simulate_classification(0.0, spec, RandomStream(1)) == CORRECT
    assert simulate_classification(1.0, spec, RandomStream(2)) == INCORRECT


def test_simulate_classification_boundary_is_mostly_unresolved():
    spec = MarginSpec(M=1000, delta=0.05)
    outcomes = [
        simulate_classification(spec.b, spec, RandomStream(50).child(i)) for i in range(10_000)
    ]
    freq = outcomes.count(UNRESOLVED) / len(outcomes)
    # binomial oracle for P(b - w < k/M < b + w)
    w = spec.window
    hi = math.ceil(spec.M * (spec.b + w)) - 1
    lo = math.floor(spec.M * (spec.b - w))
    expected = binom.cdf(hi, spec.M, spec.b) - binom.cdf(lo, spec.M, spec.b)
    se = math.sqrt(expected * (1 - expected) / len(outcomes))
    assert abs(freq - expected) < 3 * se
    assert freq >= 0.9


# ------------------------------------------------------------ failure bounds


def test_chebyshev_bound_cases():
    spec = MarginSpec(M=50, delta=2 / math.e)  # window exactly 0.1
    zero_var = chebyshev_failure_bound(0.3, 0.0, spec)
    assert zero_var.bound == 0.0 and not zero_var.vacuous
    report = chebyshev_failure_bound(0.3, 0.01, MarginSpec(M=50, delta=2 / math.e))
    assert report.k_gap == pytest.approx(0.1)
    assert report.bound == pytest.approx(1.0)
    vac = chebyshev_failure_bound(0.6, 0.01, spec)
    assert vac.vacuous and vac.bound == 1.0


def test_required_copies_zero_variance():
    assert required_copies(0.4, 0.0, 0.5, 0.25, 2 / math.e, mode="derived") == 50


def test_required_copies_infeasible():
    with pytest.raises(InfeasibleError):
        required_copies(0.6, 0.0, 0.5, 0.25, 0.05)
    with pytest.raises(InfeasibleError):
        required_copies(0.45, 0.2, 0.5, 0.25, 0.05, mode="derived")


def test_required_copies_modes_differ():
    # at the sigma/k corner the printed form degenerates while the inversion
    # stays finite; with a smaller sigma both are finite and still disagree
    derived = required_copies(0.3, 0.05, 0.5, 0.25, 0.05, mode="derived")
    assert derived > 0
    with pytest.raises(InfeasibleError):
        required_copies(0.3, 0.05, 0.5, 0.25, 0.05, mode="verbatim")
    derived2 = required_copies(0.3, 0.02, 0.5, 0.25, 0.05, mode="derived")
    verbatim2 = required_copies(0.3, 0.02, 0.5, 0.25, 0.05, mode="verbatim")
    assert derived2 != verbatim2
    # derived inverts the failure bound: the bound at M=derived meets the target
    spec = MarginSpec(M=derived, delta=0.05)
    assert chebyshev_failure_bound(0.3, 0.05**2, spec).bound <= 0.25 + 1e-9


def test_bernstein_bound_values():
    spec = MarginSpec(M=50, delta=2 / math.e)  # window 0.1
    report = bernstein_bound(0.3, 0.01, 0.1, spec)  # k = 0.1
    assert report.bound == pytest.approx(math.exp(-0.25), rel=1e-12)
    report = bernstein_bound(0.2, 0.01, 0.0, spec)  # k = 0.2, L = 0
    assert report.bound == pytest.approx(math.exp(-2.0), rel=1e-12)
    assert bernstein_bound(0.6, 0.01, 0.1, spec).vacuous


def test_subgaussian_bound_values():
    spec = MarginSpec(M=50, delta=2 / math.e)
    report = subgaussian_bound(0.1, 0.1, spec)  # k = 0.3
    assert report.bound == pytest.approx(math.exp(-3.0), rel=1e-12)
    report = subgaussian_bound(0.25, 0.05, spec)  # k = 0.15
    assert report.bound == pytest.approx(math.exp(-3.0), rel=1e-12)
    assert subgaussian_bound(0.5, 0.1, spec).vacuous


def test_bernstein_condition_constant():
    sigma2 = 0.01
    centered = [(sigma2 * t / math.e) ** t for t in range(2, 9)]
    assert bernstein_condition(centered, sigma2, 8) == pytest.approx(1.0, rel=1e-9)
    assert bernstein_condition([0.0] * 7, sigma2, 8) == 0.0
    assert bernstein_condition([0.1, 0.0], 0.0, 3) == math.inf


def test_subgaussian_condition_constant():
    centered = [(t / (2 * math.e)) ** (t / 2) for t in range(2, 9)]
    assert subgaussian_condition(centered, 8) == pytest.approx(1.0, rel=1e-9)
    assert subgaussian_condition([0.0] * 7, 8) == 0.0


def test_subgaussian_condition_truncated_gaussian():
    gen = RandomStream(8).generator()
    values = np.clip(gen.normal(0.25, 0.05, size=200_000), 0.0, 1.0)
    mu = values.mean()
    centered = [float(np.mean((values - mu) ** t)) for t in range(2, 9)]
    assert subgaussian_condition(centered, 8) <= 0.2


# ------------------------------------------------------------ scaling diagnostics


def test_efficiency_diagnostics_polynomial_gap():
    series = [(n, 0.5 - 1.0 / n, 1.0 / n**2) for n in (4, 8, 16, 32)]
    report = efficiency_diagnostics(series, b=0.5)
    assert report.gap_exponent == pytest.approx(-1.0, abs=0.05)


def test_efficiency_diagnostics_exponential_variance():
    series = [(n, 0.4, 2.0**-n) for n in (4, 6, 8, 10, 12)]
    report = efficiency_diagnostics(series, b=0.5)
    assert report.var_decay == "exponential"


def test_efficiency_diagnostics_toy_gap_scaling():
    from marginscope.toymodel import toy_mean_exact, toy_variance_exact

    # the asymptotic gap scale is sqrt(2/(pi n)); the diagnostic recovers the
    # -1/2 slope exactly on that oracle series
    oracle = [(n, 0.5 - math.sqrt(2.0 / (math.pi * n)), 2.0**-n) for n in (5, 7, 9, 11, 13, 15)]
    assert efficiency_diagnostics(oracle, b=0.5).gap_exponent == pytest.approx(-0.5, abs=1e-9)
    # the exact series is still pre-asymptotic at these sizes: the fitted
    # slope sits above -1/2 and moves toward it as n grows
    series = [(n, toy_mean_exact(n), toy_variance_exact(n)) for n in (5, 7, 9, 11, 13, 15)]
    report = efficiency_diagnostics(series, b=0.5)
    assert -0.5 < report.gap_exponent < -0.3
    wider = [(n, toy_mean_exact(n), toy_variance_exact(n)) for n in (11, 13, 15, 17, 19, 21)]
    assert abs(efficiency_diagnostics(wider, b=0.5).gap_exponent + 0.5) < abs(
        report.gap_exponent + 0.5
    )
    assert report.var_decay == "exponential"


def test_efficiency_diagnostics_needs_three_points():
    with pytest.raises(InvalidInputError):
        efficiency_diagnostics([(2, 0.4, 0.1), (4, 0.45, 0.05)])


# ------------------------------------------------------------ empirical failure


def test_empirical_failure_degenerate():
    spec = MarginSpec(M=100, delta=0.05)
    zeros = [make_margin_sample(i, 0, 0.0) for i in range(10)]
    ones = [make_margin_sample(i, 0, 1.0) for i in range(10)]
    assert empirical_failure(zeros, spec, 5, RandomStream(0)).rate_exact == 0.0
    assert empirical_failure(zeros, spec, 5, RandomStream(0)).rate_shots == 0.0
    assert empirical_failure(ones, spec, 5, RandomStream(0)).rate_exact == 1.0
    assert empirical_failure(ones, spec, 5, RandomStream(0)).rate_shots == 1.0


def _beta_mixture(gen, n_components=2):
    weights = gen.dirichlet(np.ones(n_components))
    a = gen.uniform(2.0, 40.0, size=n_components)
    target_means = gen.uniform(0.05, 0.34, size=n_components)
    b = a * (1.0 / target_means - 1.0)
    return weights, a, b


def _beta_mixture_moments(weights, a, b, t_max):
    # exact raw moments of Beta(a, b): prod_j (a + j) / (a + b + j)
    raws = np.zeros(t_max + 1)
    raws[0] = 1.0
    for t in range(1, t_max + 1):
        acc = 0.0
        for w, ai, bi in zip(weights, a, b):
            prod = 1.0
            for j in range(t):
                prod *= (ai + j) / (ai + bi + j)
            acc += w * prod
        raws[t] = acc
    mu = raws[1]
    centered = []
    for t in range(2, t_max + 1):
        val = sum(
            math.comb(t, k) * ((-mu) ** (t - k)) * raws[k] for k in range(t + 1)
        )
        centered.append(val)
    return mu, centered


def _sample_mixture(weights, a, b, count, gen):
    comp = gen.choice(len(weights), size=count, p=weights)
    return gen.beta(a[comp], b[comp])


def test_bound_validity_on_beta_mixtures():
    spec = MarginSpec(M=1000, delta=0.05)
    gen = RandomStream(77).generator()
    for trial in range(12):
        weights, a, b = _beta_mixture(gen)
        mu, centered = _beta_mixture_moments(weights, a, b, 8)
        sigma2 = centered[0]
        values = _sample_mixture(weights, a, b, 20_000, gen)
        rate = float(np.mean(values >= resolvable_threshold(spec)))
        se = math.sqrt(max(rate * (1 - rate), 1e-12) / len(values))
        cheb = chebyshev_failure_bound(mu, sigma2, spec)
        if not cheb.vacuous:
            assert rate <= cheb.bound + 3 * se
        l_bern = bernstein_condition(centered, sigma2, 8)
        bern = bernstein_bound(mu, sigma2, l_bern, spec)
        if not bern.vacuous:
            assert rate <= bern.bound + 3 * se
        l_sub = subgaussian_condition(centered, 8)
        sub = subgaussian_bound(mu, l_sub, spec)
        if not sub.vacuous:
            assert rate <= sub.bound + 3 * se


def test_empirical_failure_shot_rate_brackets_exact(tmp_path):
    spec = MarginSpec(M=400, delta=0.1)
    gen = RandomStream(13).generator()
    samples = [make_margin_sample(i, 0, float(o)) for i, o in enumerate(gen.uniform(0, 1, 200))]
    result = empirical_failure(samples, spec, 25, RandomStream(14))
    assert isinstance(result, EmpiricalFailure)
    assert 0.0 <= result.rate_shots <= 1.0
    # shot noise can only add failures around the threshold band in both directions
    assert abs(result.rate_shots - result.rate_exact) < 0.1
