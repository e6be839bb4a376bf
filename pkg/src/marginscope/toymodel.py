"""Dirichlet-parameterized staircase states and the observable-bias study.

The ensemble draws a probability vector x over the n+1 "staircase" basis
states |0..0 1..1> from a Dirichlet law whose parameters are half the
binomial coefficients, plus a sign bit c applied as a global parity layer.
Through the ones-counting observable this ensemble reproduces every Haar
moment by construction; through the middle-qubit flip observable it
concentrates away from 1/2 and classification of c succeeds.  The
permuted-observable experiment shows the first fact is an artifact of
alignment, not of true randomness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import InvalidInputError
from .margin import MarginSpec
from .moments import (
    MomentValue,
    Spectrum,
    _haar_centered_moment_value,
    _haar_raw_moment_value,
    zero_consistency,
)
from .rng import RandomStream
from .simcore.gates import _bit_values
from .simcore.observables import (
    DiagonalObservable,
    Observable,
    PauliSumObservable,
    diagonal_values,
    permuted_observable,
)
from .simcore.state import StateVector


@dataclass(frozen=True)
class ToyParams:
    """Ensemble parameters for n qubits: alphas are C(n, k) / 2."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise InvalidInputError("need n >= 2", module="toymodel")

    @property
    def alphas(self) -> np.ndarray:
        return np.array([math.comb(self.n, k) / 2.0 for k in range(self.n + 1)])

    @property
    def alpha0(self) -> float:
        return float(2 ** (self.n - 1))

    def require_odd(self) -> None:
        if self.n % 2 == 0:
            raise InvalidInputError(
                "closed-form margins need odd n (equal middle multiplicities)",
                module="toymodel",
            )


@dataclass(frozen=True)
class ToySample:
    c: int
    x: np.ndarray

    def __post_init__(self):
        if self.c not in (0, 1):
            raise InvalidInputError("digit c must be 0 or 1", module="toymodel")
        x = np.asarray(self.x, dtype=np.float64)
        if np.any(x < -1e-15) or abs(float(x.sum()) - 1.0) > 1e-12:
            raise InvalidInputError("weights must be a probability vector", module="toymodel")
        x = x.copy()
        x.flags.writeable = False
        object.__setattr__(self, "x", x)


def dirichlet_sample(alphas: np.ndarray, stream: RandomStream, count: int = 1) -> np.ndarray:
    """(count, len(alphas)) Dirichlet draws via normalized gamma variates."""
    alphas = np.asarray(alphas, dtype=np.float64)
    if np.any(alphas <= 0):
        raise InvalidInputError("Dirichlet parameters must be positive", module="toymodel")
    gen = stream.generator()
    gammas = gen.standard_gamma(alphas, size=(count, alphas.shape[0]))
    return gammas / gammas.sum(axis=1, keepdims=True)


@lru_cache(maxsize=32)
def staircase_indices(n: int) -> tuple[int, ...]:
    """Basis index of |0^q 1^(n-q)> for q = 0..n (qubit 0 is the MSB)."""
    return tuple((1 << (n - q)) - 1 for q in range(n + 1))


def toy_state(sample: ToySample, n: int) -> StateVector:
    """Amplitudes sqrt(x_q) on the staircase states, with the parity phase.

    The sign layer contributes (-1)**(c * ones) on a basis state with that
    many ones, i.e. (-1)**(c * (n - q)).
    """
    if sample.x.shape[0] != n + 1:
        raise InvalidInputError("weight vector must have n + 1 entries", module="toymodel")
    amps = np.zeros(1 << n, dtype=np.complex128)
    for q, idx in enumerate(staircase_indices(n)):
        phase = -1.0 if (sample.c == 1 and (n - q) % 2 == 1) else 1.0
        amps[idx] = phase * math.sqrt(max(sample.x[q], 0.0))
    return StateVector(n, amps)


def oz_observable(n: int) -> DiagonalObservable:
    """Normalized ones count per basis index."""
    if n < 1:
        raise InvalidInputError("need n >= 1", module="toymodel")
    ones = np.zeros(1 << n)
    for q in range(n):
        ones += _bit_values(n, q)
    return DiagonalObservable(ones / n)


def ox_observable(n: int) -> PauliSumObservable:
    """Projector (I - X_mid) / 2 on the middle qubit."""
    if n < 2:
        raise InvalidInputError("need n >= 2", module="toymodel")
    mid = n // 2  # 0-indexed middle qubit
    string = "".join("X" if q == mid else "I" for q in range(n))
    return PauliSumObservable(((0.5, "I" * n), (-0.5, string)))


def toy_margin_closed(x: np.ndarray, n: int) -> float:
    """Closed-form margin 1/2 - sqrt of the middle-weight product (odd n)."""
    ToyParams(n).require_odd()
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != n + 1:
        raise InvalidInputError("weight vector must have n + 1 entries", module="toymodel")
    return 0.5 - math.sqrt(max(x[n // 2] * x[n // 2 + 1], 0.0))


def _middle_alpha(n: int) -> float:
    return math.comb(n, n // 2) / 2.0


def _rising(x: float, m: int) -> float:
    out = 1.0
    for j in range(m):
        out *= x + j
    return out


def _half_shift_log_excess(a: float) -> float:
    """log(Gamma(a + 1/2) / Gamma(a)) - log(a)/2.

    Direct log-gamma differencing loses all precision once log-gamma values
    reach ~1e15 (one ulp swamps the difference), so large arguments use the
    asymptotic series -1/(8a) + 1/(192 a**3) - 1/(640 a**5), whose
    truncation error is below 1e-17 for a >= 100.
    """
    if a < 100.0:
        return float(gammaln(a + 0.5) - gammaln(a)) - 0.5 * math.log(a)
    inv = 1.0 / a
    return -inv / 8.0 + inv**3 / 192.0 - inv**5 / 640.0


def _half_shift_ratio(a: float) -> float:
    """Gamma(a + 1/2) / Gamma(a), the only genuinely transcendental factor."""
    return math.sqrt(a) * math.exp(_half_shift_log_excess(a))


def _middle_pair_moment(k: int, n: int) -> float:
    """Expected k/2 power of the middle-weight product under the ensemble law.

    Integer gamma shifts reduce to rising factorials; only odd k needs the
    half-shift gamma ratio.
    """
    a0 = float(2 ** (n - 1))
    am = _middle_alpha(n)
    if k % 2 == 0:
        pair = _rising(am, k // 2)
    else:
        pair = _rising(am + 0.5, (k - 1) // 2) * _half_shift_ratio(am)
    return pair * pair / _rising(a0, k)


def toy_moment_value(t: int, n: int) -> MomentValue:
    """Exact t-th raw moment of the closed-form margin, with diagnostics."""
    ToyParams(n).require_odd()
    if t < 1:
        raise InvalidInputError("moment order must be >= 1", module="toymodel")
    total, comp, max_term = 0.0, 0.0, 0.0
    for k in range(t + 1):
        term = ((-1.0) ** k) * math.comb(t, k) * (0.5 ** (t - k)) * _middle_pair_moment(k, n)
        max_term = max(max_term, abs(term))
        y = term - comp
        s = total + y
        comp = (s - total) - y
        total = s
    return MomentValue(total, max_term)


def toy_moment_exact(t: int, n: int) -> float:
    return toy_moment_value(t, n).value


def toy_mean_exact(n: int) -> float:
    ToyParams(n).require_odd()
    if not 3 <= n <= 49:
        raise InvalidInputError("mean evaluated for odd n in 3..49", module="toymodel")
    return 0.5 - _middle_pair_moment(1, n)


def toy_variance_exact(n: int) -> float:
    """Exact margin variance, rearranged to dodge catastrophic cancellation.

    With a0 = 2**(n-1), am the middle alpha and r the squared gamma ratio,
    the raw form am**2/(a0(a0+1)) - r**2/a0**2 loses all precision once
    am**2 dwarfs the difference; expressing the bracket through
    expm1(4 * (log-gamma ratio - log sqrt(am))) keeps full accuracy.
    """
    ToyParams(n).require_odd()
    if not 3 <= n <= 49:
        raise InvalidInputError("variance evaluated for odd n in 3..49", module="toymodel")
    a0 = float(2 ** (n - 1))
    am = _middle_alpha(n)
    delta = _half_shift_log_excess(am)
    e4 = math.exp(4.0 * delta)
    bracket = -a0 * math.expm1(4.0 * delta) - e4
    return am * am * bracket / (a0 * a0 * (a0 + 1.0))


def gautschi_gap_bounds(n: int) -> tuple[float, float]:
    """Two-sided bracket on 1/2 minus the exact mean from the gamma-ratio
    inequality: C**2/(2**n (C+1)) below, C/2**n above, C the middle
    binomial coefficient."""
    ToyParams(n).require_odd()
    c = math.comb(n, n // 2)
    return c * c / (float(2**n) * (c + 1)), c / float(2**n)


def variance_asymptotic_bound(n: int) -> float:
    """Dimension-driven cap 2 / (pi (2**(n-1) + 1)) on the margin variance."""
    return 2.0 / (math.pi * (2 ** (n - 1) + 1))


@dataclass(frozen=True)
class ToyFailureBound:
    value: float
    vacuous: bool


def toy_failure_bound(n: int, spec: MarginSpec) -> ToyFailureBound:
    """Printed-form failure bound for the middle-qubit observable.

    Vacuous when the resolution window exceeds sqrt(8 / (pi n)).
    """
    ToyParams(n).require_odd()
    gap = math.sqrt(8.0 / (math.pi * n)) - spec.window
    if gap <= 0:
        return ToyFailureBound(1.0, True)
    value = (2.0 ** (-n) / (2.0 * math.pi)) / (gap * gap)
    return ToyFailureBound(min(1.0, value), False)


def sample_toy_ensemble(
    n: int, count: int, stream: RandomStream
) -> tuple[np.ndarray, np.ndarray]:
    """Digits (count,) and weight rows (count, n+1) for the ensemble."""
    params = ToyParams(n)
    digits = stream.child("digits").generator().integers(0, 2, size=count)
    weights = dirichlet_sample(params.alphas, stream.child("weights"), count)
    return digits, weights


def staircase_values(weights: np.ndarray, obs: Observable, n: int) -> np.ndarray:
    """Expectations of a diagonal observable over staircase-supported states.

    Phases never enter a diagonal expectation, so the value is just the
    weight vector dotted with the diagonal restricted to the staircase.
    """
    diag = diagonal_values(obs)
    support = np.asarray(staircase_indices(n))
    return weights @ diag[support]


@dataclass(frozen=True)
class ShadowDesignCell:
    t: int
    perm_count: int
    value: float  # averaged deviation, normalized scale when defined
    std_error: float
    normalization_defined: bool
    zero_consistent: bool


@dataclass(frozen=True)
class ShadowDesignResult:
    cells: tuple[ShadowDesignCell, ...]
    n: int
    samples: int
    perm_samples: int
    epsilon: float
    transposition_log: dict[int, tuple[tuple[tuple[int, int], ...], ...]]

    def csv_rows(self) -> list[tuple]:
        return [
            (c.t, c.perm_count, c.value if c.normalization_defined else math.nan,
             c.std_error, c.zero_consistent)
            for c in self.cells
        ]


FIG3_HEADER = ["t", "perm_count", "A_t_normalized", "std_error", "zero_consistent"]


def _deviation_profile(
    values: np.ndarray, refs: list[tuple[float, bool]], t_max: int
) -> np.ndarray:
    """Averaged per-observable deviations from the Haar reference.

    ``values`` has shape (observables, samples).  Order 1 compares raw
    means, higher orders compare centered moments; each deviation is
    divided by its reference when the reference is resolvably nonzero.
    """
    means = values.mean(axis=1)
    out = np.empty(t_max)
    deltas = values - means[:, None]
    power = np.ones_like(deltas)
    for t in range(1, t_max + 1):
        ref, defined = refs[t - 1]
        power *= deltas
        if t == 1:
            devs = np.abs(means - ref)
        else:
            devs = np.abs(power.mean(axis=1) - ref)
        if defined:
            devs = devs / abs(ref)
        out[t - 1] = devs.mean()
    return out


def shadow_design_experiment(
    n: int,
    t_max: int,
    perm_counts: list[int],
    perm_samples: int | None,
    samples: int,
    epsilon: float,
    stream: RandomStream,
    bootstrap: int = 200,
) -> ShadowDesignResult:
    """Anti-randomness of the ensemble through transposition-permuted
    observables.

    For each permutation count k, ``perm_samples`` observables are drawn
    independently (each the composition of k uniformly random basis
    transpositions of the ones-counting diagonal), the per-observable
    deviations from the Haar reference moments are averaged, and a state
    bootstrap supplies the standard error.  k = 0 reproduces the raw
    ensemble check.
    """
    if samples < 2:
        raise InvalidInputError("need at least two samples", module="toymodel")
    if t_max < 1:
        raise InvalidInputError("t_max must be >= 1", module="toymodel")
    m_perm = perm_samples if perm_samples is not None else 2 * n
    if m_perm < 1:
        raise InvalidInputError("perm_samples must be >= 1", module="toymodel")
    base = oz_observable(n)
    spectrum = Spectrum.from_values(diagonal_values(base))
    refs: list[tuple[float, bool]] = []
    for t in range(1, t_max + 1):
        mv = _haar_raw_moment_value(spectrum, t, 0.5) if t == 1 else _haar_centered_moment_value(spectrum, t, 0.5)
        refs.append((mv.value, not mv.resolvably_zero()))
    _, weights = sample_toy_ensemble(n, samples, stream.child("ensemble"))

    cells: list[ShadowDesignCell] = []
    perm_log: dict[int, tuple] = {}
    boot_gen = stream.child("bootstrap").generator()
    for k in sorted(perm_counts):
        observables = [
            permuted_observable(base, k, stream.child("perm", k, m)) for m in range(m_perm)
        ]
        perm_log[k] = tuple(o.transpositions for o in observables)
        values = np.stack([staircase_values(weights, o, n) for o in observables])
        point = _deviation_profile(values, refs, t_max)
        replicates = np.empty((bootstrap, t_max))
        for b in range(bootstrap):
            idx = boot_gen.integers(0, samples, size=samples)
            replicates[b] = _deviation_profile(values[:, idx], refs, t_max)
        ses = replicates.std(axis=0, ddof=1)
        for t in range(1, t_max + 1):
            cells.append(
                ShadowDesignCell(
                    t=t,
                    perm_count=k,
                    value=float(point[t - 1]),
                    std_error=float(ses[t - 1]),
                    normalization_defined=refs[t - 1][1],
                    zero_consistent=zero_consistency(
                        float(point[t - 1]), float(ses[t - 1]), epsilon
                    ),
                )
            )
    return ShadowDesignResult(
        cells=tuple(cells),
        n=n,
        samples=samples,
        perm_samples=m_perm,
        epsilon=epsilon,
        transposition_log=perm_log,
    )
