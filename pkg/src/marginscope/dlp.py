"""Discrete-logarithm classification case study on small primes.

Data points are the elements of the multiplicative group mod p; the hidden
concept labels a cyclic half-interval of exponents.  The feature map
superposes a geometric run of group elements, and the classifying
observable is built from the two half-interval superposition states.  All
statistics are exhaustive over the group, with a fast interval-counting
route cross-checked against full statevector arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidInputError, ResourceCapError
from .margin import EmpiricalFailure, MarginSpec, proportion_stderr, resolvable_threshold
from .moments import Spectrum, haar_mean, haar_variance
from .rng import RandomStream
from .simcore.observables import ProjectorPairObservable, expectation
from .simcore.state import StateVector

DEFAULT_PRIME_CAP = 4099


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def multiplicative_order(g: int, p: int) -> int:
    value = g % p
    order = 1
    while value != 1:
        value = (value * g) % p
        order += 1
        if order > p:
            raise InvalidInputError(f"{g} is not invertible mod {p}", module="dlp")
    return order


def find_generator(p: int) -> int:
    """Smallest primitive root of the odd prime p."""
    if not is_prime(p) or p < 3:
        raise InvalidInputError(f"{p} is not an odd prime", module="dlp")
    for g in range(2, p):
        if multiplicative_order(g, p) == p - 1:
            return g
    raise InvalidInputError(f"no generator found for {p}", module="dlp")


@dataclass(frozen=True)
class DlpInstance:
    """One problem instance: prime, generator, concept index, window size."""

    p: int
    g: int
    s: int
    k_exp: int

    def __post_init__(self):
        if not is_prime(self.p) or self.p < 5:
            raise InvalidInputError(f"{self.p} is not an odd prime >= 5", module="dlp")
        if multiplicative_order(self.g, self.p) != self.p - 1:
            raise InvalidInputError(f"{self.g} does not generate Z_{self.p}^*", module="dlp")
        if not 1 <= self.s <= self.p - 1:
            raise InvalidInputError("concept index s must lie in 1..p-1", module="dlp")
        if self.k_exp < 0 or (1 << self.k_exp) > self.p - 1:
            raise InvalidInputError(
                "superposition size 2**k_exp must not exceed the group order", module="dlp"
            )
        if not 0.0 < self.delta_cap < 0.5:
            raise InvalidInputError(
                f"margin scale {self.delta_cap} outside (0, 1/2); instance inadmissible",
                module="dlp",
            )

    @property
    def n_qubits(self) -> int:
        return max(1, (self.p - 1).bit_length())

    @property
    def delta_cap(self) -> float:
        """Margin scale 2**(k+1) / p separating the ensemble from Haar."""
        return float(2 ** (self.k_exp + 1)) / self.p

    @cached_property
    def dlog_table(self) -> np.ndarray:
        """dlog_table[x] = exponent of x in 1..p-1 (log of 1 is p-1)."""
        table = np.zeros(self.p, dtype=np.int64)
        value = 1
        for e in range(1, self.p):
            value = (value * self.g) % self.p
            table[value] = e
        return table

    @property
    def half_len(self) -> int:
        return (self.p - 1) // 2


@dataclass(frozen=True)
class ConceptLabeler:
    """Labeling function of one concept: a cyclic half-interval of exponents."""

    instance: DlpInstance

    @property
    def interval_length(self) -> int:
        return (self.instance.p - 3) // 2

    def label(self, x: int) -> int:
        return dlp_label(self.instance, x)

    def class_counts(self) -> tuple[int, int]:
        ones = sum(self.label(x) for x in range(1, self.instance.p))
        return self.instance.p - 1 - ones, ones


def discrete_log(instance: DlpInstance, x: int) -> int:
    if not 1 <= x <= instance.p - 1:
        raise InvalidInputError(f"{x} is not in the group", module="dlp")
    return int(instance.dlog_table[x])


def dlp_label(instance: DlpInstance, x: int) -> int:
    """1 when the exponent of x falls in the concept's cyclic half-interval."""
    offset = (discrete_log(instance, x) - instance.s) % (instance.p - 1)
    return 1 if offset <= (instance.p - 3) // 2 else 0


def dlp_state(instance: DlpInstance, x: int) -> StateVector:
    """Uniform superposition over x, xg, xg**2, ... (2**k_exp terms)."""
    if not 1 <= x <= instance.p - 1:
        raise InvalidInputError(f"{x} is not in the group", module="dlp")
    n = instance.n_qubits
    terms = 1 << instance.k_exp
    amps = np.zeros(1 << n, dtype=np.complex128)
    value = x
    weight = 1.0 / math.sqrt(terms)
    for _ in range(terms):
        amps[value] += weight
        value = (value * instance.g) % instance.p
    return StateVector(n, amps)


def hyperplane_states(instance: DlpInstance) -> tuple[StateVector, StateVector]:
    """The two disjoint half-interval superpositions (class 1, class 0).

    Exponent ranges are i in [0, (p-3)/2] and [(p-1)/2, p-2] relative to s,
    chosen disjoint so the projectors are exactly orthogonal.
    """
    n = instance.n_qubits
    half = instance.half_len
    weight = 1.0 / math.sqrt(half)
    amps1 = np.zeros(1 << n, dtype=np.complex128)
    amps0 = np.zeros(1 << n, dtype=np.complex128)
    value = pow(instance.g, instance.s, instance.p)
    for i in range(instance.p - 1):
        if i <= half - 1:
            amps1[value] += weight
        else:
            amps0[value] += weight
        value = (value * instance.g) % instance.p
    return StateVector(n, amps1), StateVector(n, amps0)


def zs_observable(instance: DlpInstance, x: int) -> ProjectorPairObservable:
    psi1, psi0 = hyperplane_states(instance)
    sign = 1 if dlp_label(instance, x) == 0 else -1
    return ProjectorPairObservable(state_one=psi1, state_zero=psi0, sign=sign)


def _interval_overlap(start: int, length: int, period: int, half: int) -> int:
    """|{start, ..., start+length-1} mod period  intersect  [0, half-1]|."""
    start %= period
    end = start + length
    count = max(0, min(end, half) - start)
    if end > period:  # wrapped part re-enters the interval at 0
        count += min(end - period, half)
    return count


def zs_margin_counting(instance: DlpInstance, x: int) -> float:
    """Margin via overlap counts between exponent windows, no statevectors."""
    j = (discrete_log(instance, x) - instance.s) % (instance.p - 1)
    terms = 1 << instance.k_exp
    half = instance.half_len
    c1 = _interval_overlap(j, terms, instance.p - 1, half)
    c0 = terms - c1
    scale = 2.0 / ((instance.p - 1) * terms)
    p1 = c1 * c1 * scale
    p0 = c0 * c0 * scale
    y = 1 if j <= half - 1 else 0
    sign = -1.0 if y == 1 else 1.0
    return 0.5 * (1.0 + sign * (p1 - p0))


def zs_margin(instance: DlpInstance, x: int) -> float:
    """Margin via explicit statevector inner products."""
    return expectation(dlp_state(instance, x), zs_observable(instance, x))


def _exhaustive_margins(instance: DlpInstance) -> np.ndarray:
    return np.array([zs_margin_counting(instance, x) for x in range(1, instance.p)])


@dataclass(frozen=True)
class DlpReport:
    """Exhaustive statistics and bound checks for one instance."""

    instance: DlpInstance
    spec: MarginSpec
    mu1: float
    mu2: float
    sigma2: float
    a1: float
    a2: float
    haar_mean_value: float
    haar_variance_value: float
    g8_pass: bool
    g10_pass: bool
    h1_bound: float
    h1_vacuous: bool
    empirical: EmpiricalFailure

    def csv_row(self) -> tuple:
        inst = self.instance
        return (
            inst.p,
            inst.g,
            inst.s,
            inst.k_exp,
            inst.n_qubits,
            inst.delta_cap,
            self.mu1,
            self.mu2,
            self.sigma2,
            self.a1,
            self.a2,
            self.g8_pass,
            self.g10_pass,
            self.h1_bound,
            self.empirical.rate_shots,
            self.empirical.stderr_shots,
        )


DLP_REPORT_HEADER = [
    "p",
    "g",
    "s",
    "k_exp",
    "n",
    "delta_cap",
    "mu1",
    "mu2",
    "sigma2",
    "A1",
    "A2",
    "G8_pass",
    "G10_pass",
    "H1_bound",
    "empirical_failure",
    "failure_stderr",
]


def h1_failure_bound(instance: DlpInstance, spec: MarginSpec) -> tuple[float, bool]:
    """Margin-scale failure bound: delta_cap**2 over the squared gap.

    Vacuous (clamped to 1) when the resolution window eats the whole
    delta_cap/2 - delta_cap**2 gap.
    """
    d = instance.delta_cap
    gap = d / 2.0 - d * d - spec.window
    if gap <= 0:
        return 1.0, True
    return min(1.0, (d * d) / (gap * gap)), False


def dlp_report(
    instance: DlpInstance,
    spec: MarginSpec,
    stream: RandomStream,
    trials_per_point: int = 20,
    prime_cap: int = DEFAULT_PRIME_CAP,
) -> DlpReport:
    """Sweep every group element, then evaluate the analytic sandwiches.

    The G8 flag checks delta/2 - delta**2 <= A1 <= delta/2 and G10 checks
    sigma2 <= delta**2; both are reported, not asserted, because they are
    asymptotic statements evaluated at desk-scale primes.
    """
    if instance.p > prime_cap:
        raise ResourceCapError(
            f"exhaustive sweep capped at p <= {prime_cap}, got {instance.p}", module="dlp"
        )
    zs = _exhaustive_margins(instance)
    mu1 = float(zs.mean())
    mu2 = float(np.mean(zs**2))
    sigma2 = mu2 - mu1 * mu1
    spectrum = Spectrum.signed_projector_pair(instance.n_qubits)
    h_mean = haar_mean(spectrum)
    h_var = haar_variance(spectrum)
    a1 = abs(mu1 - h_mean)
    a2 = abs(sigma2 - h_var)
    d = instance.delta_cap
    g8 = d / 2.0 - d * d <= a1 <= d / 2.0
    g10 = sigma2 <= d * d
    h1, h1_vac = h1_failure_bound(instance, spec)

    # shot-level failure over the whole group, vectorized per point
    failures = 0
    gen = stream.child("shots").generator()
    ks = gen.binomial(spec.M, zs[:, None], size=(zs.shape[0], trials_per_point))
    correct = (ks / spec.M) <= resolvable_threshold(spec)
    failures = int(correct.size - np.count_nonzero(correct))
    total = int(correct.size)
    rate = failures / total
    empirical = EmpiricalFailure(
        rate_exact=float(np.mean(zs >= resolvable_threshold(spec))),
        stderr_exact=proportion_stderr(float(np.mean(zs >= resolvable_threshold(spec))), zs.shape[0]),
        rate_shots=rate,
        stderr_shots=proportion_stderr(rate, total),
        n_samples=int(zs.shape[0]),
        trials_per_sample=trials_per_point,
    )
    return DlpReport(
        instance=instance,
        spec=spec,
        mu1=mu1,
        mu2=mu2,
        sigma2=sigma2,
        a1=a1,
        a2=a2,
        haar_mean_value=h_mean,
        haar_variance_value=h_var,
        g8_pass=g8,
        g10_pass=g10,
        h1_bound=h1,
        h1_vacuous=h1_vac,
        empirical=empirical,
    )
