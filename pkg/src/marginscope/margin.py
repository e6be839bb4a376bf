"""The class-margin metric and classification-failure bounds.

A binary classifier thresholds an expectation value ``o`` in [0, 1] at
``b``: predict 1 when ``o >= b``.  The class margin ``z`` folds the true
label into ``o`` so that ``z < b`` exactly when the point sits strictly on
its own class's side of the threshold, and the distance ``b - z`` is the
confidence.  Failure of a measurement-based classifier (wrong class, or
unresolved within the shot budget) is then controlled by the moments of
``z`` through Chebyshev, Bernstein and sub-gaussian tail bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InfeasibleError, InvalidInputError
from .rng import RandomStream

CORRECT = "correct"
INCORRECT = "incorrect"
UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class MarginSpec:
    """Threshold, copy budget and confidence for one classification setup."""

    M: int
    delta: float
    b: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.b < 1.0:
            raise InvalidInputError("threshold b must lie in (0, 1)", module="margin")
        if self.M < 1:
            raise InvalidInputError("copy count M must be >= 1", module="margin")
        if not 0.0 < self.delta < 1.0:
            raise InvalidInputError("confidence delta must lie in (0, 1)", module="margin")

    @property
    def window(self) -> float:
        """Half-width of the unresolvable band around b for M copies."""
        return math.sqrt(math.log(2.0 / self.delta) / (2.0 * self.M))


@dataclass(frozen=True)
class MarginSample:
    sample_id: int
    y: int
    o: float
    z: float


@dataclass(frozen=True)
class FailureBoundReport:
    kind: str  # chebyshev | bernstein | subgaussian
    mu1: float
    sigma2: float
    L: float
    spec: MarginSpec
    k_gap: float
    bound: float
    vacuous: bool


def class_margin(o: float, y: int, b: float = 0.5) -> float:
    """Label-aware transform of an expectation value onto the margin scale.

    For label 0 the margin is the expectation itself; for label 1 it is the
    piecewise-linear reflection that maps a confidently-1 outcome below b.
    Continuous in o with z = b at o = b, and z in [0, 1] throughout.
    """
    if not 0.0 < b < 1.0:
        raise InvalidInputError("threshold b must lie in (0, 1)", module="margin")
    if not -1e-12 <= o <= 1.0 + 1e-12:
        raise InvalidInputError(f"expectation {o} outside [0, 1]", module="margin")
    if y not in (0, 1):
        raise InvalidInputError("label must be 0 or 1", module="margin")
    o = min(max(o, 0.0), 1.0)
    if y == 0:
        return o
    if o < b:
        return 1.0 - ((1.0 - b) / b) * o
    return (b / (1.0 - b)) * (1.0 - o)


def make_margin_sample(sample_id: int, y: int, o: float, b: float = 0.5) -> MarginSample:
    return MarginSample(sample_id, y, o, class_margin(o, y, b))


def resolvable_threshold(spec: MarginSpec) -> float:
    """Largest margin that M copies can still certify as below b.

    May be <= 0, in which case nothing is resolvable at this budget.
    """
    return spec.b - spec.window


def simulate_classification(z: float, spec: MarginSpec, stream: RandomStream) -> str:
    """Shot-level outcome for one point with true margin z.

    Draws the number of wrong-class outcomes from Binomial(M, z) and applies
    the three-way decision rule: below the window is correct, above it is
    incorrect, inside it is unresolved.
    """
    if not 0.0 <= z <= 1.0:
        raise InvalidInputError("margin z must lie in [0, 1]", module="margin")
    gen = stream.generator()
    k = gen.binomial(spec.M, z)
    estimate = k / spec.M
    if estimate <= spec.b - spec.window:
        return CORRECT
    if estimate >= spec.b + spec.window:
        return INCORRECT
    return UNRESOLVED


def chebyshev_failure_bound(mu1: float, sigma2: float, spec: MarginSpec) -> FailureBoundReport:
    """Second-moment bound on the failure probability of a random point."""
    if sigma2 < 0:
        raise InvalidInputError("sigma2 must be >= 0", module="margin")
    k_gap = spec.b - mu1 - spec.window
    if k_gap <= 0:
        return FailureBoundReport("chebyshev", mu1, sigma2, math.nan, spec, k_gap, 1.0, True)
    bound = min(1.0, sigma2 / (k_gap * k_gap))
    return FailureBoundReport("chebyshev", mu1, sigma2, math.nan, spec, k_gap, bound, False)


def required_copies(
    mu1: float,
    sigma: float,
    b: float,
    k_fraction: float,
    delta: float,
    mode: str = "derived",
) -> int:
    """Minimum copy count so at most a k-fraction of points fail.

    ``derived`` inverts the Chebyshev failure bound, giving the condition
    2M / log(2/delta) >= gap**-2 with gap = b - mu1 - sigma / sqrt(k).
    ``verbatim`` keeps the printed form of the corollary (squared logarithm
    and 1/k weighting) for fidelity even though it is dimensionally
    inconsistent with the derivation; both are exposed on purpose.
    """
    if mode not in ("derived", "verbatim"):
        raise InvalidInputError("mode must be derived or verbatim", module="margin")
    if not 0.0 < k_fraction < 1.0:
        raise InvalidInputError("k_fraction must lie in (0, 1)", module="margin")
    if not 0.0 < delta < 1.0:
        raise InvalidInputError("delta must lie in (0, 1)", module="margin")
    if b <= mu1:
        raise InfeasibleError("threshold does not exceed the mean margin", module="margin")
    if sigma < 0:
        raise InvalidInputError("sigma must be >= 0", module="margin")
    log_term = math.log(2.0 / delta)
    if mode == "derived":
        gap = b - mu1 - sigma / math.sqrt(k_fraction)
        if gap <= 0:
            raise InfeasibleError(
                "mean-to-threshold gap closes before the target failure fraction",
                module="margin",
            )
        needed = log_term / (2.0 * gap * gap)
    else:
        gap = b - mu1 - sigma / k_fraction
        if gap <= 0:
            raise InfeasibleError(
                "mean-to-threshold gap closes before the target failure fraction",
                module="margin",
            )
        needed = log_term * log_term / (2.0 * gap * gap)
    return max(1, math.ceil(needed - 1e-12))


@dataclass(frozen=True)
class ScalingReport:
    """Least-squares decay diagnostics for a (n, mu1, sigma2) series."""

    gap_exponent: float
    gap_residual: float
    gap_exp_rate: float
    gap_exp_residual: float
    gap_decay: str  # "polynomial" | "exponential"
    var_poly_exponent: float
    var_poly_residual: float
    var_exp_rate: float
    var_exp_residual: float
    var_decay: str


# an exponential-decay verdict is the stronger claim; require its fit to be
# decisively better than the polynomial one before issuing it
_EXP_DECISIVE_FACTOR = 0.5


def _linear_fit(xs: np.ndarray, ys: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(xs, ys, 1)
    residual = float(np.mean((ys - (slope * xs + intercept)) ** 2))
    return float(slope), residual


def _classify(poly_res: float, exp_res: float) -> str:
    return "exponential" if exp_res < _EXP_DECISIVE_FACTOR * poly_res else "polynomial"


def efficiency_diagnostics(
    series: Sequence[tuple[int, float, float]], b: float = 0.5
) -> ScalingReport:
    """Classify how the margin gap and variance decay with qubit count.

    Both quantities are fit two ways, log value against log n (polynomial)
    and against n (exponential); the better-fitting model names the decay.
    Purely diagnostic, no verdict is enforced.
    """
    if len({n for n, _, _ in series}) < 3:
        raise InvalidInputError("need at least 3 distinct n", module="margin")
    ns = np.array([float(n) for n, _, _ in series])
    gaps = np.array([b - mu1 for _, mu1, _ in series])
    variances = np.array([s2 for _, _, s2 in series])
    if np.any(gaps <= 0) or np.any(variances <= 0):
        raise InvalidInputError("gaps and variances must be positive to fit", module="margin")
    gap_poly, gap_poly_res = _linear_fit(np.log(ns), np.log(gaps))
    gap_exp, gap_exp_res = _linear_fit(ns, np.log(gaps))
    var_poly, var_poly_res = _linear_fit(np.log(ns), np.log(variances))
    var_exp, var_exp_res = _linear_fit(ns, np.log(variances))
    return ScalingReport(
        gap_exponent=gap_poly,
        gap_residual=gap_poly_res,
        gap_exp_rate=gap_exp,
        gap_exp_residual=gap_exp_res,
        gap_decay=_classify(gap_poly_res, gap_exp_res),
        var_poly_exponent=var_poly,
        var_poly_residual=var_poly_res,
        var_exp_rate=var_exp,
        var_exp_residual=var_exp_res,
        var_decay=_classify(var_poly_res, var_exp_res),
    )


def bernstein_condition(centered: Sequence[float], sigma2: float, t_max: int) -> float:
    """Smallest L of the factorial moment-growth condition.

    The condition requires |centered_t|**(1/t) <= sigma2 * (L/e) * t for
    every t in 2..t_max; the returned L* is the max over t of the implied
    lower bounds, 0 when every centered moment vanishes and inf when
    sigma2 = 0 with a nonvanishing moment.
    """
    return _growth_constant(centered, t_max, lambda t: sigma2 * t / math.e)


def subgaussian_condition(centered: Sequence[float], t_max: int) -> float:
    """Smallest L of the sqrt(t) moment-growth condition."""
    return _growth_constant(centered, t_max, lambda t: math.sqrt(t / (2.0 * math.e)))


def _growth_constant(centered: Sequence[float], t_max: int, scale) -> float:
    if t_max < 2:
        raise InvalidInputError("t_max must be >= 2", module="margin")
    if len(centered) < t_max - 1:
        raise InvalidInputError("need centered moments for t = 2..t_max", module="margin")
    best = 0.0
    for t in range(2, t_max + 1):
        moment = centered[t - 2]
        if t % 2 == 0 and moment < -1e-15:
            raise InvalidInputError(f"even centered moment t={t} is negative", module="margin")
        root = abs(moment) ** (1.0 / t)
        if root == 0.0:
            continue
        denom = scale(t)
        if denom <= 0.0:
            return math.inf
        best = max(best, root / denom)
    return best


def bernstein_bound(mu1: float, sigma2: float, L: float, spec: MarginSpec) -> FailureBoundReport:
    if L < 0 or sigma2 < 0:
        raise InvalidInputError("L and sigma2 must be >= 0", module="margin")
    k = spec.b - spec.window - mu1
    if k <= 0:
        return FailureBoundReport("bernstein", mu1, sigma2, L, spec, k, 1.0, True)
    denom = 2.0 * (sigma2 + L * k)
    if denom == 0.0:
        bound = 0.0  # zero variance and zero growth constant: mass pinned at the mean
    else:
        bound = min(1.0, math.exp(-k * k / denom))
    return FailureBoundReport("bernstein", mu1, sigma2, L, spec, k, bound, False)


def subgaussian_bound(mu1: float, L: float, spec: MarginSpec) -> FailureBoundReport:
    if L <= 0:
        raise InvalidInputError("L must be > 0", module="margin")
    k = spec.b - spec.window - mu1
    if k <= 0:
        return FailureBoundReport("subgaussian", mu1, math.nan, L, spec, k, 1.0, True)
    bound = min(1.0, math.exp(-k * k / (3.0 * L * L)))
    return FailureBoundReport("subgaussian", mu1, math.nan, L, spec, k, bound, False)


@dataclass(frozen=True)
class EmpiricalFailure:
    """Failure rates measured two ways over a margin sample."""

    rate_exact: float
    stderr_exact: float
    rate_shots: float
    stderr_shots: float
    n_samples: int
    trials_per_sample: int


def proportion_stderr(rate: float, n: int) -> float:
    return math.sqrt(max(rate * (1.0 - rate), 0.0) / n)


def empirical_failure(
    samples: Sequence[MarginSample],
    spec: MarginSpec,
    trials_per_sample: int,
    stream: RandomStream,
) -> EmpiricalFailure:
    """Observed failure frequency: exact indicator and shot-level simulation.

    The exact rate counts margins at or above the resolvable threshold and
    is deterministic given the samples; the shot rate simulates the
    three-way decision and counts anything but a correct call as failure.
    """
    if not samples:
        raise InvalidInputError("need at least one sample", module="margin")
    if trials_per_sample < 1:
        raise InvalidInputError("trials_per_sample must be >= 1", module="margin")
    threshold = resolvable_threshold(spec)
    zs = np.array([s.z for s in samples])
    rate_exact = float(np.mean(zs >= threshold))
    failures = 0
    for i, sample in enumerate(samples):
        sub = stream.child("shots", i)
        gen = sub.generator()
        ks = gen.binomial(spec.M, sample.z, size=trials_per_sample)
        estimates = ks / spec.M
        correct = estimates <= spec.b - spec.window
        failures += int(trials_per_sample - np.count_nonzero(correct))
    total = len(samples) * trials_per_sample
    rate_shots = failures / total
    return EmpiricalFailure(
        rate_exact=rate_exact,
        stderr_exact=proportion_stderr(rate_exact, len(samples)),
        rate_shots=rate_shots,
        stderr_shots=proportion_stderr(rate_shots, total),
        n_samples=len(samples),
        trials_per_sample=trials_per_sample,
    )


def failure_report_row(report: FailureBoundReport) -> tuple:
    return (
        report.kind,
        report.mu1,
        report.sigma2,
        report.L,
        report.spec.b,
        report.spec.M,
        report.spec.delta,
        report.k_gap,
        report.bound,
        report.vacuous,
    )
