"""Exact Haar reference moments and Monte-Carlo ensemble moments.

For a Haar-random state, the squared overlaps with the eigenspaces of an
observable follow a Dirichlet law whose concentration is ``a`` times each
eigenvalue multiplicity (``a = 1/2`` for the real-sphere measure, ``a = 1``
for the complex measure).  Every reference moment here reduces to Dirichlet
moments of the eigenvalue vector, evaluated in log-gamma space with signed
compensated summation; alternating sums report a cancellation diagnostic
(largest partial term over the result's magnitude).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import InvalidInputError, ResourceCapError
from .rng import RandomStream
from .simcore.observables import (
    DiagonalObservable,
    Observable,
    PauliSumObservable,
    PermutedDiagonalObservable,
    ProjectorPairObservable,
    diagonal_values,
)

EIGENVALUE_MERGE_TOL = 1e-9
COMPOSITION_CAP = 10_000_000
REAL_SPHERE = 0.5
COMPLEX = 1.0
_BOOTSTRAP_DEFAULT = 200
_BOOTSTRAP_SEED = 0x5EED_B007


@dataclass(frozen=True)
class Spectrum:
    """Distinct eigenvalues with multiplicities of a Hermitian observable."""

    entries: tuple[tuple[float, int], ...]
    total_dim: int

    def __post_init__(self):
        if not self.entries:
            raise InvalidInputError("spectrum has no entries", module="moments")
        if any(m < 1 for _, m in self.entries):
            raise InvalidInputError("multiplicities must be positive", module="moments")
        values = [v for v, _ in self.entries]
        if any(b - a <= EIGENVALUE_MERGE_TOL for a, b in zip(values, values[1:])):
            raise InvalidInputError("spectrum entries must be distinct and sorted", module="moments")
        if sum(m for _, m in self.entries) != self.total_dim:
            raise InvalidInputError("multiplicities do not sum to total_dim", module="moments")

    @staticmethod
    def from_values(
        eigenvalues: Iterable[float], multiplicities: Iterable[int] | None = None
    ) -> "Spectrum":
        """Group raw eigenvalues, merging within the construction tolerance."""
        if multiplicities is None:
            pairs = [(float(v), 1) for v in eigenvalues]
        else:
            pairs = [(float(v), int(m)) for v, m in zip(eigenvalues, multiplicities)]
        pairs.sort(key=lambda p: p[0])
        merged: list[tuple[float, int]] = []
        for value, mult in pairs:
            if merged and value - merged[-1][0] <= EIGENVALUE_MERGE_TOL:
                prev_v, prev_m = merged[-1]
                total = prev_m + mult
                merged[-1] = ((prev_v * prev_m + value * mult) / total, total)
            else:
                merged.append((value, mult))
        total_dim = sum(m for _, m in merged)
        return Spectrum(tuple(merged), total_dim)

    @staticmethod
    def projector(rank: int, dim: int) -> "Spectrum":
        if not 0 < rank <= dim:
            raise InvalidInputError("projector rank must be in 1..dim", module="moments")
        if rank == dim:
            return Spectrum(((1.0, dim),), dim)
        return Spectrum(((0.0, dim - rank), (1.0, rank)), dim)

    @staticmethod
    def ones_fraction(n: int) -> "Spectrum":
        """Spectrum of the normalized ones-counting diagonal on n qubits."""
        entries = tuple((k / n, math.comb(n, k)) for k in range(n + 1))
        return Spectrum(entries, 1 << n)

    @staticmethod
    def signed_projector_pair(n: int) -> "Spectrum":
        """Spectrum of (I + (P1 - P0))/2 for orthogonal rank-1 P1, P0."""
        if n < 1 or (1 << n) < 2:
            raise InvalidInputError("need dim >= 2", module="moments")
        dim = 1 << n
        if dim == 2:
            return Spectrum(((0.0, 1), (1.0, 1)), 2)
        return Spectrum(((0.0, 1), (0.5, dim - 2), (1.0, 1)), dim)

    def eigenvalues(self) -> np.ndarray:
        return np.array([v for v, _ in self.entries])

    def multiplicities(self) -> np.ndarray:
        return np.array([m for _, m in self.entries])


@dataclass(frozen=True)
class DirichletParams:
    """Aggregated Dirichlet parameters for a spectrum at concentration a."""

    alphas: np.ndarray
    alpha0: float
    concentration: float

    @staticmethod
    def from_spectrum(spec: Spectrum, a: float) -> "DirichletParams":
        if a <= 0:
            raise InvalidInputError("concentration must be positive", module="moments")
        alphas = a * spec.multiplicities().astype(np.float64)
        return DirichletParams(alphas=alphas, alpha0=float(a * spec.total_dim), concentration=a)


@dataclass(frozen=True)
class MomentEstimate:
    """Monte-Carlo estimate of one raw or centered moment."""

    t: int
    kind: str  # "raw" or "centered"
    value: float
    std_error: float
    n_samples: int

    def __post_init__(self):
        if self.kind not in ("raw", "centered"):
            raise InvalidInputError("kind must be raw or centered", module="moments")
        if self.std_error < 0:
            raise InvalidInputError("std_error must be >= 0", module="moments")


@dataclass(frozen=True)
class AntiRandomnessRow:
    """Deviation of one ensemble moment from its Haar reference.

    ``value`` is the absolute deviation on the raw scale.  ``normalized``
    divides by the Haar reference when that reference is resolvably nonzero
    (``normalization_defined``); ``std_error`` lives on the same scale as
    the quantity the ``zero_consistent`` flag was evaluated on.
    """

    t: int
    value: float
    normalized: float
    std_error: float
    normalization_defined: bool
    zero_consistent: bool


@dataclass(frozen=True)
class AntiRandomnessReport:
    rows: tuple[AntiRandomnessRow, ...]
    epsilon: float
    mode: str


def spectrum_of(obs: Observable) -> Spectrum:
    """Closed-form spectrum for the supported observable representations."""
    if isinstance(obs, (DiagonalObservable, PermutedDiagonalObservable)):
        base = obs.values if isinstance(obs, DiagonalObservable) else obs.base_values
        return Spectrum.from_values(base)
    if isinstance(obs, ProjectorPairObservable):
        dim = obs.dim
        n = dim.bit_length() - 1
        return Spectrum.signed_projector_pair(n)
    if isinstance(obs, PauliSumObservable):
        if obs.is_diagonal():
            return Spectrum.from_values(diagonal_values(obs))
        identity = 0.0
        non_identity: list[tuple[float, str]] = []
        for coeff, string in obs.terms:
            if set(string) == {"I"}:
                identity += coeff
            else:
                non_identity.append((coeff, string))
        if len(non_identity) == 1:
            coeff = non_identity[0][0]
            dim = obs.dim
            return Spectrum.from_values(
                [identity - abs(coeff), identity + abs(coeff)], [dim // 2, dim // 2]
            )
        raise InvalidInputError(
            "no closed-form spectrum for this pauli sum", module="moments"
        )
    raise InvalidInputError(f"unsupported observable {type(obs).__name__}", module="moments")


def haar_mean(spec: Spectrum, a: float = REAL_SPHERE) -> float:
    """First Haar moment; equals trace over dimension for every a."""
    params = DirichletParams.from_spectrum(spec, a)
    return float(np.dot(spec.eigenvalues(), params.alphas) / params.alpha0)


def haar_variance(spec: Spectrum, a: float = REAL_SPHERE) -> float:
    params = DirichletParams.from_spectrum(spec, a)
    lam = spec.eigenvalues()
    s1 = float(np.dot(lam, params.alphas))
    s2 = float(np.dot(lam**2, params.alphas))
    a0 = params.alpha0
    return s2 / (a0 * (a0 + 1.0)) - s1 * s1 / (a0 * a0 * (a0 + 1.0))


def projector_haar_variance_bound(n: int) -> float:
    """Dimension-only cap on the real-sphere Haar variance of any projector."""
    if n < 1:
        raise InvalidInputError("n must be >= 1", module="moments")
    return 1.0 / (2 ** (n - 1) + 1)


def _composition_count(t: int, g: int) -> int:
    return math.comb(t + g - 1, g - 1)


def _kahan_add(total: float, comp: float, term: float) -> tuple[float, float]:
    y = term - comp
    s = total + y
    comp = (s - total) - y
    return s, comp


@dataclass(frozen=True)
class MomentValue:
    """A reference moment plus its summation diagnostics."""

    value: float
    max_term: float = 0.0

    @property
    def cancellation(self) -> float:
        if self.max_term == 0.0:
            return 1.0
        if self.value == 0.0:
            return math.inf
        return self.max_term / abs(self.value)

    def resolvably_zero(self) -> bool:
        """True when the result is below the summation's noise floor."""
        return abs(self.value) <= 1e-12 * self.max_term


def _rising(x: float, m: int) -> float:
    """Rising factorial x (x+1) ... (x+m-1); the gamma ratio at integer shift."""
    out = 1.0
    for j in range(m):
        out *= x + j
    return out


def _haar_raw_moment_value(
    spec: Spectrum, t: int, a: float, cap: int = COMPOSITION_CAP
) -> MomentValue:
    """Exact raw Haar moment by enumerating Dirichlet cross-moments.

    Gamma ratios carry only integer shifts here, so each term is a plain
    rising-factorial product; the log-gamma route is kept as a fallback for
    magnitudes that would overflow the direct products.
    """
    if t < 0:
        raise InvalidInputError("moment order must be >= 0", module="moments")
    if t == 0:
        return MomentValue(1.0, 1.0)
    g = len(spec.entries)
    count = _composition_count(t, g)
    if count > cap:
        raise ResourceCapError(
            f"exact moment needs {count} compositions, above the cap {cap}",
            module="moments",
        )
    params = DirichletParams.from_spectrum(spec, a)
    lam = spec.eigenvalues()
    alphas = params.alphas
    nonzero = [i for i in range(g) if lam[i] != 0.0]
    use_logs = t * math.log(max(params.alpha0, 2.0)) > 650  # direct products would overflow
    denominator = _rising(params.alpha0, t) if not use_logs else None
    factorial_t = math.factorial(t)
    base_log = gammaln(params.alpha0) - gammaln(params.alpha0 + t) + gammaln(t + 1)
    log_abs_lam = {i: math.log(abs(lam[i])) for i in nonzero}
    total, comp, max_term = 0.0, 0.0, 0.0
    # compositions of t over the nonzero-eigenvalue slots; zero eigenvalues
    # only contribute through the (excluded) l_i = 0 terms
    for combo in itertools.combinations_with_replacement(nonzero, t):
        counts: dict[int, int] = {}
        for i in combo:
            counts[i] = counts.get(i, 0) + 1
        if use_logs:
            log_mag = base_log
            sign = 1.0
            for i, li in counts.items():
                log_mag += li * log_abs_lam[i] - gammaln(li + 1)
                log_mag += gammaln(alphas[i] + li) - gammaln(alphas[i])
                if lam[i] < 0 and li % 2 == 1:
                    sign = -sign
            term = sign * math.exp(log_mag)
        else:
            multinomial = factorial_t
            numerator = 1.0
            for i, li in counts.items():
                multinomial //= math.factorial(li)
                numerator *= lam[i] ** li * _rising(alphas[i], li)
            term = multinomial * numerator / denominator
        max_term = max(max_term, abs(term))
        total, comp = _kahan_add(total, comp, term)
    return MomentValue(total, max_term)


def haar_raw_moment(
    spec: Spectrum, t: int, a: float = REAL_SPHERE, cap: int = COMPOSITION_CAP
) -> float:
    """Exact t-th raw Haar moment by enumerating Dirichlet cross-moments."""
    return _haar_raw_moment_value(spec, t, a, cap).value


def _haar_centered_moment_value(
    spec: Spectrum, t: int, a: float, cap: int = COMPOSITION_CAP
) -> MomentValue:
    if t < 1:
        raise InvalidInputError("moment order must be >= 1", module="moments")
    mean = haar_mean(spec, a)
    total, comp, max_term = 0.0, 0.0, 0.0
    for k in range(t + 1):
        raw = _haar_raw_moment_value(spec, k, a, cap)
        term = math.comb(t, k) * ((-1.0) ** (t - k)) * (mean ** (t - k)) * raw.value
        max_term = max(max_term, abs(term))
        total, comp = _kahan_add(total, comp, term)
    return MomentValue(total, max_term)


def haar_centered_moment(
    spec: Spectrum, t: int, a: float = REAL_SPHERE, cap: int = COMPOSITION_CAP
) -> float:
    """Exact t-th centered Haar moment via the binomial expansion."""
    return _haar_centered_moment_value(spec, t, a, cap).value


def _moment_matrix(values: np.ndarray, t_max: int) -> np.ndarray:
    """Rows: per-replicate value vectors; returns (raw_t..., centered_t...) stats."""
    if values.ndim == 1:
        values = values[None, :]
    powers = values[:, :, None] ** np.arange(1, t_max + 1)[None, None, :]
    raw = powers.mean(axis=1)
    mean = raw[:, 0]
    centered_base = values - mean[:, None]
    cpowers = centered_base[:, :, None] ** np.arange(1, t_max + 1)[None, None, :]
    centered = cpowers.mean(axis=1)
    centered[:, 0] = 0.0
    return np.concatenate([raw, centered], axis=1)


def bootstrap_std_errors(
    values: np.ndarray,
    stat_fn,
    n_boot: int = _BOOTSTRAP_DEFAULT,
    stream: RandomStream | None = None,
    chunk: int = 50,
) -> np.ndarray:
    """Standard errors of vector statistics under index resampling.

    ``stat_fn`` maps a (replicates, n) value matrix to a (replicates, k)
    statistic matrix.  The resampling stream defaults to a fixed internal
    seed so repeated calls are reproducible.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    gen = (stream or RandomStream(_BOOTSTRAP_SEED)).generator()
    stats = []
    done = 0
    while done < n_boot:
        block = min(chunk, n_boot - done)
        idx = gen.integers(0, n, size=(block, n))
        stats.append(stat_fn(values[idx]))
        done += block
    replicates = np.concatenate(stats, axis=0)
    return replicates.std(axis=0, ddof=1)


def estimate_moments(
    values: Sequence[float] | np.ndarray,
    t_max: int,
    bootstrap: int = _BOOTSTRAP_DEFAULT,
    stream: RandomStream | None = None,
) -> list[MomentEstimate]:
    """Raw and centered moment estimates with bootstrap standard errors."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.shape[0] < 2:
        raise InvalidInputError("need at least two values", module="moments")
    if t_max < 1:
        raise InvalidInputError("t_max must be >= 1", module="moments")
    point = _moment_matrix(values, t_max)[0]
    ses = bootstrap_std_errors(values, lambda m: _moment_matrix(m, t_max), bootstrap, stream)
    n = values.shape[0]
    out = []
    for j in range(t_max):
        out.append(MomentEstimate(j + 1, "raw", float(point[j]), float(ses[j]), n))
    for j in range(t_max):
        se = 0.0 if j == 0 else float(ses[t_max + j])
        out.append(MomentEstimate(j + 1, "centered", float(point[t_max + j]), se, n))
    return out


def _pick(estimates: Sequence[MomentEstimate], t: int, kind: str) -> MomentEstimate:
    for est in estimates:
        if est.t == t and est.kind == kind:
            return est
    raise InvalidInputError(f"no {kind} moment estimate for t={t}", module="moments")


def zero_consistency(value: float, std_error: float, epsilon: float) -> bool:
    """Deviation indistinguishable from zero at tolerance epsilon."""
    return abs(value) <= max(epsilon, 3.0 * std_error)


def anti_randomness(
    ensemble: Sequence[MomentEstimate],
    spec: Spectrum,
    a: float = REAL_SPHERE,
    epsilon: float = 0.07,
    t_max: int | None = None,
    mode: str = "mixed",
) -> AntiRandomnessReport:
    """Deviation of ensemble moments from the Haar reference, per order.

    ``mode`` selects which moments are compared: ``mixed`` (default) uses
    raw moments at t = 1 and centered moments at t >= 2; ``raw`` and
    ``centered`` force one convention for every order.  The normalized
    column divides by the same Haar reference the deviation was taken
    against; when that reference is zero up to summation noise (symmetric
    spectra have exactly vanishing odd centered moments) normalization is
    flagged undefined and the zero-consistency test falls back to the raw
    deviation.
    """
    if mode not in ("mixed", "raw", "centered"):
        raise InvalidInputError("mode must be mixed, raw or centered", module="moments")
    orders = sorted({est.t for est in ensemble})
    if t_max is not None:
        orders = [t for t in orders if t <= t_max]
    rows = []
    for t in orders:
        if mode == "raw" or (mode == "mixed" and t == 1):
            kind = "raw"
            ref = _haar_raw_moment_value(spec, t, a)
        else:
            kind = "centered"
            ref = _haar_centered_moment_value(spec, t, a)
        est = _pick(ensemble, t, kind)
        value = abs(est.value - ref.value)
        defined = not ref.resolvably_zero()
        if defined:
            normalized = value / abs(ref.value)
            se = est.std_error / abs(ref.value)
            zero_ok = zero_consistency(normalized, se, epsilon)
        else:
            normalized = math.nan
            se = est.std_error
            zero_ok = zero_consistency(value, se, epsilon)
        rows.append(
            AntiRandomnessRow(
                t=t,
                value=value,
                normalized=normalized,
                std_error=se,
                normalization_defined=defined,
                zero_consistent=zero_ok,
            )
        )
    return AntiRandomnessReport(tuple(rows), epsilon, mode)


def loss_variance_bound(spec: Spectrum, a: float, a2: float) -> float:
    """Cap on an ensemble's loss variance: Haar variance plus its 2-deviation."""
    if a2 < 0:
        raise InvalidInputError("A2 must be >= 0", module="moments")
    return haar_centered_moment(spec, 2, a) + a2


def moment_report_rows(estimates: Sequence[MomentEstimate]) -> list[tuple]:
    return [(e.t, e.kind, e.value, e.std_error, e.n_samples) for e in estimates]


def anti_randomness_rows(report: AntiRandomnessReport) -> list[tuple]:
    return [
        (r.t, r.value, r.normalized, r.std_error, r.zero_consistent) for r in report.rows
    ]
