"""Variational classifiers: fixed feature maps and data re-uploading.

Both model families classify 2-feature points with the full parity string
as observable; margins use the +1/-1 label convention where class 1 is
rewarded for a positive parity expectation.  Evaluation is batched over
data points (amplitude blocks of shape (batch, 2**n)) and gradients use the
exact parameter-shift identity, valid here because every trainable angle
enters through a single Pauli rotation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidInputError
from .rng import RandomStream
from .simcore.gates import Gate, _bit_values, apply_gate_array, cnot, h, ry, rz, rzz
from .simcore.sampling import sample_unitary

MODEL_KINDS = ("feature-brick", "feature-nonbrick", "reupload")
ENTANGLERS = ("ring", "chain", "none")


@lru_cache(maxsize=32)
def parity_diagonal(n: int) -> np.ndarray:
    """Eigenvalues of the n-fold tensor product of Z per basis index."""
    ones = np.zeros(1 << n)
    for q in range(n):
        ones += _bit_values(n, q)
    return (-1.0) ** ones


def _ring_pairs(n: int) -> list[tuple[int, int]]:
    if n < 2:
        return []
    if n == 2:
        return [(0, 1)]  # a full ring would cancel to identity
    return [(q, (q + 1) % n) for q in range(n)]


def _entangler_pairs(n: int, entangler: str) -> list[tuple[int, int]]:
    if entangler not in ENTANGLERS:
        raise InvalidInputError(f"unknown entangler {entangler!r}", module="varmodels")
    if entangler == "ring":
        return _ring_pairs(n)
    if entangler == "chain":
        return [(q, q + 1) for q in range(n - 1)]
    return []


def _encoding_pairs(n: int, kind: str, repetition: int) -> list[tuple[int, int]]:
    """Neighbor pairs entangled in one encoding repetition.

    The brick layout staggers the pairs like brickwork, even-offset pairs on
    even repetitions and odd-offset pairs on odd ones; the non-brick layout
    walks the full linear chain every time.  (Within a repetition the ZZ
    rotations commute, so only the across-repetition staggering
    distinguishes the two.)
    """
    if kind == "brick":
        start = 0 if repetition % 2 == 0 else 1
        return [(q, q + 1) for q in range(start, n - 1, 2)]
    if kind == "nonbrick":
        return [(q, q + 1) for q in range(n - 1)]
    raise InvalidInputError(f"unknown encoding kind {kind!r}", module="varmodels")


def encode_features(xs: np.ndarray, n: int, kind: str, repetitions: int = 2) -> np.ndarray:
    """Amplitude block of the data-encoding circuit applied to |0...0>.

    Per repetition: H on every qubit, a Z rotation by the qubit's assigned
    feature (feature index q mod 2), then ZZ rotations by
    2 (pi - f_i)(pi - f_j) over the layout's neighbor pairs.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    if xs.shape[1] != 2:
        raise InvalidInputError("expected 2 features per point", module="varmodels")
    batch = xs.shape[0]
    feats = [xs[:, q % 2] for q in range(n)]
    amps = np.zeros((batch, 1 << n), dtype=np.complex128)
    amps[:, 0] = 1.0
    for rep in range(repetitions):
        for q in range(n):
            apply_gate_array(amps, h(q), n)
        for q in range(n):
            apply_gate_array(amps, rz(q, feats[q]), n)
        pairs = _encoding_pairs(n, kind, rep) if n >= 2 else []
        for i, j in pairs:
            angle = 2.0 * (math.pi - feats[i]) * (math.pi - feats[j])
            apply_gate_array(amps, rzz(i, j, angle), n)
    return amps


def feature_map(x: Sequence[float], n: int, kind: str) -> np.ndarray:
    """Encoded amplitudes for a single point."""
    return encode_features(np.asarray(x)[None, :], n, kind)[0]


def hea_ansatz(theta: np.ndarray, n: int, layers: int) -> list[Gate]:
    """Hardware-efficient ansatz: per layer a Y-rotation wall then a CNOT ring."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (n * layers,):
        raise InvalidInputError(
            f"theta must have length n*L = {n * layers}", module="varmodels"
        )
    gates: list[Gate] = []
    for m in range(layers):
        for q in range(n):
            gates.append(ry(q, float(theta[m * n + q])))
        for c, t in _ring_pairs(n):
            gates.append(cnot(c, t))
    return gates


@dataclass(frozen=True)
class FeatureMapModel:
    """Fixed encoding followed by a trainable change of basis."""

    n: int
    encoding: str  # brick | nonbrick
    layers: int
    theta: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=np.float64)
        if theta.shape != (self.n * self.layers,):
            raise InvalidInputError("theta length must be n*L", module="varmodels")
        theta = theta.copy()
        theta.flags.writeable = False
        object.__setattr__(self, "theta", theta)

    @property
    def kind(self) -> str:
        return f"feature-{self.encoding}"

    def with_theta(self, theta: np.ndarray) -> "FeatureMapModel":
        return replace(self, theta=theta)


@dataclass(frozen=True)
class ReuploadModel:
    """Interleaved data and trainable rotations; 4 parameters per qubit-layer."""

    n: int
    layers: int
    theta: np.ndarray
    entangler: str = "ring"

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=np.float64)
        if theta.shape != (self.layers, self.n, 4):
            raise InvalidInputError("theta shape must be (L, n, 4)", module="varmodels")
        theta = theta.copy()
        theta.flags.writeable = False
        object.__setattr__(self, "theta", theta)

    @property
    def kind(self) -> str:
        return "reupload"

    def with_theta(self, theta: np.ndarray) -> "ReuploadModel":
        return replace(self, theta=theta)


Model = FeatureMapModel | ReuploadModel


def init_model(
    kind: str, n: int, layers: int, stream: RandomStream, entangler: str = "ring"
) -> Model:
    gen = stream.generator()
    if kind == "reupload":
        theta = gen.uniform(0.0, 2.0 * math.pi, size=(layers, n, 4))
        return ReuploadModel(n=n, layers=layers, theta=theta, entangler=entangler)
    if kind in ("feature-brick", "feature-nonbrick"):
        theta = gen.uniform(0.0, 2.0 * math.pi, size=n * layers)
        return FeatureMapModel(n=n, encoding=kind.split("-", 1)[1], layers=layers, theta=theta)
    raise InvalidInputError(f"unknown model kind {kind!r}", module="varmodels")


def _reupload_amplitudes(
    xs: np.ndarray,
    theta: np.ndarray,
    n: int,
    layers: int,
    entangler: str,
    shift: tuple[int, int, int, float] | None = None,
) -> np.ndarray:
    """Run the re-uploading circuit on |0...0> for every data row.

    ``shift`` optionally adds an offset to the rotation angle generated by
    one (layer, qubit, slot) parameter, which is how the parameter-shift
    rule is evaluated without rebuilding gate lists.
    """
    xs = np.atleast_2d(xs)
    batch = xs.shape[0]
    amps = np.zeros((batch, 1 << n), dtype=np.complex128)
    amps[:, 0] = 1.0
    pairs = _entangler_pairs(n, entangler)
    for l in range(layers):
        for q in range(n):
            angle_z = theta[l, q, 0] * xs[:, 0] + theta[l, q, 1]
            angle_y = theta[l, q, 2] * xs[:, 1] + theta[l, q, 3]
            if shift is not None and shift[0] == l and shift[1] == q:
                if shift[2] in (0, 1):
                    angle_z = angle_z + shift[3]
                else:
                    angle_y = angle_y + shift[3]
            apply_gate_array(amps, rz(q, angle_z), n)
            apply_gate_array(amps, ry(q, angle_y), n)
        for c, t in pairs:
            apply_gate_array(amps, cnot(c, t), n)
    return amps


def _parity_values(amps: np.ndarray, n: int) -> np.ndarray:
    return (np.abs(amps) ** 2) @ parity_diagonal(n)


def parity_expectations(
    model: Model, xs: np.ndarray, encoded: np.ndarray | None = None
) -> np.ndarray:
    """<parity> per data row; ``encoded`` caches the feature-map block."""
    if isinstance(model, ReuploadModel):
        amps = _reupload_amplitudes(xs, model.theta, model.n, model.layers, model.entangler)
    else:
        amps = encoded.copy() if encoded is not None else encode_features(xs, model.n, model.encoding)
        for gate in hea_ansatz(model.theta, model.n, model.layers):
            apply_gate_array(amps, gate, model.n)
    return _parity_values(amps, model.n)


def _signed_labels(ys: np.ndarray) -> np.ndarray:
    ys = np.asarray(ys)
    if not np.all((ys == 0) | (ys == 1)):
        raise InvalidInputError("labels must be 0/1", module="varmodels")
    return 2.0 * ys - 1.0


def margins(model: Model, xs: np.ndarray, ys: np.ndarray, encoded: np.ndarray | None = None) -> np.ndarray:
    """Per-point margins z = (1 - y_signed * <parity>) / 2."""
    return 0.5 * (1.0 - _signed_labels(ys) * parity_expectations(model, xs, encoded))


def model_margin(model: Model, x: Sequence[float], y: int) -> float:
    return float(margins(model, np.asarray(x)[None, :], np.array([y]))[0])


def loss(model: Model, xs: np.ndarray, ys: np.ndarray, encoded: np.ndarray | None = None) -> float:
    """Sum of margins over a split; 0 is perfect confident classification."""
    if len(xs) == 0:
        raise InvalidInputError("empty split", module="varmodels")
    return float(margins(model, xs, ys, encoded).sum())


def accuracy(model: Model, xs: np.ndarray, ys: np.ndarray) -> float:
    return float(np.mean(margins(model, xs, ys) < 0.5))


def _reupload_shift_values(
    xs: np.ndarray, theta: np.ndarray, n: int, layers: int, entangler: str
) -> np.ndarray:
    """Parity values of every +-pi/2 angle shift, one mega-batched pass.

    The two parameters feeding one rotation (feature scale and offset)
    share the same shifted evaluations, so there are 2 rotations x 2 signs
    blocks per (layer, qubit).  Returns shape (layers, n, 2, 2, batch) with
    axes (layer, qubit, rotation z/y, sign +/-, data row).
    """
    batch = xs.shape[0]
    blocks = layers * n * 4
    rows = blocks * batch
    x1 = np.tile(xs[:, 0], blocks)
    x2 = np.tile(xs[:, 1], blocks)
    amps = np.zeros((rows, 1 << n), dtype=np.complex128)
    amps[:, 0] = 1.0
    pairs = _entangler_pairs(n, entangler)
    half_pi = math.pi / 2
    for l in range(layers):
        for q in range(n):
            angle_z = theta[l, q, 0] * x1 + theta[l, q, 1]
            angle_y = theta[l, q, 2] * x2 + theta[l, q, 3]
            base = (l * n + q) * 4 * batch
            angle_z[base : base + batch] += half_pi
            angle_z[base + batch : base + 2 * batch] -= half_pi
            angle_y[base + 2 * batch : base + 3 * batch] += half_pi
            angle_y[base + 3 * batch : base + 4 * batch] -= half_pi
            apply_gate_array(amps, rz(q, angle_z), n)
            apply_gate_array(amps, ry(q, angle_y), n)
        for c, t in pairs:
            apply_gate_array(amps, cnot(c, t), n)
    return _parity_values(amps, n).reshape(layers, n, 2, 2, batch)


def _feature_shift_values(
    encoded: np.ndarray, theta: np.ndarray, n: int, layers: int
) -> np.ndarray:
    """Parity values of every ansatz-angle shift: shape (params, 2, batch).

    Shifted circuits share their prefix with the unshifted one, so the state
    entering each layer is computed once and only the suffix is replayed for
    that layer's 2n shifted blocks (halves the work of a full replay).
    """
    batch = encoded.shape[0]
    half_pi = math.pi / 2
    prefix = encoded.copy()
    out = np.empty((n * layers, 2, batch))
    for m in range(layers):
        # 2n blocks: (qubit in layer m) x (+/- shift), advanced through the suffix
        block = np.tile(prefix, (2 * n, 1))
        rows = block.shape[0]
        for q in range(n):
            j = m * n + q
            angle = np.full(rows, theta[j])
            angle[2 * q * batch : (2 * q + 1) * batch] += half_pi
            angle[(2 * q + 1) * batch : (2 * q + 2) * batch] -= half_pi
            apply_gate_array(block, ry(q, angle), n)
        for c, t in _ring_pairs(n):
            apply_gate_array(block, cnot(c, t), n)
        for later in range(m + 1, layers):
            for q in range(n):
                apply_gate_array(block, ry(q, float(theta[later * n + q])), n)
            for c, t in _ring_pairs(n):
                apply_gate_array(block, cnot(c, t), n)
        out[m * n : (m + 1) * n] = _parity_values(block, n).reshape(n, 2, batch)
        if m + 1 < layers:  # advance the shared prefix through layer m
            for q in range(n):
                apply_gate_array(prefix, ry(q, float(theta[m * n + q])), n)
            for c, t in _ring_pairs(n):
                apply_gate_array(prefix, cnot(c, t), n)
    return out


def gradient(
    model: Model, xs: np.ndarray, ys: np.ndarray, encoded: np.ndarray | None = None
) -> np.ndarray:
    """Exact loss gradient from +-pi/2 angle shifts.

    Data-scale parameters pick up the per-point feature as a chain factor
    because the rotation angle is an affine function of the feature.
    """
    half_neg_labels = -0.5 * _signed_labels(ys)
    if isinstance(model, ReuploadModel):
        shifted = _reupload_shift_values(
            np.atleast_2d(xs), model.theta, model.n, model.layers, model.entangler
        )
        dv = 0.5 * (shifted[:, :, :, 0, :] - shifted[:, :, :, 1, :])  # (L, n, 2, B)
        grad = np.empty((model.layers, model.n, 4))
        grad[:, :, 0] = np.sum(half_neg_labels * xs[:, 0] * dv[:, :, 0, :], axis=-1)
        grad[:, :, 1] = np.sum(half_neg_labels * dv[:, :, 0, :], axis=-1)
        grad[:, :, 2] = np.sum(half_neg_labels * xs[:, 1] * dv[:, :, 1, :], axis=-1)
        grad[:, :, 3] = np.sum(half_neg_labels * dv[:, :, 1, :], axis=-1)
        return grad
    if encoded is None:
        encoded = encode_features(xs, model.n, model.encoding)
    shifted = _feature_shift_values(encoded, model.theta, model.n, model.layers)
    dv = 0.5 * (shifted[:, 0, :] - shifted[:, 1, :])  # (params, B)
    return np.sum(half_neg_labels * dv, axis=-1)


@dataclass(frozen=True)
class TrainConfig:
    max_iters: int = 300
    step: float = 0.05
    tolerance: float = 0.0  # stop when the gradient norm drops below this
    seed: int = 0


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    loss: float
    best_loss: float


@dataclass(frozen=True)
class TrainResult:
    model: Model
    trace: tuple[TraceEntry, ...]

    @property
    def initial_loss(self) -> float:
        return self.trace[0].loss

    @property
    def final_loss(self) -> float:
        return self.trace[-1].best_loss


def train(model: Model, xs: np.ndarray, ys: np.ndarray, config: TrainConfig) -> TrainResult:
    """Adam on parameter-shift gradients with best-iterate selection.

    The returned model carries the parameters of the lowest-loss iterate,
    so the final loss never exceeds the initial one.  Deterministic given
    the config seed (randomness only enters through initialization when the
    caller used a seeded init).
    """
    encoded = None
    if isinstance(model, FeatureMapModel):
        encoded = encode_features(xs, model.n, model.encoding)
    theta = np.array(model.theta, dtype=np.float64)
    shape = theta.shape
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    current = loss(model, xs, ys, encoded)
    best_loss, best_theta = current, theta.copy()
    trace = [TraceEntry(0, current, best_loss)]
    for it in range(1, config.max_iters + 1):
        g = gradient(model.with_theta(theta), xs, ys, encoded)
        gnorm = float(np.linalg.norm(g))
        if config.tolerance > 0 and gnorm < config.tolerance:
            break
        m = beta1 * m + (1 - beta1) * g
        v = beta2 * v + (1 - beta2) * g * g
        m_hat = m / (1 - beta1**it)
        v_hat = v / (1 - beta2**it)
        theta = theta - config.step * m_hat / (np.sqrt(v_hat) + eps)
        current = loss(model.with_theta(theta.reshape(shape)), xs, ys, encoded)
        if current < best_loss:
            best_loss, best_theta = current, theta.copy()
        trace.append(TraceEntry(it, current, best_loss))
    return TrainResult(model=model.with_theta(best_theta.reshape(shape)), trace=tuple(trace))


@dataclass(frozen=True)
class LabeledDataset:
    """Synthetic 2-feature dataset labeled by a hidden measured unitary."""

    train_x: np.ndarray
    train_y: np.ndarray
    test_x: np.ndarray
    test_y: np.ndarray
    seed: int
    grid_side: int
    test_count: int
    unitary_attempt: int


def _dataset_labels(xs: np.ndarray, v: np.ndarray) -> np.ndarray:
    encoded = encode_features(xs, 2, "brick")
    rotated = encoded @ v.T
    values = (np.abs(rotated) ** 2) @ parity_diagonal(2)
    return (values > 0).astype(np.int64)


def generate_dataset(seed: int, grid_side: int, test_count: int, max_attempts: int = 100) -> LabeledDataset:
    """Equispaced training grid plus uniform test split, labeled by the sign
    of the parity expectation after a seeded Haar unitary.

    A unitary whose labels degenerate to a single class on the grid is
    rejected and resampled from the next substream.
    """
    if grid_side < 2:
        raise InvalidInputError("grid_side must be >= 2", module="varmodels")
    if test_count < 1:
        raise InvalidInputError("test_count must be >= 1", module="varmodels")
    stream = RandomStream(seed).child("dataset")
    ticks = 2.0 * math.pi * np.arange(grid_side) / grid_side
    g1, g2 = np.meshgrid(ticks, ticks, indexing="ij")
    train_x = np.column_stack([g1.ravel(), g2.ravel()])
    test_x = stream.child("test-points").generator().uniform(0.0, 2.0 * math.pi, size=(test_count, 2))
    for attempt in range(max_attempts):
        v = sample_unitary(4, stream.child("unitary", attempt))
        train_y = _dataset_labels(train_x, v)
        if 0 < int(train_y.sum()) < train_y.shape[0]:
            test_y = _dataset_labels(test_x, v)
            return LabeledDataset(
                train_x=train_x,
                train_y=train_y,
                test_x=test_x,
                test_y=test_y,
                seed=seed,
                grid_side=grid_side,
                test_count=test_count,
                unitary_attempt=attempt,
            )
    raise InvalidInputError("could not draw a non-degenerate labeling unitary", module="varmodels")


def model_to_json(model: Model) -> str:
    doc: dict = {"n": model.n, "layers": model.layers}
    if isinstance(model, ReuploadModel):
        doc["model"] = "reupload"
        doc["entangler"] = model.entangler
        doc["params"] = [float(x) for x in model.theta.ravel()]
    else:
        doc["model"] = model.kind
        doc["params"] = [float(x) for x in model.theta]
    return json.dumps(doc, sort_keys=True)


def model_from_json(text: str) -> Model:
    doc = json.loads(text)
    kind = doc["model"]
    n, layers = int(doc["n"]), int(doc["layers"])
    params = np.array(doc["params"], dtype=np.float64)
    if kind == "reupload":
        return ReuploadModel(
            n=n, layers=layers, theta=params.reshape(layers, n, 4),
            entangler=doc.get("entangler", "ring"),
        )
    if kind in ("feature-brick", "feature-nonbrick"):
        return FeatureMapModel(n=n, encoding=kind.split("-", 1)[1], layers=layers, theta=params)
    raise InvalidInputError(f"unknown model kind {kind!r}", module="varmodels")


def save_model(model: Model, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model_to_json(model) + "\n", encoding="utf-8")
    return path


def load_model(path: str | Path) -> Model:
    return model_from_json(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class SweepCell:
    model: str
    n: int
    layers: int
    regime: str
    mu1_minus_half: float
    mu1_stderr: float
    var: float
    var_stderr: float
    seed: int

    def csv_row(self) -> tuple:
        return (
            self.model, self.n, self.layers, self.regime,
            self.mu1_minus_half, self.mu1_stderr, self.var, self.var_stderr, self.seed,
        )


SWEEP_HEADER = [
    "model", "n", "L", "regime", "mu1_minus_half", "mu1_stderr", "var", "var_stderr", "seed",
]

REGIMES = ("train", "test", "random")


def _mean_var(values: np.ndarray) -> tuple[float, float]:
    return float(values.mean()), float(values.var())


def _bootstrap_mean_var(
    clusters: np.ndarray, n_boot: int, gen: np.random.Generator
) -> tuple[float, float]:
    """Two-stage bootstrap over (clusters, points): resample clusters with
    replacement, then points within each picked cluster."""
    reps, npts = clusters.shape
    stats = np.empty((n_boot, 2))
    for b in range(n_boot):
        rows = gen.integers(0, reps, size=reps)
        cols = gen.integers(0, npts, size=(reps, npts))
        pooled = clusters[rows[:, None], cols]
        stats[b] = _mean_var(pooled.ravel())
    sds = stats.std(axis=0, ddof=1)
    return float(sds[0]), float(sds[1])


def moment_sweep(
    kinds: Sequence[str],
    n_list: Sequence[int],
    layer_list: Sequence[int],
    repeats: int,
    dataset: LabeledDataset,
    stream: RandomStream,
    regimes: Sequence[str] = REGIMES,
    train_config: TrainConfig | None = None,
    entangler: str = "ring",
    bootstrap: int = 200,
) -> list[SweepCell]:
    """Margin mean and variance per (model, n, L, regime).

    The train regime evaluates the optimized parameters on the fixed grid
    (exact population, stderr 0); test evaluates them on the test split
    with a data bootstrap; random pools ``repeats`` uniform parameter draws
    on the test split with a two-stage (draws then data) bootstrap.
    """
    for regime in regimes:
        if regime not in REGIMES:
            raise InvalidInputError(f"unknown regime {regime!r}", module="varmodels")
    config = train_config or TrainConfig()
    cells: list[SweepCell] = []
    for kind in kinds:
        if kind not in MODEL_KINDS:
            raise InvalidInputError(f"unknown model kind {kind!r}", module="varmodels")
        for n in n_list:
            for layers in layer_list:
                cell_stream = stream.child("sweep", kind, n, layers)
                trained = None
                if "train" in regimes or "test" in regimes:
                    model0 = init_model(kind, n, layers, cell_stream.child("init"), entangler)
                    trained = train(model0, dataset.train_x, dataset.train_y, config).model
                if "train" in regimes:
                    zs = margins(trained, dataset.train_x, dataset.train_y)
                    mu, var = _mean_var(zs)
                    cells.append(SweepCell(kind, n, layers, "train", mu - 0.5, 0.0, var, 0.0, stream.seed))
                if "test" in regimes:
                    zs = margins(trained, dataset.test_x, dataset.test_y)
                    mu, var = _mean_var(zs)
                    gen = cell_stream.child("boot-test").generator()
                    se_mu, se_var = _bootstrap_mean_var(zs[None, :], bootstrap, gen)
                    cells.append(SweepCell(kind, n, layers, "test", mu - 0.5, se_mu, var, se_var, stream.seed))
                if "random" in regimes:
                    draws = []
                    for r in range(repeats):
                        model_r = init_model(kind, n, layers, cell_stream.child("random", r), entangler)
                        draws.append(margins(model_r, dataset.test_x, dataset.test_y))
                    matrix = np.stack(draws)
                    mu, var = _mean_var(matrix.ravel())
                    gen = cell_stream.child("boot-random").generator()
                    se_mu, se_var = _bootstrap_mean_var(matrix, bootstrap, gen)
                    cells.append(SweepCell(kind, n, layers, "random", mu - 0.5, se_mu, var, se_var, stream.seed))
    return cells
