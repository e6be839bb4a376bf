"""Haar-distributed states and unitaries.

Two state conventions are exposed because the analytic reference moments
aggregate squared amplitudes into a Dirichlet with concentration 1/2
(real-sphere measure) or 1 (complex measure).  The package default for all
reproductions is the real-sphere convention, matching the closed formulas.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidInputError
from ..rng import RandomStream
from .state import StateVector

CONVENTIONS = ("complex", "real-sphere")


def sample_haar_vector(
    dim: int, convention: str, stream: RandomStream, count: int = 1
) -> np.ndarray:
    """(count, dim) array of unit vectors: normalized i.i.d. Gaussians."""
    if dim < 1:
        raise InvalidInputError("dim must be >= 1", module="simcore")
    if convention not in CONVENTIONS:
        raise InvalidInputError(f"unknown convention {convention!r}", module="simcore")
    gen = stream.generator()
    if convention == "complex":
        raw = gen.standard_normal((count, dim)) + 1j * gen.standard_normal((count, dim))
    else:
        raw = gen.standard_normal((count, dim)).astype(np.complex128)
    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    return raw / norms


def sample_haar_state(n: int, convention: str, stream: RandomStream) -> StateVector:
    if n < 1:
        raise InvalidInputError("n must be >= 1", module="simcore")
    amps = sample_haar_vector(1 << n, convention, stream, count=1)[0]
    return StateVector(n, amps)


def sample_unitary(dim: int, stream: RandomStream) -> np.ndarray:
    """Haar-random unitary via a complex Ginibre matrix and phase-fixed QR."""
    if dim < 2:
        raise InvalidInputError("dim must be >= 2", module="simcore")
    gen = stream.generator()
    ginibre = (gen.standard_normal((dim, dim)) + 1j * gen.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(ginibre)
    diag = np.diagonal(r)
    q = q * (diag / np.abs(diag))
    return q
