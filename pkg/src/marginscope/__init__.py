"""Randomness diagnostics for quantum-state ensembles and classifier margins.

The package measures how close a set of data-induced quantum states is to
Haar-random, as seen through a fixed observable, and turns that measurement
into hard bounds on binary-classification performance.  It ships a dense
statevector simulator, exact Haar reference moments, the class-margin
metric with its failure bounds, three worked case studies, and a CLI that
reproduces every experiment deterministically.
"""

__version__ = "0.1.0"

from .rng import RandomStream

__all__ = ["RandomStream", "__version__"]
