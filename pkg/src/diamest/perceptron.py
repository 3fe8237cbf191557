"""Randomized perceptron for homogeneous halfspaces."""
from __future__ import annotations

import numpy as np
from numba import njit

from .core import Dataset, NonSeparableError
from .seeding import rng_for

DEFAULT_UPDATE_CAP = 10**7


@njit(cache=True)
def _run(w, A, order, cap):
    # A holds rows y_i * x_i; a mistake is A[i] . w <= 0
    k, n = A.shape
    updates = 0
    if k == 0:
        return updates, True
    while True:
        clean = True
        for idx in order:
            dot = 0.0
            for j in range(n):
                dot += A[idx, j] * w[j]
            if dot <= 0.0:
                for j in range(n):
                    w[j] += A[idx, j]
                updates += 1
                clean = False
                if updates >= cap:
                    return updates, False
        if clean:
            return updates, True


def perceptron(d: Dataset, seed: int = 0, cap: int = DEFAULT_UPDATE_CAP, w0=None, return_updates: bool = False):
    """Learn a strict separator of ``d``.

    Starts from a Gaussian ``w0`` (or the one given) and cycles through a
    seeded random permutation of the points until a full pass makes no
    mistake. Raises :class:`NonSeparableError` once ``cap`` updates are spent.
    """
    rng = rng_for(seed, "perceptron")
    w = rng.standard_normal(d.n) if w0 is None else np.array(w0, dtype=float)
    order = rng.permutation(d.k).astype(np.int64)
    updates, ok = _run(w, np.ascontiguousarray(d.constraints, dtype=float), order, cap)
    if not ok:
        raise NonSeparableError(f"perceptron did not converge within {cap} updates")
    return (w, updates) if return_updates else w
