"""Vectorised monomial evaluation shared by the sampling and Fock code."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from uhardy.partitions import BasisKey


def monomial_table(X: np.ndarray, keys: Sequence[BasisKey]) -> np.ndarray:
    """``out[s, k] = prod_j X[s, i_j - 1] ** e_j`` for each key ``k``.

    Indices beyond ``X.shape[1]`` read as zero coordinates.
    """
    X = np.asarray(X, dtype=complex)
    if X.ndim == 1:
        X = X[None, :]
    n, width = X.shape
    max_exp = max((e for key in keys for _, e in key.pairs), default=0)
    # powers[e][:, i] = X[:, i] ** e
    powers = [np.ones_like(X)]
    for _ in range(max_exp):
        powers.append(powers[-1] * X)
    out = np.ones((n, len(keys)), dtype=complex)
    for k, key in enumerate(keys):
        for i, e in key.pairs:
            if i > width:
                out[:, k] = 0.0
                break
            out[:, k] *= powers[e][:, i - 1]
    return out
