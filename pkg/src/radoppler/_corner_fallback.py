"""Pure-Python corner search used when the compiled extension is absent.

Both backends consume the same prefix-summed squared profile and must
agree on the minimizer, including ties, so the arithmetic here mirrors
the compiled loop exactly: segment mean floored at 1e-300 before the
log, objective associated as (t1 + t2) + t3, ties resolved to the
tightest band and then the smaller positive split index.
"""

from __future__ import annotations

import numpy as np

TINY_MEAN = 1e-300


def search(prefix: np.ndarray, zero_index: int) -> tuple[int, int, float]:
    """Minimize the three-segment objective on a prefix-summed profile.

    prefix[i] holds the sum of the squared profile over indices < i.
    Returns (i1, i2, J): the left split index in [1, zero_index), the
    right split index in (zero_index, L-2], and the objective value.
    """
    L = prefix.shape[0] - 1
    if zero_index < 2 or L - 1 - zero_index < 2:
        raise ValueError("axis too short for a three-segment split")
    i1 = np.arange(1, zero_index)
    i2 = np.arange(zero_index + 1, L - 1)

    n1 = (i1 + 1).astype(np.float64)
    t1 = n1 * np.log10(np.maximum(prefix[i1 + 1] / n1, TINY_MEAN))
    n3 = (L - i2).astype(np.float64)
    t3 = n3 * np.log10(np.maximum((prefix[L] - prefix[i2]) / n3, TINY_MEAN))
    n2 = (i2[None, :] - i1[:, None] + 1).astype(np.float64)
    s2 = prefix[i2 + 1][None, :] - prefix[i1][:, None]
    t2 = n2 * np.log10(np.maximum(s2 / n2, TINY_MEAN))

    J = (t1[:, None] + t2) + t3[None, :]
    rows, cols = np.nonzero(J == J.min())
    span = i2[cols] - i1[rows]
    pick = np.lexsort((i2[cols], span))[0]  # tightest band, then smaller i2
    return int(i1[rows[pick]]), int(i2[cols[pick]]), float(J.min())
