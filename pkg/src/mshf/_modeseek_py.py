"""Pure-numpy minimum-T-distance kernel (fallback backend).

Same contract as the compiled extension: given per-vertex sparse
preference vectors (CSR layout) and the weight ranking, return each
vertex's minimum T-distance to its comparison set plus the flags marking
vertices whose comparison set was empty.
"""

from __future__ import annotations

import numpy as np


def mtd_kernel(
    indptr, indices, values, sqnorm, order, num_hyperedges, variant, epsilon, overlap_mode
):
    m = int(indptr.size - 1)
    eta = np.ones(m, dtype=np.float64)
    flags = np.zeros(m, dtype=np.uint8)
    if m == 1:
        flags[0] = 1
        return eta, flags

    # Dense matrices are fine at reduced-hypergraph sizes.
    dense = np.zeros((m, num_hyperedges), dtype=np.float64)
    rows = np.repeat(np.arange(m), np.diff(indptr))
    dense[rows, indices] = values
    gram = dense @ dense.T
    tdist = 1.0 - gram / (sqnorm[:, None] + sqnorm[None, :] - gram)
    np.clip(tdist, 0.0, 1.0, out=tdist)

    rank = np.empty(m, dtype=np.int64)
    rank[order] = np.arange(m)
    higher = rank[None, :] < rank[:, None]  # higher[i, j]: j outranks i

    neighbor = None
    if variant == 2:
        deg = np.diff(indptr).astype(np.float64)
        mask = (dense > 0.0).astype(np.float32)
        common = (mask @ mask.T).astype(np.float64)  # exact integer counts
        dsum = deg[:, None] + deg[None, :]
        if overlap_mode == 0:  # dice
            neighbor = 2.0 * common > epsilon * dsum
        elif overlap_mode == 1:  # jaccard
            neighbor = common > epsilon * (dsum - common)
        else:  # literal intersection-over-degree-sum ratio
            neighbor = common > epsilon * dsum
        np.fill_diagonal(neighbor, False)

    for i in range(m):
        cand = higher[i]
        if variant == 1:
            if cand.any():
                eta[i] = tdist[i, cand].min()
            else:
                others = np.ones(m, dtype=bool)
                others[i] = False
                eta[i] = tdist[i, others].max()
                flags[i] = 1
        else:
            omega = cand & neighbor[i]
            if omega.any():
                eta[i] = tdist[i, omega].min()
            elif cand.any():
                # Local peak without higher-weight neighbors: compare
                # against the unrestricted higher-weight set.
                eta[i] = tdist[i, cand].min()
                flags[i] = 1
            else:
                others = np.ones(m, dtype=bool)
                others[i] = False
                eta[i] = tdist[i, others].max()
                flags[i] = 1
    return eta, flags
