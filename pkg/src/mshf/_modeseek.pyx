# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled minimum-T-distance kernel over sparse preference vectors.

For the neighbor-constrained variant the expensive T-distance is evaluated
only for vertex pairs that pass a cheap integer overlap test (with an
early-abort bound), which is what makes that variant faster than the
unconstrained one on large hypergraphs.
"""

import numpy as np


cdef inline double _sparse_dot(
    const long long[::1] indptr,
    const int[::1] idx,
    const double[::1] val,
    Py_ssize_t i,
    Py_ssize_t j,
) noexcept nogil:
    cdef Py_ssize_t a = indptr[i], ae = indptr[i + 1]
    cdef Py_ssize_t b = indptr[j], be = indptr[j + 1]
    cdef double acc = 0.0
    while a < ae and b < be:
        if idx[a] == idx[b]:
            acc += val[a] * val[b]
            a += 1
            b += 1
        elif idx[a] < idx[b]:
            a += 1
        else:
            b += 1
    return acc


cdef inline double _tanimoto(
    const long long[::1] indptr,
    const int[::1] idx,
    const double[::1] val,
    const double[::1] sqnorm,
    Py_ssize_t i,
    Py_ssize_t j,
) noexcept nogil:
    cdef double d = _sparse_dot(indptr, idx, val, i, j)
    cdef double den = sqnorm[i] + sqnorm[j] - d
    cdef double t
    if den <= 0.0:
        # Only reachable through catastrophic cancellation of identical
        # vectors; the limit distance is 0.
        return 0.0
    t = 1.0 - d / den
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return t


cdef inline bint _ratio_ok(double c, double dsum, double epsilon, int mode) noexcept nogil:
    if mode == 0:  # dice
        return 2.0 * c > epsilon * dsum
    elif mode == 1:  # jaccard
        return c > epsilon * (dsum - c)
    return c > epsilon * dsum  # literal


cdef inline bint _is_neighbor(
    const long long[::1] indptr,
    const int[::1] idx,
    Py_ssize_t i,
    Py_ssize_t j,
    double epsilon,
    int mode,
) noexcept nogil:
    cdef long long di = indptr[i + 1] - indptr[i]
    cdef long long dj = indptr[j + 1] - indptr[j]
    cdef double dsum = <double> (di + dj)
    cdef long long cmax = di if di < dj else dj
    # Quick reject: even full containment cannot pass the ratio test.
    if not _ratio_ok(<double> cmax, dsum, epsilon, mode):
        return False
    cdef Py_ssize_t a = indptr[i], ae = indptr[i + 1]
    cdef Py_ssize_t b = indptr[j], be = indptr[j + 1]
    cdef long long count = 0
    cdef long long rem
    while a < ae and b < be:
        if idx[a] == idx[b]:
            count += 1
            a += 1
            b += 1
        else:
            if idx[a] < idx[b]:
                a += 1
            else:
                b += 1
            rem = ae - a if ae - a < be - b else be - b
            if not _ratio_ok(<double> (count + rem), dsum, epsilon, mode):
                return False
    return _ratio_ok(<double> count, dsum, epsilon, mode)


def mtd_kernel(
    indptr,
    indices,
    values,
    sqnorm,
    order,
    num_hyperedges,
    variant,
    epsilon,
    overlap_mode,
):
    cdef const long long[::1] ip = indptr
    cdef const int[::1] idx = indices
    cdef const double[::1] val = values
    cdef const double[::1] sq = sqnorm
    cdef const long long[::1] od = order
    cdef Py_ssize_t m = ip.shape[0] - 1
    eta_arr = np.ones(m, dtype=np.float64)
    flag_arr = np.zeros(m, dtype=np.uint8)
    cdef double[::1] eta = eta_arr
    cdef unsigned char[::1] flags = flag_arr
    if m == 1:
        flag_arr[0] = 1
        return eta_arr, flag_arr
    cdef int var = variant
    cdef int mode = overlap_mode
    cdef double eps = epsilon
    cdef Py_ssize_t k, r, i, j
    cdef double best, far, t
    with nogil:
        for k in range(m):
            i = od[k]
            if k == 0:
                # Top-weight vertex: its comparison set is empty under both
                # variants; take the farthest distance over all others.
                far = -1.0
                for r in range(1, m):
                    t = _tanimoto(ip, idx, val, sq, i, od[r])
                    if t > far:
                        far = t
                eta[i] = far
                flags[i] = 1
            elif var == 1:
                best = 2.0
                for r in range(k):
                    t = _tanimoto(ip, idx, val, sq, i, od[r])
                    if t < best:
                        best = t
                eta[i] = best
            else:
                best = 2.0
                for r in range(k):
                    j = od[r]
                    if _is_neighbor(ip, idx, i, j, eps, mode):
                        t = _tanimoto(ip, idx, val, sq, i, j)
                        if t < best:
                            best = t
                if best <= 1.0:
                    eta[i] = best
                else:
                    # Local peak without higher-weight neighbors: compare
                    # against the unrestricted higher-weight set.
                    for r in range(k):
                        t = _tanimoto(ip, idx, val, sq, i, od[r])
                        if t < best:
                            best = t
                    eta[i] = best
                    flags[i] = 1
    return eta_arr, flag_arr
