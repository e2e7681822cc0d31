# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled corner search: exhaustive two-split scan over a prefix array.

Arithmetic must match _corner_fallback.search exactly (same mean floor,
same (t1 + t2) + t3 association, same tie-break) so the two backends are
interchangeable.
"""

from libc.math cimport INFINITY, log10

import numpy as np


def search(const double[::1] prefix, Py_ssize_t zero_index):
    """Minimize the three-segment objective on a prefix-summed profile.

    prefix[i] holds the sum of the squared profile over indices < i.
    Returns (i1, i2, J); ties resolve to the tightest band, then the
    smaller right split index.
    """
    cdef Py_ssize_t L = prefix.shape[0] - 1
    cdef Py_ssize_t a, b, span
    cdef Py_ssize_t best_a = -1, best_b = -1, best_span = 0
    cdef double t1, t2, j, m
    cdef double best_j = INFINITY
    cdef double total = prefix[L]
    cdef double tiny = 1e-300

    if zero_index < 2 or L - 1 - zero_index < 2:
        raise ValueError("axis too short for a three-segment split")

    t3_arr = np.empty(L, dtype=np.float64)
    cdef double[::1] t3 = t3_arr

    with nogil:
        for b in range(zero_index + 1, L - 1):
            m = (total - prefix[b]) / (L - b)
            if m < tiny:
                m = tiny
            t3[b] = (L - b) * log10(m)

        for a in range(1, zero_index):
            m = prefix[a + 1] / (a + 1)
            if m < tiny:
                m = tiny
            t1 = (a + 1) * log10(m)
            for b in range(zero_index + 1, L - 1):
                m = (prefix[b + 1] - prefix[a]) / (b - a + 1)
                if m < tiny:
                    m = tiny
                t2 = (b - a + 1) * log10(m)
                j = (t1 + t2) + t3[b]
                span = b - a
                if j < best_j or (
                    j == best_j
                    and (span < best_span or (span == best_span and b < best_b))
                ):
                    best_j = j
                    best_a = a
                    best_b = b
                    best_span = span

    return best_a, best_b, best_j
