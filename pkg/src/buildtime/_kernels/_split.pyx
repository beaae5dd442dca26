# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan for the regression-tree split search.

Semantics must stay bit-identical to the pure fallback in split_py.py:
sequential left-to-right accumulation of sums, gains compared with strict
``>`` so the first (lowest split position) maximum wins.
"""

from libc.math cimport INFINITY


def scan_sorted(const double[::1] values, const double[::1] targets,
                double parent_sse, Py_ssize_t min_leaf):
    """Best split on one feature column sorted ascending.

    Returns (pos, gain) where pos is the left-child size, or (-1, 0.0)
    when no admissible boundary exists. gain is the reduction in total
    squared error relative to parent_sse.
    """
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t i, best_pos = -1
    cdef double run_s1 = 0.0, run_s2 = 0.0
    cdef double tot_s1 = 0.0, tot_s2 = 0.0
    cdef double left_s1, right_s1, left_sse, right_sse, gain
    cdef double best_gain = -INFINITY
    cdef double y

    if n < 2 * min_leaf:
        return -1, 0.0

    for i in range(n):
        y = targets[i]
        tot_s1 += y
        tot_s2 += y * y

    for i in range(1, n):
        y = targets[i - 1]
        run_s1 += y
        run_s2 += y * y
        if values[i] == values[i - 1]:
            continue
        if i < min_leaf or n - i < min_leaf:
            continue
        left_s1 = run_s1
        right_s1 = tot_s1 - run_s1
        left_sse = run_s2 - (left_s1 * left_s1) / <double>i
        right_sse = (tot_s2 - run_s2) - (right_s1 * right_s1) / <double>(n - i)
        gain = parent_sse - left_sse - right_sse
        if gain > best_gain:
            best_gain = gain
            best_pos = i

    if best_pos < 0:
        return -1, 0.0
    return best_pos, best_gain
