"""Pure-numpy fallback for the split scan.

Must agree bit-for-bit with the compiled version: cumsum matches its
sequential accumulation, and np.argmax keeps the first maximum exactly as
the compiled strict ``>`` comparison does.
"""

import numpy as np


def scan_sorted(values, targets, parent_sse, min_leaf):
    n = values.shape[0]
    if n < 2 * min_leaf:
        return -1, 0.0

    s1 = np.cumsum(targets)
    s2 = np.cumsum(targets * targets)
    tot_s1 = s1[-1]
    tot_s2 = s2[-1]

    i = np.arange(1, n)
    left_s1 = s1[:-1]
    right_s1 = tot_s1 - left_s1
    left_sse = s2[:-1] - (left_s1 * left_s1) / i
    right_sse = (tot_s2 - s2[:-1]) - (right_s1 * right_s1) / (n - i)
    gain = parent_sse - left_sse - right_sse

    valid = values[1:] != values[:-1]
    valid &= (i >= min_leaf) & (n - i >= min_leaf)
    if not valid.any():
        return -1, 0.0

    gain = np.where(valid, gain, -np.inf)
    pos = int(np.argmax(gain))
    return pos + 1, float(gain[pos])
