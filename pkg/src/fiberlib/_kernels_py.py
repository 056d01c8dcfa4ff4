"""Pure-Python retraction kernels (fallback for the compiled ``_kernels``).

Cantor points of depth d are encoded as d-bit integers, first digit in the
most significant bit, digit 2 as bit 1.  Distance order between Cantor points
coincides with the integer order of the XOR of their codes, so the nearest
planted point is the one minimising ``a ^ p``.
"""
from bisect import bisect_left

import numpy as np


def nearest_index(a, planted, depth):
    """Index into sorted ``planted`` of the point nearest to ``a``."""
    lo, hi = 0, len(planted)
    prefix = 0
    for b in range(depth - 1, -1, -1):
        mid = bisect_left(planted, prefix | (1 << b), lo, hi)
        if (a >> b) & 1:
            if mid < hi:
                lo = mid
                prefix |= 1 << b
            else:
                hi = mid
        else:
            if lo < mid:
                hi = mid
            else:
                lo = mid
                prefix |= 1 << b
    return lo


def retract_many(addresses, planted, depth):
    planted = [int(p) for p in planted]
    out = np.empty(len(addresses), dtype=np.int64)
    for i, a in enumerate(addresses):
        out[i] = nearest_index(int(a), planted, depth)
    return out


def nearest_table(planted, depth):
    """For every address 0 .. 2^depth - 1, the index of its retraction."""
    return retract_many(range(1 << depth), planted, depth)
