"""Bracketed scalar searches that run many independent problems at once.

Both routines work on 1-D arrays of brackets, one entry per problem, and call
the objective with a 1-D array of abscissae. A single problem is just an
array of length one.
"""

from __future__ import annotations

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def bisect_decreasing(f, lo, hi, rtol=1e-12, atol=0.0, max_iter=400):
    """Root of functions that are positive at ``lo`` and negative at ``hi``.

    The bracket is halved until ``hi - lo <= atol + rtol * hi`` for every
    problem. Returns the bracket midpoints.
    """
    lo = np.array(lo, dtype=float, ndmin=1)
    hi = np.array(hi, dtype=float, ndmin=1)
    for _ in range(max_iter):
        width = hi - lo
        if np.all(width <= atol + rtol * np.abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        pos = f(mid) > 0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    return 0.5 * (lo + hi)


def golden_max(f, lo, hi, xtol=1e-6):
    """Maximizer of unimodal functions on ``[lo, hi]`` by golden-section search.

    Each iteration evaluates ``f`` once per problem. The returned point is the
    best interior probe, so a monotone function ends up within ``xtol`` of the
    favoured endpoint.
    """
    a = np.array(lo, dtype=float, ndmin=1)
    b = np.array(hi, dtype=float, ndmin=1)
    h = b - a
    hmax = float(np.max(h)) if h.size else 0.0
    if hmax <= xtol:
        return 0.5 * (a + b)
    n = int(math.ceil(math.log(xtol / hmax) / math.log(INV_PHI)))
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    fc = f(c)
    fd = f(d)
    for _ in range(n):
        left = fc > fd  # maximizer lies in [a, d]
        h = INV_PHI * h
        # shrink to [a, d]: old c becomes new d
        # shrink to [c, b]: old d becomes new c
        a = np.where(left, a, c)
        b = np.where(left, d, b)
        new_c = np.where(left, a + INV_PHI2 * h, d)
        new_d = np.where(left, c, a + INV_PHI * h)
        probe = np.where(left, new_c, new_d)
        fp = f(probe)
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        c, d = new_c, new_d
    return np.where(fc > fd, c, d)
