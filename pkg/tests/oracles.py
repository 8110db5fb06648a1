"""Independent closed-form tables for the built-in superpotentials.

Each function returns ``(lo, hi, j0_toward_anchor)`` for a scalar ``r``: the
subdifferential interval endpoints and the generalized directional
derivative in the direction ``b - r``, spelled out branch by branch.  These
are written directly from the defining piecewise formulas, not through the
library's interval machinery, and are compared exactly in the tests.

At a kink the directional derivative takes the larger of the two one-sided
slope pairings (the limsup definition); for the clamped quadratic at the
lower kink that is ``-r0 * (b - r)``, not the outer-slope pairing.
"""

from __future__ import annotations

import numpy as np


def exp_quadratic_table(b: float, r: float) -> tuple[float, float, float]:
    if r < b:
        s = 2.0 * (r - b)
        return s, s, 2.0 * (r - b) * (b - r)
    if r == b:
        return 0.0, 1.0, 0.0
    e = float(np.exp(-(r - b)))  # same correctly-rounded exp the solvers use
    return e, e, e * (b - r)


def quadratic_table(b: float, r: float) -> tuple[float, float, float]:
    d = r - b
    return d, d, d * (b - r)


def abs_table(b: float, r: float) -> tuple[float, float, float]:
    if r < b:
        return -1.0, -1.0, r - b
    if r == b:
        return -1.0, 1.0, 0.0
    return 1.0, 1.0, b - r


def truncated_quadratic_table(
    b: float, m1: float, m2: float, r0: float, r: float
) -> tuple[float, float, float]:
    if r < b - r0:
        return m1, m1, m1 * (b - r)
    if r == b - r0:
        return m1, -r0, max(m1 * (b - r), (-r0) * (b - r))
    if r < b + r0:
        d = r - b
        return d, d, d * (b - r)
    if r == b + r0:
        return r0, m2, r0 * (b - r)
    return m2, m2, m2 * (b - r)


def min_quadratics_table(
    b: float, k1: float, c1: float, k2: float, c2: float, r: float
) -> tuple[float, float, float]:
    d = r - b
    j1 = 0.5 * k1 * d**2 + c1
    j2 = 0.5 * k2 * d**2 + c2
    s1, s2 = k1 * d, k2 * d
    if j1 < j2:
        lo = hi = s1
    elif j2 < j1:
        lo = hi = s2
    else:
        lo, hi = min(s1, s2), max(s1, s2)
    return lo, hi, max(lo * (b - r), hi * (b - r))
