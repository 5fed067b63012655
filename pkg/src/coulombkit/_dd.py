"""Double-double arithmetic built from error-free transformations.

A value is a pair ``(hi, lo)`` of floats with ``|lo| <= ulp(hi)/2``; the pair
carries roughly 106 bits.  Only the handful of operations needed by the
power-series evaluator are provided.
"""

import math

_SPLITTER = 134217729.0  # 2**27 + 1

#: unit roundoff of the pair representation
EPS = 2.0 ** -104


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def add(x, y):
    s, e = two_sum(x[0], y[0])
    t, f = two_sum(x[1], y[1])
    e += t
    s, e = s + e, e - ((s + e) - s)
    e += f
    hi = s + e
    return hi, e - (hi - s)


def add_d(x, d):
    s, e = two_sum(x[0], d)
    e += x[1]
    hi = s + e
    return hi, e - (hi - s)


def mul_d(x, d):
    p, e = two_prod(x[0], d)
    e += x[1] * d
    hi = p + e
    return hi, e - (hi - p)


def mul(x, y):
    p, e = two_prod(x[0], y[0])
    e += x[0] * y[1] + x[1] * y[0]
    hi = p + e
    return hi, e - (hi - p)


def div(x, y):
    q1 = x[0] / y[0]
    r = add(x, mul_d(y, -q1))
    q2 = r[0] / y[0]
    r = add(r, mul_d(y, -q2))
    q3 = r[0] / y[0]
    hi = q1 + q2
    lo = q2 - (hi - q1)
    return add_d((hi, lo), q3)


def from_float(a):
    return (float(a), 0.0)


def to_float(x):
    return x[0] + x[1]


def is_finite(x):
    return math.isfinite(x[0])
