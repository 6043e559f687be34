"""Pure-Python jet coefficient kernels.

Each kernel implements a truncated-power-series recurrence on tuples of
normalized Taylor coefficients (coeffs[k] = F^(k)(x)/k!).  A compiled
twin of this module (_kernels.pyx) provides the same functions; jet.py
selects whichever is importable.  Keep the two implementations in exact
behavioral lockstep -- tests compare them coefficient by coefficient.

No domain checking happens here (callers validate); the only hard error
is ZeroDivisionError from an exactly-zero leading divisor coefficient,
which callers pre-empt with their own floor check.
"""

import math

BACKEND = "python"


def add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def scale(a, c):
    return tuple(c * x for x in a)


def mul(a, b):
    n = len(a)
    out = [0.0] * n
    for k in range(n):
        s = 0.0
        for j in range(k + 1):
            s += a[j] * b[k - j]
        out[k] = s
    return tuple(out)


def div(a, b):
    # long division of truncated power series: c = a / b
    n = len(a)
    b0 = b[0]
    out = [0.0] * n
    for k in range(n):
        s = a[k]
        for j in range(k):
            s -= out[j] * b[k - j]
        out[k] = s / b0
    return tuple(out)


def exp(a):
    n = len(a)
    out = [0.0] * n
    out[0] = math.exp(a[0])
    for k in range(1, n):
        s = 0.0
        for j in range(1, k + 1):
            s += j * a[j] * out[k - j]
        out[k] = s / k
    return tuple(out)


def ln(a):
    n = len(a)
    a0 = a[0]
    out = [0.0] * n
    out[0] = math.log(a0)
    for k in range(1, n):
        s = k * a[k]
        for j in range(1, k):
            s -= j * out[j] * a[k - j]
        out[k] = s / (k * a0)
    return tuple(out)


def sqrt(a):
    n = len(a)
    out = [0.0] * n
    s0 = math.sqrt(a[0])
    out[0] = s0
    for k in range(1, n):
        s = a[k]
        for j in range(1, k):
            s -= out[j] * out[k - j]
        out[k] = s / (2.0 * s0)
    return tuple(out)


def powr(a, p):
    # (a ** p) for a[0] > 0 via the standard Euler recurrence
    n = len(a)
    a0 = a[0]
    out = [0.0] * n
    out[0] = math.pow(a0, p)
    for k in range(1, n):
        s = 0.0
        for j in range(1, k + 1):
            s += ((p + 1.0) * j - k) * a[j] * out[k - j]
        out[k] = s / (k * a0)
    return tuple(out)
