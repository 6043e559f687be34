# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled jet coefficient kernels.

Behavioral twin of _kernels_py (same functions, same floating-point
operation order) for the hot inner loops: every classification grid
point drives O(order^2) coefficient recurrences through these calls.
"""

from libc.math cimport exp as c_exp, log as c_log, pow as c_pow, sqrt as c_sqrt

BACKEND = "c"

DEF MAX_N = 24  # jet order cap is 16, so 17 coefficients; headroom


cdef inline int _load(tuple a, double* buf) except -1:
    cdef Py_ssize_t i, n = len(a)
    if n > MAX_N:
        raise ValueError("jet too long for kernel buffer")
    for i in range(n):
        buf[i] = <double> a[i]
    return <int> n


cdef inline tuple _dump(double* buf, int n):
    cdef list out = [0.0] * n
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = buf[i]
    return tuple(out)


def add(tuple a, tuple b):
    cdef double x[MAX_N]
    cdef double y[MAX_N]
    cdef int n = _load(a, x)
    _load(b, y)
    cdef int k
    for k in range(n):
        x[k] = x[k] + y[k]
    return _dump(x, n)


def sub(tuple a, tuple b):
    cdef double x[MAX_N]
    cdef double y[MAX_N]
    cdef int n = _load(a, x)
    _load(b, y)
    cdef int k
    for k in range(n):
        x[k] = x[k] - y[k]
    return _dump(x, n)


def scale(tuple a, double c):
    cdef double x[MAX_N]
    cdef int n = _load(a, x)
    cdef int k
    for k in range(n):
        x[k] = c * x[k]
    return _dump(x, n)


def mul(tuple a, tuple b):
    cdef double x[MAX_N]
    cdef double y[MAX_N]
    cdef double out[MAX_N]
    cdef int n = _load(a, x)
    _load(b, y)
    cdef int k, j
    cdef double s
    for k in range(n):
        s = 0.0
        for j in range(k + 1):
            s += x[j] * y[k - j]
        out[k] = s
    return _dump(out, n)


def div(tuple a, tuple b):
    cdef double x[MAX_N]
    cdef double y[MAX_N]
    cdef double out[MAX_N]
    cdef int n = _load(a, x)
    _load(b, y)
    cdef double b0 = y[0]
    cdef int k, j
    cdef double s
    for k in range(n):
        s = x[k]
        for j in range(k):
            s -= out[j] * y[k - j]
        out[k] = s / b0
    return _dump(out, n)


def exp(tuple a):
    cdef double x[MAX_N]
    cdef double out[MAX_N]
    cdef int n = _load(a, x)
    cdef int k, j
    cdef double s
    out[0] = c_exp(x[0])
    for k in range(1, n):
        s = 0.0
        for j in range(1, k + 1):
            s += j * x[j] * out[k - j]
        out[k] = s / k
    return _dump(out, n)


def ln(tuple a):
    cdef double x[MAX_N]
    cdef double out[MAX_N]
    cdef int n = _load(a, x)
    cdef double a0 = x[0]
    cdef int k, j
    cdef double s
    out[0] = c_log(a0)
    for k in range(1, n):
        s = k * x[k]
        for j in range(1, k):
            s -= j * out[j] * x[k - j]
        out[k] = s / (k * a0)
    return _dump(out, n)


def sqrt(tuple a):
    cdef double x[MAX_N]
    cdef double out[MAX_N]
    cdef int n = _load(a, x)
    cdef double s0 = c_sqrt(x[0])
    cdef int k, j
    cdef double s
    out[0] = s0
    for k in range(1, n):
        s = x[k]
        for j in range(1, k):
            s -= out[j] * out[k - j]
        out[k] = s / (2.0 * s0)
    return _dump(out, n)


def powr(tuple a, double p):
    cdef double x[MAX_N]
    cdef double out[MAX_N]
    cdef int n = _load(a, x)
    cdef double a0 = x[0]
    cdef int k, j
    cdef double s
    out[0] = c_pow(a0, p)
    for k in range(1, n):
        s = 0.0
        for j in range(1, k + 1):
            s += ((p + 1.0) * j - k) * x[j] * out[k - j]
        out[k] = s / (k * a0)
    return _dump(out, n)
