# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the F_p elimination kernels."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline long _inv(long x, long p) nogil:
    cdef long r = 1, b = x % p, e = p - 2
    while e > 0:
        if e & 1:
            r = r * b % p
        b = b * b % p
        e >>= 1
    return r


cdef long _eliminate(long[:, ::1] a, long p, long full, long[::1] pivots) nogil:
    cdef Py_ssize_t nrows = a.shape[0], ncols = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, k
    cdef long f, t, start
    for c in range(ncols):
        if r == nrows:
            break
        k = -1
        for i in range(r, nrows):
            if a[i, c] != 0:
                k = i
                break
        if k < 0:
            continue
        if k != r:
            for j in range(c, ncols):
                t = a[r, j]
                a[r, j] = a[k, j]
                a[k, j] = t
        f = _inv(a[r, c], p)
        for j in range(c, ncols):
            a[r, j] = a[r, j] * f % p
        start = 0 if full else r + 1
        for i in range(start, nrows):
            if i == r:
                continue
            f = a[i, c]
            if f != 0:
                for j in range(c, ncols):
                    a[i, j] = (a[i, j] - f * a[r, j]) % p
                    if a[i, j] < 0:
                        a[i, j] += p
        pivots[r] = c
        r += 1
    return r


def rref(m, long p):
    a = np.ascontiguousarray(np.array(m, dtype=np.int64) % p)
    if a.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    cdef long[::1] piv = np.zeros(max(a.shape[0], 1), dtype=np.int64)
    cdef long[:, ::1] view = a
    cdef long r = _eliminate(view, p, 1, piv)
    return a[:r].copy(), tuple(int(piv[i]) for i in range(r))


def batch_rank(mats, long p):
    a = np.ascontiguousarray(np.array(mats, dtype=np.int64) % p)
    cdef Py_ssize_t nb = a.shape[0], b
    out = np.zeros(nb, dtype=np.int64)
    if nb == 0 or a.shape[1] == 0 or a.shape[2] == 0:
        return out
    cdef long[:, :, ::1] view = a
    cdef long[::1] res = out
    cdef long[::1] piv = np.zeros(a.shape[1], dtype=np.int64)
    for b in range(nb):
        res[b] = _eliminate(view[b], p, 0, piv)
    return out
