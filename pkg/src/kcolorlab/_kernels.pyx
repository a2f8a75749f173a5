# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the optimizer hot kernels in ``_kernels_py``.

Same five functions, same signatures, same semantics.  Keep the two files
in lockstep; the import-time selector in ``kernels.py`` treats them as
interchangeable.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, log

cnp.import_array()

BACKEND = "compiled"


cdef inline double _xlogx(double x) nogil:
    if x > 0.0:
        return x * log(x)
    return 0.0


def sum_xlogx(object a):
    """Sum of x*ln(x) over strictly positive entries (0 ln 0 = 0)."""
    cdef double[:, ::1] arr = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double total = 0.0
    for i in range(arr.shape[0]):
        for j in range(arr.shape[1]):
            total += _xlogx(arr[i, j])
    return total


def norm_sq(object a):
    """Squared Frobenius norm."""
    cdef double[:, ::1] arr = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double total = 0.0
    for i in range(arr.shape[0]):
        for j in range(arr.shape[1]):
            total += arr[i, j] * arr[i, j]
    return total


def rotation_scores(object grad, object can_gain, object can_lose):
    """Best first-order rotation move under entry masks.

    Returns (score, i1, j1, i2, j2); see the python backend for the full
    contract.
    """
    cdef double[:, ::1] G = np.ascontiguousarray(grad, dtype=np.float64)
    cdef unsigned char[:, ::1] gain = np.ascontiguousarray(can_gain, dtype=np.uint8)
    cdef unsigned char[:, ::1] lose = np.ascontiguousarray(can_lose, dtype=np.uint8)
    cdef Py_ssize_t k = G.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] t1v = np.full((k, k), -np.inf)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] t2v = np.full((k, k), -np.inf)
    cdef cnp.ndarray[cnp.intp_t, ndim=2] t1i = np.full((k, k), -1, dtype=np.intp)
    cdef cnp.ndarray[cnp.intp_t, ndim=2] t2i = np.full((k, k), -1, dtype=np.intp)
    cdef double[:, ::1] top1v = t1v
    cdef double[:, ::1] top2v = t2v
    cdef Py_ssize_t[:, ::1] top1i = t1i
    cdef Py_ssize_t[:, ::1] top2i = t2i
    cdef Py_ssize_t i, j1, j2
    cdef double m
    # top two admissible rows of M[i, j1, j2] = G[i, j1] - G[i, j2]
    for i in range(k):
        for j1 in range(k):
            if not gain[i, j1]:
                continue
            for j2 in range(k):
                if j1 == j2 or not lose[i, j2]:
                    continue
                m = G[i, j1] - G[i, j2]
                if m > top1v[j1, j2]:
                    top2v[j1, j2] = top1v[j1, j2]
                    top2i[j1, j2] = top1i[j1, j2]
                    top1v[j1, j2] = m
                    top1i[j1, j2] = i
                elif m > top2v[j1, j2]:
                    top2v[j1, j2] = m
                    top2i[j1, j2] = i
    cdef double best = -INFINITY
    cdef Py_ssize_t bi1 = -1, bj1 = -1, bi2 = -1, bj2 = -1
    cdef double a_v, b_v, score
    cdef Py_ssize_t a_i, b_i, i1, i2
    for j1 in range(k):
        for j2 in range(k):
            if j1 == j2:
                continue
            a_v = top1v[j1, j2]
            b_v = top1v[j2, j1]
            if a_v == -INFINITY or b_v == -INFINITY:
                continue
            a_i = top1i[j1, j2]
            b_i = top1i[j2, j1]
            if a_i != b_i:
                score = a_v + b_v
                i1 = a_i
                i2 = b_i
            else:
                score = -INFINITY
                i1 = -1
                i2 = -1
                if top2v[j1, j2] != -INFINITY and top2v[j1, j2] + b_v > score:
                    score = top2v[j1, j2] + b_v
                    i1 = top2i[j1, j2]
                    i2 = b_i
                if top2v[j2, j1] != -INFINITY and a_v + top2v[j2, j1] > score:
                    score = a_v + top2v[j2, j1]
                    i1 = a_i
                    i2 = top2i[j2, j1]
                if i1 < 0:
                    continue
            if score > best:
                best = score
                bi1 = i1
                bj1 = j1
                bi2 = i2
                bj2 = j2
    return (best, int(bi1), int(bj1), int(bi2), int(bj2))


def line_f_values(object entries, int i1, int j1, int i2, int j2, object ts, double d):
    """Objective values along a rotation move, one per step size in ts."""
    cdef double[:, ::1] arr = np.ascontiguousarray(entries, dtype=np.float64)
    cdef double[::1] t = np.ascontiguousarray(ts, dtype=np.float64)
    cdef Py_ssize_t k = arr.shape[0]
    cdef Py_ssize_t n = t.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double a = arr[i1, j1]
    cdef double b = arr[i2, j2]
    cdef double c = arr[i1, j2]
    cdef double e = arr[i2, j1]
    cdef double s0, q0, logk, s, q, arg, tv
    cdef Py_ssize_t i, j, idx
    s0 = 0.0
    q0 = 0.0
    for i in range(k):
        for j in range(k):
            s0 += _xlogx(arr[i, j])
            q0 += arr[i, j] * arr[i, j]
    s0 -= _xlogx(a) + _xlogx(b) + _xlogx(c) + _xlogx(e)
    q0 -= a * a + b * b + c * c + e * e
    logk = log(<double> k)
    for idx in range(n):
        tv = t[idx]
        s = s0 + _xlogx(a + tv) + _xlogx(b + tv) + _xlogx(c - tv) + _xlogx(e - tv)
        q = q0 + (a + tv) ** 2 + (b + tv) ** 2 + (c - tv) ** 2 + (e - tv) ** 2
        arg = 1.0 - 2.0 / k + q / (<double> (k * k))
        out[idx] = logk - s / k + 0.5 * d * log(arg)
    return out_arr


def sinkhorn_balance(object a, int max_iters=200, double tol=1e-12):
    """Alternate row/column normalization toward a doubly stochastic matrix."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out_arr = np.array(a, dtype=np.float64)
    cdef double[:, ::1] arr = out_arr
    cdef Py_ssize_t k = arr.shape[0]
    cdef Py_ssize_t i, j, it
    cdef double total, dev, diff
    for it in range(max_iters):
        for i in range(k):
            total = 0.0
            for j in range(k):
                total += arr[i, j]
            if total <= 0.0:
                raise ValueError("sinkhorn needs positive row sums")
            for j in range(k):
                arr[i, j] /= total
        for j in range(k):
            total = 0.0
            for i in range(k):
                total += arr[i, j]
            if total <= 0.0:
                raise ValueError("sinkhorn needs positive column sums")
            for i in range(k):
                arr[i, j] /= total
        dev = 0.0
        for i in range(k):
            total = 0.0
            for j in range(k):
                total += arr[i, j]
            diff = total - 1.0
            if diff < 0.0:
                diff = -diff
            if diff > dev:
                dev = diff
        for j in range(k):
            total = 0.0
            for i in range(k):
                total += arr[i, j]
            diff = total - 1.0
            if diff < 0.0:
                diff = -diff
            if diff > dev:
                dev = diff
        if dev < tol:
            break
    return out_arr
