# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the empirical characteristic function loops.

Same contract as ``_kernels_py``; no ``L x N`` temporaries are allocated.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def ecf(X, T):
    cdef const double[:, ::1] x = np.ascontiguousarray(X, dtype=np.float64)
    cdef const double[:, ::1] t = np.ascontiguousarray(T, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0], L = t.shape[0], D = t.shape[1]
    cdef Py_ssize_t i, k, d
    cdef double dot, sc, ss, inv_n
    re = np.empty(L)
    im = np.empty(L)
    cdef double[::1] r = re
    cdef double[::1] m = im
    if x.shape[1] != D:
        raise ValueError("dimension mismatch between samples and frequencies")
    inv_n = 1.0 / n
    with nogil:
        for i in range(L):
            sc = 0.0
            ss = 0.0
            for k in range(n):
                dot = 0.0
                for d in range(D):
                    dot = dot + t[i, d] * x[k, d]
                sc = sc + cos(dot)
                ss = ss + sin(dot)
            r[i] = sc * inv_n
            m[i] = ss * inv_n
    return re, im


def ecf_grad(Y, T, wu, wv):
    cdef const double[:, ::1] y = np.ascontiguousarray(Y, dtype=np.float64)
    cdef const double[:, ::1] t = np.ascontiguousarray(T, dtype=np.float64)
    cdef const double[::1] a = np.ascontiguousarray(wu, dtype=np.float64)
    cdef const double[::1] b = np.ascontiguousarray(wv, dtype=np.float64)
    cdef Py_ssize_t M = y.shape[0], L = t.shape[0], D = t.shape[1]
    cdef Py_ssize_t j, i, d
    cdef double dot, c
    out = np.zeros((M, D))
    cdef double[:, ::1] g = out
    if y.shape[1] != D:
        raise ValueError("dimension mismatch between samples and frequencies")
    with nogil:
        for j in range(M):
            for i in range(L):
                dot = 0.0
                for d in range(D):
                    dot = dot + t[i, d] * y[j, d]
                c = b[i] * cos(dot) - a[i] * sin(dot)
                for d in range(D):
                    g[j, d] = g[j, d] + c * t[i, d]
    return out


def trig(Y, T):
    """``cos`` and ``sin`` of ``Y @ T.T`` as two ``M x L`` arrays."""
    cdef const double[:, ::1] y = np.ascontiguousarray(Y, dtype=np.float64)
    cdef const double[:, ::1] t = np.ascontiguousarray(T, dtype=np.float64)
    cdef Py_ssize_t M = y.shape[0], L = t.shape[0], D = t.shape[1]
    cdef Py_ssize_t j, i, d
    cdef double dot
    if y.shape[1] != D:
        raise ValueError("dimension mismatch between samples and frequencies")
    co = np.empty((M, L))
    si = np.empty((M, L))
    cdef double[:, ::1] c = co
    cdef double[:, ::1] s = si
    with nogil:
        for j in range(M):
            for i in range(L):
                dot = 0.0
                for d in range(D):
                    dot = dot + t[i, d] * y[j, d]
                c[j, i] = cos(dot)
                s[j, i] = sin(dot)
    return co, si
