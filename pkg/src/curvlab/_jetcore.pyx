# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled jet kernels. Same API as ``curvlab._jetcore_py``."""
import numpy as np
from libc.math cimport exp as c_exp, log as c_log, sin as c_sin, cos as c_cos
from libc.math cimport sinh as c_sinh, cosh as c_cosh

NAME = "cython"


def mul(const double[:, ::1] a, const double[:, ::1] b, t):
    cdef const int[::1] pi = t.mul_i, pj = t.mul_j, po = t.mul_o
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1], npair = pi.shape[0]
    cdef Py_ssize_t r, k
    out = np.zeros((m, n))
    cdef double[:, ::1] o = out
    with nogil:
        for r in range(m):
            for k in range(npair):
                o[r, po[k]] += a[r, pi[k]] * b[r, pj[k]]
    return out


def div(const double[:, ::1] a, const double[:, ::1] b, t):
    cdef const int[::1] ptr = t.rec_ptr, rb = t.rec_b, rg = t.rec_g
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1], r, o, k
    cdef double s, b0
    out = np.empty((m, n))
    cdef double[:, ::1] c = out
    for r in range(m):
        if b[r, 0] == 0.0:
            raise ZeroDivisionError("singular divisor")
    with nogil:
        for r in range(m):
            b0 = b[r, 0]
            c[r, 0] = a[r, 0] / b0
            for o in range(1, n):
                s = a[r, o]
                for k in range(ptr[o], ptr[o + 1]):
                    s -= b[r, rb[k]] * c[r, rg[k]]
                c[r, o] = s / b0
    return out


def exp(const double[:, ::1] a, t):
    cdef const int[::1] ptr = t.rec_ptr, rb = t.rec_b, rg = t.rec_g, deg = t.degree
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1], r, o, k
    cdef double s
    out = np.empty((m, n))
    cdef double[:, ::1] e = out
    with nogil:
        for r in range(m):
            e[r, 0] = c_exp(a[r, 0])
            for o in range(1, n):
                s = 0.0
                for k in range(ptr[o], ptr[o + 1]):
                    s += deg[rb[k]] * a[r, rb[k]] * e[r, rg[k]]
                e[r, o] = s / deg[o]
    return out


def log(const double[:, ::1] a, t):
    cdef const int[::1] ptr = t.rec_ptr, rb = t.rec_b, rg = t.rec_g, deg = t.degree
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1], r, o, k
    cdef double s, a0
    out = np.empty((m, n))
    cdef double[:, ::1] l = out
    for r in range(m):
        if a[r, 0] <= 0.0:
            raise ValueError("log of non-positive value")
    with nogil:
        for r in range(m):
            a0 = a[r, 0]
            l[r, 0] = c_log(a0)
            for o in range(1, n):
                s = deg[o] * a[r, o]
                for k in range(ptr[o], ptr[o + 1]):
                    s -= a[r, rb[k]] * deg[rg[k]] * l[r, rg[k]]
                l[r, o] = s / (deg[o] * a0)
    return out


cdef _pair(const double[:, ::1] a, t, double sign, bint hyperbolic):
    cdef const int[::1] ptr = t.rec_ptr, rb = t.rec_b, rg = t.rec_g, deg = t.degree
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1], r, o, k
    cdef double sf, sg, w
    fo = np.empty((m, n))
    go = np.empty((m, n))
    cdef double[:, ::1] f = fo
    cdef double[:, ::1] g = go
    with nogil:
        for r in range(m):
            if hyperbolic:
                f[r, 0] = c_sinh(a[r, 0])
                g[r, 0] = c_cosh(a[r, 0])
            else:
                f[r, 0] = c_sin(a[r, 0])
                g[r, 0] = c_cos(a[r, 0])
            for o in range(1, n):
                sf = 0.0
                sg = 0.0
                for k in range(ptr[o], ptr[o + 1]):
                    w = deg[rb[k]] * a[r, rb[k]]
                    sf += w * g[r, rg[k]]
                    sg += w * f[r, rg[k]]
                f[r, o] = sf / deg[o]
                g[r, o] = sign * sg / deg[o]
    return fo, go


def sincos(const double[:, ::1] a, t):
    return _pair(a, t, -1.0, False)


def sinhcosh(const double[:, ::1] a, t):
    return _pair(a, t, 1.0, True)
