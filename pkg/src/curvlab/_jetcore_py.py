"""Pure numpy jet kernels; reference backend and fallback for the compiled core.

Every kernel takes C-contiguous float64 arrays of shape (batch, n) and the
:class:`~curvlab._tables.JetTables` of the common order.
"""
import numpy as np

NAME = "python"


def _starts(t):
    starts = getattr(t, "_reduce_starts", None)
    if starts is None:
        starts = np.flatnonzero(np.r_[True, t.mul_o[1:] != t.mul_o[:-1]])
        t._reduce_starts = starts
    return starts


def mul(a, b, t):
    prod = a[:, t.mul_i] * b[:, t.mul_j]
    return np.add.reduceat(prod, _starts(t), axis=1)


def div(a, b, t):
    out = np.empty_like(a)
    b0 = b[:, 0]
    if np.any(b0 == 0.0):
        raise ZeroDivisionError("singular divisor")
    out[:, 0] = a[:, 0] / b0
    ptr, rb, rg = t.rec_ptr, t.rec_b, t.rec_g
    for o in range(1, t.n):
        s = slice(ptr[o], ptr[o + 1])
        out[:, o] = (a[:, o] - np.sum(b[:, rb[s]] * out[:, rg[s]], axis=1)) / b0
    return out


def exp(a, t):
    out = np.empty_like(a)
    out[:, 0] = np.exp(a[:, 0])
    ptr, rb, rg, deg = t.rec_ptr, t.rec_b, t.rec_g, t.degree
    for o in range(1, t.n):
        s = slice(ptr[o], ptr[o + 1])
        w = deg[rb[s]] * a[:, rb[s]]
        out[:, o] = np.sum(w * out[:, rg[s]], axis=1) / deg[o]
    return out


def log(a, t):
    out = np.empty_like(a)
    a0 = a[:, 0]
    if np.any(a0 <= 0.0):
        raise ValueError("log of non-positive value")
    out[:, 0] = np.log(a0)
    ptr, rb, rg, deg = t.rec_ptr, t.rec_b, t.rec_g, t.degree
    for o in range(1, t.n):
        s = slice(ptr[o], ptr[o + 1])
        acc = np.sum(a[:, rb[s]] * deg[rg[s]] * out[:, rg[s]], axis=1)
        out[:, o] = (deg[o] * a[:, o] - acc) / (deg[o] * a0)
    return out


def _trig_pair(a, t, sign, f0, g0):
    f = np.empty_like(a)
    g = np.empty_like(a)
    f[:, 0] = f0
    g[:, 0] = g0
    ptr, rb, rg, deg = t.rec_ptr, t.rec_b, t.rec_g, t.degree
    for o in range(1, t.n):
        s = slice(ptr[o], ptr[o + 1])
        w = deg[rb[s]] * a[:, rb[s]]
        f[:, o] = np.sum(w * g[:, rg[s]], axis=1) / deg[o]
        g[:, o] = sign * np.sum(w * f[:, rg[s]], axis=1) / deg[o]
    return f, g


def sincos(a, t):
    return _trig_pair(a, t, -1.0, np.sin(a[:, 0]), np.cos(a[:, 0]))


def sinhcosh(a, t):
    return _trig_pair(a, t, 1.0, np.sinh(a[:, 0]), np.cosh(a[:, 0]))
