"""Multi-index bookkeeping for truncated 4-variable Taylor jets.

Coefficients are stored densely in graded-lexicographic order, so the
coefficient vector of an order-k jet is a prefix of the order-K vector for
any K >= k.
"""
from __future__ import annotations

from functools import lru_cache
from math import comb, factorial

import numpy as np

NVARS = 4


def ncoef(order: int) -> int:
    return comb(order + NVARS, NVARS)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def multi_indices(order: int) -> tuple[tuple[int, int, int, int], ...]:
    out = []
    for d in range(order + 1):
        out.extend(_compositions(d, NVARS))
    return tuple(out)


class JetTables:
    """Precomputed index arrays for one truncation order."""

    def __init__(self, order: int):
        self.order = order
        self.alphas = multi_indices(order)
        self.n = len(self.alphas)
        self.index = {a: i for i, a in enumerate(self.alphas)}
        self.degree = np.array([sum(a) for a in self.alphas], dtype=np.int32)
        self.alpha_factorial = np.array(
            [np.prod([factorial(e) for e in a]) for a in self.alphas], dtype=float
        )

        pi, pj, po = [], [], []
        for i, a in enumerate(self.alphas):
            for j, b in enumerate(self.alphas):
                if sum(a) + sum(b) > order:
                    continue
                pi.append(i)
                pj.append(j)
                po.append(self.index[tuple(x + y for x, y in zip(a, b))])
        perm = np.lexsort((np.array(pi), np.array(po)))
        self.mul_i = np.ascontiguousarray(np.array(pi, dtype=np.int32)[perm])
        self.mul_j = np.ascontiguousarray(np.array(pj, dtype=np.int32)[perm])
        self.mul_o = np.ascontiguousarray(np.array(po, dtype=np.int32)[perm])

        # CSR over outputs: pairs (beta, gamma) with beta + gamma = alpha, beta != 0
        keep = self.mul_i != 0
        ri, rj, ro = self.mul_i[keep], self.mul_j[keep], self.mul_o[keep]
        self.rec_b = np.ascontiguousarray(ri)
        self.rec_g = np.ascontiguousarray(rj)
        self.rec_ptr = np.zeros(self.n + 1, dtype=np.int32)
        np.add.at(self.rec_ptr, ro + 1, 1)
        self.rec_ptr = np.ascontiguousarray(np.cumsum(self.rec_ptr).astype(np.int32))

        # d/dx_i maps an order-k jet to an order-(k-1) jet
        self.deriv_src = []
        self.deriv_fac = []
        if order >= 1:
            lower = multi_indices(order - 1)
            for v in range(NVARS):
                src, fac = [], []
                for b in lower:
                    a = list(b)
                    a[v] += 1
                    src.append(self.index[tuple(a)])
                    fac.append(b[v] + 1)
                self.deriv_src.append(np.array(src, dtype=np.intp))
                self.deriv_fac.append(np.array(fac, dtype=float))


@lru_cache(maxsize=None)
def tables(order: int) -> JetTables:
    if order < 0:
        raise ValueError(f"jet order must be >= 0, got {order}")
    return JetTables(order)
