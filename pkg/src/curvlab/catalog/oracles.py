"""Closed-form component tables for the catalog families.

Tables are data: ``TABLES[family][tensor]`` is a list of ``(index, expr)``
with 1-based indices and ``expr(P, x1, x2, x3, x4)``.  Unlisted components
are filled from the tensor's symmetries (Cotton: antisymmetric in the first
pair; Weyl: Riemann symmetries; Ricci, Bach: symmetric) and are otherwise 0.
Ricci operators are full matrices, row index up.
"""
from __future__ import annotations

from math import cos, cosh, exp

import numpy as np

from ..errors import NoOracle
from ..tensor import RIEMANN_SYMMETRIES, SYMMETRIC2, DenseTensor
from .families import FamilyId, FamilyParams, check_admissible, check_domain, metric_at

ORACLE_TENSORS = ("ricci_op", "ricci", "cotton", "weyl", "bach")

A1, A2, A3p, A3m, A4, A5, B1, B2, B3 = (
    FamilyId.A1, FamilyId.A2, FamilyId.A3plus, FamilyId.A3minus, FamilyId.A4,
    FamilyId.A5, FamilyId.B1, FamilyId.B2, FamilyId.B3,
)


def _ricop_a1(P, x1, x2, x3, x4):
    a, b, c, q = P.a, P.b, P.c, P.q
    k = b * (a + 4 * q) / (a * (a - 4 * q))
    return np.array([
        [-2, 0, 1, 0],
        [0, -2, -2 * x2, 0],
        [0, 0, 0, 0],
        [8 * k * x2, 4 * k, 2 * (a * x4 - c) / a, -2],
    ]) / a


def _ricop_a2(P, x1, x2, x3, x4):
    a, b, q, al = P.a, P.b, P.q, P.alpha
    m = -3 * al**2 / q * np.eye(4)
    # -3 al^2/q * b(3al-2)/(3 a al^2) e^{-2x4}, cancelled so that al = 0 is allowed
    m[0, 2] = -b * (3 * al - 2) * exp(-2 * x4) / (a * q)
    return m


def _ricop_a3(eps):
    def f(P, x1, x2, x3, x4):
        a, b, q = P.a, P.b, P.q
        m = np.eye(4)
        m[0, 3] = -eps * (b + eps * q) * exp(-2 * x3) / (3 * a)
        return -3 / b * m
    return f


def _ricop_a4(P, x1, x2, x3, x4):
    a, b = P.a, P.b
    m = np.eye(4)
    m[2, 0] = 40 * b * x2 / (3 * a * (x4**2 + 4))
    m[2, 1] = 20 * b / (3 * a * (x4**2 + 4))
    return -3 / a * m


def _ricci_a5(P, x1, x2, x3, x4):
    return np.array([
        [0, 3 * x4 / (2 * x2), 0, -1.5],
        [3 * x4 / (2 * x2), -3 * (x3**2 + 2 * x1 * x4 + 2) / (2 * x2**2), 3 * x3 / (2 * x2),
         3 * x1 / (2 * x2)],
        [0, 3 * x3 / (2 * x2), -1.5, 0],
        [-1.5, 3 * x1 / (2 * x2), 0, 0],
    ])


def _ricop_b1(P, x1, x2, x3, x4):
    a, b, c, q = P.a, P.b, P.c, P.q
    m = 3 * q / (2 * a**2) * np.eye(4)
    m[3, 0] = 15 / a**3 * x2 * (b * q - c**2)
    m[3, 1] = 15 / (2 * a**3) * (b * q - c**2)
    return m


def _ricop_b2(P, x1, x2, x3, x4):
    a, b = P.a, P.b
    m = np.eye(4)
    m[2, 0] = -40 * b * x2 / (3 * a * (x4**2 - 4))
    m[2, 1] = -20 * b / (3 * a * (x4**2 - 4))
    return -3 / a * m


def _b1_cotton():
    def k(P):
        return P.c**2 - P.b * P.q

    c232 = lambda P, x1, x2, x3, x4: 15 * P.q * k(P) / (4 * P.a**3)
    return [
        ((1, 2, 1), lambda P, x1, x2, x3, x4: 15 * x2 * (6 * P.a - P.q * x3) * k(P) / (2 * P.a**3)),
        ((1, 2, 2), lambda P, x1, x2, x3, x4: 15 * (6 * P.a - P.q * x3) * k(P) / (4 * P.a**3)),
        ((2, 3, 2), c232),
        ((1, 3, 1), lambda P, x1, x2, x3, x4: 4 * x2**2 * c232(P, x1, x2, x3, x4)),
        ((1, 3, 2), lambda P, x1, x2, x3, x4: 2 * x2 * c232(P, x1, x2, x3, x4)),
        ((2, 3, 1), lambda P, x1, x2, x3, x4: 2 * x2 * c232(P, x1, x2, x3, x4)),
    ]


def _b1_weyl():
    def K(P):
        return P.c**2 - P.b * P.q

    def L(P, x4):  # c + q x4
        return P.c + P.q * x4

    def M(P, x4):  # 7bq - 6c^2 + q x4 (2c + q x4)
        return 7 * P.b * P.q - 6 * P.c**2 + P.q * x4 * (2 * P.c + P.q * x4)

    return [
        ((1, 2, 1, 2), lambda P, x1, x2, x3, x4: (
            -6 * P.a**2 * (P.b + 2 * P.c * x4 + P.q * x4**2)
            + P.a * x3 * (-7 * P.b * P.q + 6 * P.c**2 - P.q * x4 * (2 * P.c + P.q * x4))
            + 5 * P.q * x3**2 * K(P)) / (2 * P.a**2)),
        ((1, 2, 1, 3), lambda P, x1, x2, x3, x4: (
            2 * x2 * (P.a * M(P, x4) - 10 * P.q * x3 * K(P))
            - P.a * (6 * P.a + P.q * x3) * L(P, x4)) / (4 * P.a**2)),
        ((1, 2, 1, 4), lambda P, x1, x2, x3, x4: -(
            2 * x2 * (6 * P.a + P.q * x3) * L(P, x4) + P.q * x3 * (2 * P.a + P.q * x3)) / (4 * P.a)),
        ((1, 2, 2, 3), lambda P, x1, x2, x3, x4: (
            P.a * M(P, x4) - 10 * P.q * x3 * K(P)) / (4 * P.a**2)),
        ((1, 2, 2, 4), lambda P, x1, x2, x3, x4: -(6 * P.a + P.q * x3) * L(P, x4) / (4 * P.a)),
        ((1, 2, 3, 4), lambda P, x1, x2, x3, x4: -P.q * (2 * P.a + P.q * x3) / (4 * P.a)),
        ((1, 3, 1, 3), lambda P, x1, x2, x3, x4: P.q * (
            -P.a**2 + 2 * P.a * x2 * L(P, x4) + 20 * x2**2 * K(P)) / (2 * P.a**2)),
        ((1, 3, 1, 4), lambda P, x1, x2, x3, x4: P.q * x2 * (
            -2 * P.a + 2 * x2 * L(P, x4) + P.q * x3) / (2 * P.a)),
        ((1, 3, 2, 3), lambda P, x1, x2, x3, x4: P.q * (
            P.a * L(P, x4) + 20 * x2 * K(P)) / (4 * P.a**2)),
        ((1, 3, 2, 4), lambda P, x1, x2, x3, x4: P.q * (x2 * L(P, x4) - P.a) / (2 * P.a)),
        ((1, 3, 3, 4), lambda P, x1, x2, x3, x4: P.q**2 * x2 / (2 * P.a)),
        ((1, 4, 2, 3), lambda P, x1, x2, x3, x4: P.q * (2 * x2 * L(P, x4) + P.q * x3) / (4 * P.a)),
        ((1, 4, 2, 4), lambda P, x1, x2, x3, x4: -P.q * x2),
        ((1, 4, 1, 4), lambda P, x1, x2, x3, x4: -2 * P.q * x2**2),
        ((2, 3, 3, 4), lambda P, x1, x2, x3, x4: P.q**2 / (4 * P.a)),
        ((2, 4, 2, 4), lambda P, x1, x2, x3, x4: -P.q / 2),
        ((2, 3, 2, 3), lambda P, x1, x2, x3, x4: 5 * P.q * K(P) / (2 * P.a**2)),
        ((2, 3, 2, 4), lambda P, x1, x2, x3, x4: P.q * L(P, x4) / (4 * P.a)),
    ]


def _a1_kappa(P):
    return P.b * (P.a + 4 * P.q) / (P.a * (P.a - 4 * P.q))


def _a1_bach(P):
    return P.b * P.q * (3 * P.a + 4 * P.q) / (P.a**2 * (P.a - 4 * P.q) ** 2)


def _bach_2x2(f11):
    """Bach displays of the shape [[4 x2^2 k, 2 x2 k], [2 x2 k, k]] with k = f11(P)."""
    return [
        ((1, 1), lambda P, x1, x2, x3, x4: 4 * x2**2 * f11(P)),
        ((1, 2), lambda P, x1, x2, x3, x4: 2 * x2 * f11(P)),
        ((2, 2), lambda P, x1, x2, x3, x4: f11(P)),
    ]


TABLES = {
    A1: {
        "ricci_op": _ricop_a1,
        "cotton": [
            ((1, 2, 1), lambda P, x1, x2, x3, x4: -24 * P.b * x2 * (P.a + 4 * P.q) / (P.a * (P.a - 4 * P.q))),
            ((1, 2, 2), lambda P, x1, x2, x3, x4: -12 * P.b * (P.a + 4 * P.q) / (P.a * (P.a - 4 * P.q))),
            ((1, 3, 1), lambda P, x1, x2, x3, x4: 64 * P.b * P.q * x2**2 / (P.a**2 - 4 * P.a * P.q)),
            ((1, 3, 2), lambda P, x1, x2, x3, x4: 32 * P.b * P.q * x2 / (P.a**2 - 4 * P.a * P.q)),
            ((2, 3, 1), lambda P, x1, x2, x3, x4: 32 * P.b * P.q * x2 / (P.a**2 - 4 * P.a * P.q)),
            ((2, 3, 2), lambda P, x1, x2, x3, x4: 16 * P.b * P.q / (P.a**2 - 4 * P.a * P.q)),
        ],
        "weyl": [
            ((1, 2, 1, 2), lambda P, x1, x2, x3, x4: (8 * P.b * P.q - 6 * P.a * P.b) / (P.a - 4 * P.q)),
            ((1, 2, 1, 3), lambda P, x1, x2, x3, x4: -16 * P.b * P.q * x2 / (P.a - 4 * P.q)),
            ((1, 2, 2, 3), lambda P, x1, x2, x3, x4: -8 * P.b * P.q / (P.a - 4 * P.q)),
            ((1, 3, 1, 3), lambda P, x1, x2, x3, x4: -8 * P.q * x2**2 * _a1_kappa(P)),
            ((1, 3, 2, 3), lambda P, x1, x2, x3, x4: -4 * P.q * x2 * _a1_kappa(P)),
            ((2, 3, 2, 3), lambda P, x1, x2, x3, x4: -2 * P.q * _a1_kappa(P)),
        ],
        "bach": _bach_2x2(lambda P: -64 * _a1_bach(P)),
    },
    A2: {
        "ricci_op": _ricop_a2,
        "cotton": [
            ((3, 4, 3), lambda P, x1, x2, x3, x4: -(P.alpha - 2) * (3 * P.alpha - 2) * P.b
             * exp(2 * (P.alpha - 1) * x4) / P.q),
        ],
        "weyl": [
            ((2, 3, 2, 3), lambda P, x1, x2, x3, x4: -(P.alpha - 2) * P.a * P.b
             * exp(2 * (2 * P.alpha - 1) * x4) / (2 * P.q)),
            ((3, 4, 3, 4), lambda P, x1, x2, x3, x4: 0.5 * (P.alpha - 2) * P.b
             * exp(2 * (P.alpha - 1) * x4)),
        ],
        "bach": [
            ((3, 3), lambda P, x1, x2, x3, x4: (P.alpha - 2) * (P.alpha - 1) * (3 * P.alpha - 2)
             * P.b * exp(2 * (P.alpha - 1) * x4) / P.q**2),
        ],
    },
    A3p: {
        "ricci_op": _ricop_a3(1),
        "cotton": [((3, 4, 4), lambda P, x1, x2, x3, x4: -(P.b + P.q) / P.b)],
        "weyl": [
            ((2, 4, 2, 4), lambda P, x1, x2, x3, x4: P.a * exp(2 * x3) * (P.b + P.q) * cos(x4) ** 2 / (2 * P.b)),
            ((3, 4, 3, 4), lambda P, x1, x2, x3, x4: -(P.b + P.q) / 2),
        ],
        "bach": [],
    },
    A3m: {
        "ricci_op": _ricop_a3(-1),
        "cotton": [((3, 4, 4), lambda P, x1, x2, x3, x4: 1 - P.q / P.b)],
        "weyl": [
            ((2, 4, 2, 4), lambda P, x1, x2, x3, x4: -P.a * exp(2 * x3) * (P.b - P.q) * cosh(x4) ** 2 / (2 * P.b)),
            ((3, 4, 3, 4), lambda P, x1, x2, x3, x4: (P.b - P.q) / 2),
        ],
        "bach": [],
    },
    A4: {
        "ricci_op": _ricop_a4,
        "cotton": [
            ((1, 2, 1), lambda P, x1, x2, x3, x4: 30 * P.b * x2 / P.a),
            ((1, 2, 2), lambda P, x1, x2, x3, x4: 15 * P.b / P.a),
        ],
        "weyl": [
            ((1, 2, 1, 2), lambda P, x1, x2, x3, x4: 0.75 * P.b * (x4**2 - 2)),
            ((1, 2, 1, 4), lambda P, x1, x2, x3, x4: -1.5 * P.b * x2 * x4),
            ((1, 2, 2, 4), lambda P, x1, x2, x3, x4: -0.75 * P.b * x4),
            ((1, 4, 1, 4), lambda P, x1, x2, x3, x4: 3 * P.b * x2**2),
            ((1, 4, 2, 4), lambda P, x1, x2, x3, x4: 1.5 * P.b * x2),
            ((2, 4, 2, 4), lambda P, x1, x2, x3, x4: 0.75 * P.b),
        ],
        "bach": _bach_2x2(lambda P: -30 * P.b / P.a**2),
    },
    A5: {
        "ricci": _ricci_a5,
        "ricci_op": lambda P, x1, x2, x3, x4: -12 / P.a * np.eye(4),
        "weyl": [],
    },
    B1: {
        "ricci_op": _ricop_b1,
        "cotton": _b1_cotton(),
        "weyl": _b1_weyl(),
        "bach": _bach_2x2(lambda P: 60 * P.q * (P.c**2 - P.b * P.q) / P.a**4),
    },
    B2: {
        "ricci_op": _ricop_b2,
        "cotton": [
            ((1, 2, 1), lambda P, x1, x2, x3, x4: 30 * P.b * x2 / P.a),
            ((1, 2, 2), lambda P, x1, x2, x3, x4: 15 * P.b / P.a),
        ],
        "weyl": [
            ((1, 2, 1, 2), lambda P, x1, x2, x3, x4: -0.75 * P.b * (x4**2 + 2)),
            ((1, 2, 1, 4), lambda P, x1, x2, x3, x4: 1.5 * P.b * x2 * x4),
            ((1, 2, 2, 4), lambda P, x1, x2, x3, x4: 0.75 * P.b * x4),
            ((1, 4, 1, 4), lambda P, x1, x2, x3, x4: -3 * P.b * x2**2),
            ((1, 4, 2, 4), lambda P, x1, x2, x3, x4: -1.5 * P.b * x2),
            ((2, 4, 2, 4), lambda P, x1, x2, x3, x4: -0.75 * P.b),
        ],
        "bach": _bach_2x2(lambda P: -30 * P.b / P.a**2),
    },
    B3: {
        "ricci_op": lambda P, x1, x2, x3, x4: np.zeros((4, 4)),
        "ricci": lambda P, x1, x2, x3, x4: np.zeros((4, 4)),
        "cotton": [],
        "weyl": [((2, 3, 2, 3), lambda P, x1, x2, x3, x4: -3 * P.b)],
        "bach": [],
    },
}


def has_oracle(family, which: str) -> bool:
    family = FamilyId.parse(family)
    table = TABLES[family]
    if which in table:
        return True
    # Ricci tensor and operator determine each other through the metric
    return (which == "ricci" and "ricci_op" in table) or (which == "ricci_op" and "ricci" in table)


def oracle_families(which: str) -> list[FamilyId]:
    return [f for f in FamilyId if has_oracle(f, which)]


def _fill_cotton(entries, args):
    out = np.zeros((4, 4, 4))
    for (i, j, k), f in entries:
        v = f(*args)
        out[i - 1, j - 1, k - 1] = v
        out[j - 1, i - 1, k - 1] = -v
    return out


def _fill_weyl(entries, args):
    out = np.zeros((4, 4, 4, 4))
    for (i, j, k, l), f in entries:
        v = f(*args)
        i, j, k, l = i - 1, j - 1, k - 1, l - 1
        for (p, r, s, t), sgn in (
            ((i, j, k, l), 1), ((j, i, k, l), -1), ((i, j, l, k), -1), ((j, i, l, k), 1),
            ((k, l, i, j), 1), ((l, k, i, j), -1), ((k, l, j, i), -1), ((l, k, j, i), 1),
        ):
            out[p, r, s, t] = sgn * v
    return out


def _fill_sym(entries, args):
    out = np.zeros((4, 4))
    for (i, j), f in entries:
        out[i - 1, j - 1] = out[j - 1, i - 1] = f(*args)
    return out


def oracle_components(family, params: FamilyParams, x, which: str) -> DenseTensor:
    """Closed-form components of ``which`` for ``family`` at ``(params, x)``."""
    family = FamilyId.parse(family)
    if which not in ORACLE_TENSORS:
        raise ValueError(f"unknown tensor {which!r}; expected one of {ORACLE_TENSORS}")
    if not has_oracle(family, which):
        raise NoOracle(f"no oracle for {which} of family {family.value}")
    check_admissible(family, params)
    check_domain(family, x)
    table = TABLES[family]
    args = (params,) + tuple(float(v) for v in x)

    if which in ("ricci", "ricci_op") and which not in table:
        g = metric_at(family, params, x, order=1).g
        if which == "ricci":
            return DenseTensor(g @ table["ricci_op"](*args), "dd", SYMMETRIC2)
        return DenseTensor(np.linalg.solve(g, table["ricci"](*args)), "ud")
    entry = table[which]
    if which == "ricci_op":
        return DenseTensor(np.asarray(entry(*args), dtype=float), "ud")
    if which == "ricci":
        return DenseTensor(np.asarray(entry(*args), dtype=float), "dd", SYMMETRIC2)
    if which == "cotton":
        return DenseTensor(_fill_cotton(entry, args), "ddd", (((1, 0, 2), -1),))
    if which == "weyl":
        return DenseTensor(_fill_weyl(entry, args), "dddd", RIEMANN_SYMMETRIES)
    return DenseTensor(_fill_sym(entry, args), "dd", SYMMETRIC2)
