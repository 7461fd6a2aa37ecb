"""Truncated multivariate Taylor jets in four variables.

A :class:`Jet` of order ``K`` holds the coefficients ``c_alpha`` of the Taylor
polynomial of a function about a basepoint, for all multi-indices with
``|alpha| <= K``; ``c_alpha = d^alpha f / alpha!``.  Jets may be batched: the
coefficient array has shape ``batch_shape + (ncoef(K),)`` so that a whole
tensor field can be pushed through one kernel call.
"""
from __future__ import annotations

import numbers

import numpy as np

from ._backend import kernels
from ._tables import NVARS, multi_indices, ncoef, tables
from .errors import OrderExceeded, SingularDivisor

__all__ = [
    "Jet",
    "MultiIndex",
    "jet_var",
    "jet_const",
    "jet_arith",
    "jet_elementary",
    "extract_partial",
    "contract",
]

MultiIndex = tuple  # 4 non-negative ints


def _run1(fn, c, order):
    n = c.shape[-1]
    flat = np.ascontiguousarray(c, dtype=float).reshape(-1, n)
    out = fn(flat, tables(order))
    if isinstance(out, tuple):
        return tuple(o.reshape(c.shape) for o in out)
    return out.reshape(c.shape)


def _run2(fn, a, b, order):
    n = a.shape[-1]
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
    a2 = np.ascontiguousarray(np.broadcast_to(a, shape + (n,))).reshape(-1, n)
    b2 = np.ascontiguousarray(np.broadcast_to(b, shape + (n,))).reshape(-1, n)
    return fn(a2, b2, tables(order)).reshape(shape + (n,))


class Jet:
    """Truncated Taylor expansion (possibly batched) at a common basepoint."""

    __slots__ = ("coeffs", "order", "point")
    __array_priority__ = 1000

    def __init__(self, coeffs, order: int, point=None):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[-1] != ncoef(order):
            raise ValueError(
                f"order-{order} jet needs {ncoef(order)} coefficients, got {coeffs.shape[-1]}"
            )
        self.coeffs = coeffs
        self.order = order
        self.point = None if point is None else tuple(float(p) for p in point)

    # -- structure ---------------------------------------------------------
    @property
    def shape(self):
        return self.coeffs.shape[:-1]

    @property
    def value(self):
        v = self.coeffs[..., 0]
        return float(v) if v.ndim == 0 else v

    def __getitem__(self, idx):
        return Jet(self.coeffs[idx], self.order, self.point)

    def __len__(self):
        return self.shape[0]

    def __repr__(self):
        return f"Jet(order={self.order}, shape={self.shape}, value={self.coeffs[..., 0]!r})"

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise OrderExceeded(f"cannot raise jet order {self.order} to {order}")
        if order == self.order:
            return self
        return Jet(self.coeffs[..., : ncoef(order)], order, self.point)

    def deriv(self, var: int) -> "Jet":
        """Partial derivative along coordinate ``var`` (0-based); order drops by one."""
        if self.order < 1:
            raise OrderExceeded("order exceeded: cannot differentiate an order-0 jet")
        t = tables(self.order)
        c = self.coeffs[..., t.deriv_src[var]] * t.deriv_fac[var]
        return Jet(c, self.order - 1, self.point)

    def grad(self) -> "Jet":
        """Stack of the four first partials, new leading axis."""
        return stack([self.deriv(v) for v in range(NVARS)])

    def partial(self, alpha) -> float | np.ndarray:
        return extract_partial(self, alpha)

    def partials(self) -> np.ndarray:
        """All partial derivatives d^alpha f in coefficient order."""
        return self.coeffs * tables(self.order).alpha_factorial

    def sum(self, axis=None) -> "Jet":
        if axis is None:
            axis = tuple(range(len(self.shape)))
        elif isinstance(axis, int):
            axis = (axis,)
        axis = tuple(a % len(self.shape) for a in axis)
        return Jet(self.coeffs.sum(axis=axis), self.order, self.point)

    def transpose(self, *axes) -> "Jet":
        return Jet(np.transpose(self.coeffs, tuple(axes) + (len(self.shape),)),
                   self.order, self.point)

    # -- arithmetic --------------------------------------------------------
    def _align(self, other):
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            point = self.point if self.point is not None else other.point
            return self.truncate(order).coeffs, other.truncate(order).coeffs, order, point
        return None

    def _const(self, value):
        value = np.asarray(value, dtype=float)
        c = np.zeros(value.shape + (self.coeffs.shape[-1],))
        c[..., 0] = value
        return c

    def __add__(self, other):
        al = self._align(other)
        if al is None:
            if not isinstance(other, (numbers.Number, np.ndarray)):
                return NotImplemented
            return Jet(self.coeffs + self._const(other), self.order, self.point)
        a, b, order, point = al
        return Jet(a + b, order, point)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs, self.order, self.point)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        al = self._align(other)
        if al is None:
            if not isinstance(other, (numbers.Number, np.ndarray)):
                return NotImplemented
            return Jet(self.coeffs * np.asarray(other, dtype=float)[..., None],
                       self.order, self.point)
        a, b, order, point = al
        return Jet(_run2(kernels.mul, a, b, order), order, point)

    __rmul__ = __mul__

    def __truediv__(self, other):
        al = self._align(other)
        if al is None:
            other = np.asarray(other, dtype=float)
            if np.any(other == 0):
                raise SingularDivisor("singular divisor")
            return Jet(self.coeffs / other[..., None], self.order, self.point)
        a, b, order, point = al
        try:
            return Jet(_run2(kernels.div, a, b, order), order, point)
        except ZeroDivisionError as exc:
            raise SingularDivisor("singular divisor") from exc

    def __rtruediv__(self, other):
        return Jet(self._const(other), self.order, self.point) / self

    def __pow__(self, n):
        if isinstance(n, numbers.Integral) or (isinstance(n, float) and n.is_integer()):
            return pow_int(self, int(n))
        return exp(log(self) * float(n))

    def reciprocal(self):
        return 1.0 / self


# -- constructors ------------------------------------------------------------

def jet_const(value, point, order: int) -> Jet:
    value = np.asarray(value, dtype=float)
    c = np.zeros(value.shape + (ncoef(order),))
    c[..., 0] = value
    return Jet(c, order, point)


def jet_var(i: int, basepoint, order: int = 4) -> Jet:
    """Jet of the coordinate function ``x_i`` (1-based ``i``) at ``basepoint``."""
    if not isinstance(i, numbers.Integral) or not 1 <= i <= NVARS:
        raise ValueError(f"invalid coordinate index {i!r}; expected 1..{NVARS}")
    if order < 1:
        raise ValueError("jet order must be >= 1 for a coordinate jet")
    if len(basepoint) != NVARS:
        raise ValueError("basepoint must have 4 components")
    c = np.zeros(ncoef(order))
    c[0] = basepoint[i - 1]
    c[1 + (i - 1)] = 1.0
    return Jet(c, order, basepoint)


def jet_vars(basepoint, order: int = 4) -> tuple[Jet, Jet, Jet, Jet]:
    return tuple(jet_var(i, basepoint, order) for i in range(1, NVARS + 1))


def stack(jets, axis: int = 0) -> Jet:
    jets = list(jets)
    order = min(j.order for j in jets)
    coeffs = np.stack([j.truncate(order).coeffs for j in jets], axis=axis)
    return Jet(coeffs, order, jets[0].point)


def from_array(arr, order: int, point=None) -> Jet:
    """Stack an array-like nest of Jets/numbers into one batched Jet."""
    arr = np.asarray(arr, dtype=object)
    flat = []
    for item in arr.ravel():
        if isinstance(item, Jet):
            flat.append(item.truncate(order).coeffs)
        else:
            c = np.zeros(ncoef(order))
            c[0] = float(item)
            flat.append(c)
    coeffs = np.stack(flat).reshape(arr.shape + (ncoef(order),))
    return Jet(coeffs, order, point)


# -- operations ----------------------------------------------------------------

def jet_arith(a: Jet, b: Jet, op: str) -> Jet:
    if a.order != b.order:
        raise ValueError(f"order mismatch: {a.order} vs {b.order}")
    if a.point is not None and b.point is not None and a.point != b.point:
        raise ValueError("basepoint mismatch")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown jet operation {op!r}")


def exp(a: Jet) -> Jet:
    return Jet(_run1(kernels.exp, a.coeffs, a.order), a.order, a.point)


def log(a: Jet) -> Jet:
    if np.any(a.coeffs[..., 0] <= 0.0):
        raise ValueError("log of non-positive value")
    return Jet(_run1(kernels.log, a.coeffs, a.order), a.order, a.point)


def sin(a: Jet) -> Jet:
    return Jet(_run1(kernels.sincos, a.coeffs, a.order)[0], a.order, a.point)


def cos(a: Jet) -> Jet:
    return Jet(_run1(kernels.sincos, a.coeffs, a.order)[1], a.order, a.point)


def sinh(a: Jet) -> Jet:
    return Jet(_run1(kernels.sinhcosh, a.coeffs, a.order)[0], a.order, a.point)


def cosh(a: Jet) -> Jet:
    return Jet(_run1(kernels.sinhcosh, a.coeffs, a.order)[1], a.order, a.point)


def sqrt(a: Jet) -> Jet:
    return exp(log(a) * 0.5)


def pow_int(a: Jet, n: int) -> Jet:
    if n < 0:
        return 1.0 / pow_int(a, -n)
    result = None
    base = a
    while True:
        if n & 1:
            result = base if result is None else result * base
        n >>= 1
        if not n:
            break
        base = base * base
    if result is None:
        return jet_const(np.ones(a.shape), a.point, a.order)
    return result


_ELEMENTARY = {"exp": exp, "log": log, "sin": sin, "cos": cos, "sinh": sinh, "cosh": cosh}


def jet_elementary(a: Jet, f: str, n: int | None = None) -> Jet:
    if f == "pow_int":
        if n is None:
            raise ValueError("pow_int needs an integer exponent")
        return pow_int(a, n)
    try:
        return _ELEMENTARY[f](a)
    except KeyError:
        raise ValueError(f"unknown elementary function {f!r}") from None


def extract_partial(a: Jet, alpha) -> float | np.ndarray:
    """The partial derivative d^alpha f at the basepoint (``alpha!`` times the coefficient)."""
    alpha = tuple(int(e) for e in alpha)
    if len(alpha) != NVARS or min(alpha) < 0:
        raise ValueError(f"bad multi-index {alpha!r}")
    if sum(alpha) > a.order:
        raise OrderExceeded(f"order exceeded: |alpha| = {sum(alpha)} > K = {a.order}")
    t = tables(a.order)
    k = t.index[alpha]
    v = a.coeffs[..., k] * t.alpha_factorial[k]
    return float(v) if np.ndim(v) == 0 else v


def coefficient_index(alpha) -> int:
    return tables(sum(alpha)).index[tuple(alpha)]


# -- batched tensor contraction ------------------------------------------------

def contract(subscripts: str, a: Jet, b: Jet) -> Jet:
    """Einstein-style product of two batched jets, e.g. ``"kl,ijl->kij"``.

    Labels absent from the output are summed after the (Cauchy) product.
    """
    lhs, out = subscripts.replace(" ", "").split("->")
    sa, sb = lhs.split(",")
    labels = "".join(dict.fromkeys(sa + sb))
    if len(sa) != len(a.shape) or len(sb) != len(b.shape):
        raise ValueError(f"subscripts {subscripts!r} do not match shapes {a.shape}, {b.shape}")
    order = min(a.order, b.order)

    def expand(jet, sub):
        c = jet.truncate(order).coeffs
        perm = [sub.index(l) for l in labels if l in sub]
        c = np.transpose(c, perm + [len(sub)])
        idx = tuple(slice(None) if l in sub else None for l in labels) + (slice(None),)
        return c[idx]

    prod = _run2(kernels.mul, expand(a, sa), expand(b, sb), order)
    summed = tuple(i for i, l in enumerate(labels) if l not in out)
    if summed:
        prod = prod.sum(axis=summed)
    kept = [l for l in labels if l in out]
    prod = np.transpose(prod, [kept.index(l) for l in out] + [len(out)])
    return Jet(np.ascontiguousarray(prod), order, a.point if a.point is not None else b.point)

