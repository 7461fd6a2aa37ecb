"""Dense small-rank tensors over a 4-dimensional tangent space, and metric data at a point."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DegenerateMetric
from .jet import Jet, contract, extract_partial, jet_const

DIM = 4


@dataclass
class DenseTensor:
    """Components in row-major order; ``variance[k]`` is ``'u'`` or ``'d'`` for slot k.

    ``symmetries`` lists ``(permutation, sign)`` pairs with
    T = sign * T.transpose(permutation); they are checked on construction.
    """

    components: np.ndarray
    variance: str
    symmetries: tuple = field(default=())

    def __post_init__(self):
        self.components = np.asarray(self.components, dtype=float)
        if self.components.shape != (DIM,) * len(self.variance):
            raise ValueError(
                f"rank-{len(self.variance)} tensor needs shape {(DIM,) * len(self.variance)}, "
                f"got {self.components.shape}"
            )
        if set(self.variance) - {"u", "d"}:
            raise ValueError(f"variance must use 'u'/'d', got {self.variance!r}")
        scale = max(float(np.max(np.abs(self.components))), 1.0)
        for perm, sign in self.symmetries:
            err = np.max(np.abs(self.components - sign * np.transpose(self.components, perm)))
            if err > 1e-12 * scale:
                raise ValueError(f"declared symmetry {perm} (sign {sign:+d}) violated by {err:.3g}")

    @property
    def rank(self) -> int:
        return len(self.variance)

    def __getitem__(self, idx):
        return self.components[idx]

    def nonzero(self, tol: float = 0.0) -> dict:
        """Map of 1-based index tuples to values with ``|value| > tol``."""
        out = {}
        for idx in zip(*np.nonzero(np.abs(self.components) > tol)):
            out[tuple(int(i) + 1 for i in idx)] = float(self.components[idx])
        return out


RIEMANN_SYMMETRIES = (((1, 0, 2, 3), -1), ((0, 1, 3, 2), -1), ((2, 3, 0, 1), 1))
SYMMETRIC2 = (((1, 0), 1),)


class Signature(NamedTuple):
    positive: int
    negative: int

    @property
    def kind(self) -> str:
        if 0 in self:
            return "riemannian"
        if 1 in self:
            return "lorentzian"
        return "neutral"


def _scale(g):
    return float(np.max(np.abs(g)))


def invert_metric(g) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.shape != (DIM, DIM):
        raise ValueError("metric must be 4x4")
    if not np.allclose(g, g.T, rtol=0, atol=1e-12 * max(_scale(g), 1.0)):
        raise ValueError("metric is not symmetric")
    s = _scale(g)
    det = np.linalg.det(g)
    if s == 0.0 or abs(det) <= 1e-14 * s**4:
        raise DegenerateMetric(f"degenerate metric (det = {det:.3g})")
    inv = np.linalg.inv(g)
    return 0.5 * (inv + inv.T)


def signature_of(g) -> Signature:
    g = np.asarray(g, dtype=float)
    invert_metric(g)  # degeneracy check
    ev = np.linalg.eigvalsh(0.5 * (g + g.T))
    return Signature(int(np.sum(ev > 0)), int(np.sum(ev < 0)))


def raise_lower(t: DenseTensor, slot: int, metric) -> DenseTensor:
    """Raise a lower slot with g^{-1}, or lower an upper slot with g (0-based slot)."""
    if not 0 <= slot < t.rank:
        raise IndexError(f"slot {slot} out of range for rank {t.rank}")
    if isinstance(metric, MetricEval):
        g, ginv = metric.g, metric.g_inv
    else:
        g = np.asarray(metric, dtype=float)
        ginv = invert_metric(g)
    mat = ginv if t.variance[slot] == "d" else g
    comps = np.moveaxis(np.tensordot(mat, t.components, axes=([1], [slot])), 0, slot)
    flipped = "u" if t.variance[slot] == "d" else "d"
    return DenseTensor(comps, t.variance[:slot] + flipped + t.variance[slot + 1:])


def kulkarni_nomizu(h, k) -> np.ndarray:
    """(h ∧ k)_{ijkl} = h_ik k_jl + h_jl k_ik - h_il k_jk - h_jk k_il."""
    h = np.asarray(h, dtype=float)
    k = np.asarray(k, dtype=float)
    return (
        np.einsum("ik,jl->ijkl", h, k)
        + np.einsum("jl,ik->ijkl", h, k)
        - np.einsum("il,jk->ijkl", h, k)
        - np.einsum("jk,il->ijkl", h, k)
    )


def kulkarni_nomizu_jet(h: Jet, k: Jet) -> Jet:
    hk = contract("ik,jl->ijkl", h, k)
    hk2 = contract("il,jk->ijkl", h, k)
    # h_jl k_ik is hk with (i,j),(k,l) swapped pairwise; same for the last term
    return hk + hk.transpose(1, 0, 3, 2) - hk2 - hk2.transpose(1, 0, 3, 2)


def inverse_jet(gjet: Jet) -> Jet:
    """Jet of the inverse matrix field by Newton iteration X <- X (2I - G X)."""
    ginv0 = invert_metric(gjet.coeffs[..., 0])
    x = jet_const(ginv0, gjet.point, gjet.order)
    two_eye = jet_const(2.0 * np.eye(DIM), gjet.point, gjet.order)
    exact = 0
    while exact < gjet.order:
        x = contract("ij,jk->ik", x, two_eye - contract("ij,jk->ik", gjet, x))
        exact = 2 * exact + 1
    return x


class MetricEval:
    """Metric components as order-K jets at a point, with the inverse metric."""

    def __init__(self, gjet: Jet, point=None):
        if gjet.shape != (DIM, DIM):
            raise ValueError("metric jet must have batch shape (4, 4)")
        sym = np.max(np.abs(gjet.coeffs - gjet.coeffs.transpose(1, 0, 2)))
        if sym > 1e-12 * max(np.max(np.abs(gjet.coeffs)), 1.0):
            raise ValueError("metric jet is not symmetric")
        self.jet = gjet
        self.point = tuple(point if point is not None else gjet.point)
        self.order = gjet.order
        self.g = np.array(gjet.coeffs[..., 0])
        self.g_inv = invert_metric(self.g)
        self._inv_jet = None

    @property
    def inv_jet(self) -> Jet:
        if self._inv_jet is None:
            self._inv_jet = inverse_jet(self.jet)
        return self._inv_jet

    def partial(self, alpha) -> np.ndarray:
        """``d^alpha g_ij`` at the point, as a 4x4 array."""
        return np.asarray(extract_partial(self.jet, alpha))

    @property
    def partials(self) -> dict:
        from ._tables import multi_indices

        return {a: self.partial(a) for a in multi_indices(self.order)}

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.g))

    @property
    def signature(self) -> Signature:
        return signature_of(self.g)


ABS_FLOOR = 1e-12


def negligible(residual, scale: float, tol: float, floor: float = ABS_FLOOR) -> bool:
    """True when max|residual| <= tol * scale, or below the absolute floor."""
    r = float(np.max(np.abs(residual))) if np.size(residual) else 0.0
    return r <= max(tol * scale, floor)


def relative(residual, scale: float, floor: float = ABS_FLOOR) -> float:
    """max|residual| / scale, reported as 0 when the residual is below the floor."""
    r = float(np.max(np.abs(residual))) if np.size(residual) else 0.0
    if r <= floor:
        return 0.0
    return r / scale if scale > 0 else float("inf")
