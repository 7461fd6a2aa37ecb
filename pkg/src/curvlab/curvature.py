"""Curvature of a coordinate metric at a point, from jets of the metric.

Every field is carried as a truncated Taylor jet, so a covariant derivative is
a jet derivative plus Christoffel terms and costs one order.  With metric
jets of order K: Gamma has order K-1; R, Ricci, Schouten, W order K-2; Cotton
and nabla R order K-3; nabla Cotton (hence Bach) order K-4.

Conventions.  The curvature operator is R(X,Y) = nabla_[X,Y] - [nabla_X, nabla_Y],
the negative of the usual one.  Components are R_ijkl = g(R(d_i, d_j) d_k, d_l),
so a space of constant sectional curvature K has
R_ijkl = K (g_ik g_jl - g_il g_jk).  Ricci is rho_ij = trace(Z -> R(d_i, Z) d_j)
= g^{lm} R_iljm, the Ricci operator is Ric^i_j = g^{ik} rho_kj, Schouten is
rho - tau/6 g and W = R - 1/2 (Schouten ∧ g).  These choices reproduce the
catalog's closed-form tables (pinned by the A.2 tables in the test suite).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import OrderExceeded
from .jet import Jet, contract
from .tensor import MetricEval, kulkarni_nomizu_jet

# Sign relating the curvature operator used here to the common
# nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y].
RIEMANN_SIGN = -1
# J(x)y = JACOBI_SIGN * R(y, x)x; chosen so unit spacelike x has the
# eigenvalues eps_x q/a^2, eps_x q/(4a^2) on the B.1 Einstein family.
JACOBI_SIGN = -1

MIN_ORDER = {
    "christoffel": 1,
    "riemann": 2,
    "ricci": 2,
    "schouten": 2,
    "weyl": 2,
    "cotton": 3,
    "nabla_riemann": 3,
    "bach": 4,
}


def require_order(m_or_jet, what: str) -> None:
    need = MIN_ORDER[what]
    order = m_or_jet.order
    if order < need:
        raise OrderExceeded(f"insufficient jet order: {what} needs K >= {need}, have K = {order}")


def christoffel(m: MetricEval) -> Jet:
    """Gamma^k_ij as a jet with axes (k, i, j)."""
    require_order(m, "christoffel")
    dg = m.jet.grad()  # (l, i, j) = d_l g_ij
    a = dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0)  # (i, j, l)
    return contract("kl,ijl->kij", m.inv_jet, a) * 0.5


def riemann(m: MetricEval, gamma: Jet) -> tuple[Jet, Jet]:
    """Return (R_ijkl, Rm) where Rm[i,j,k,l] is the common R^l_ijk."""
    require_order(m, "riemann")
    order = m.order - 2
    dG = gamma.grad()  # (i, l, j, k) = d_i Gamma^l_jk
    G = gamma.truncate(order)
    q = contract("lim,mjk->ijkl", G, G)
    rm = dG.transpose(0, 2, 3, 1) - dG.transpose(2, 0, 3, 1) + q - q.transpose(1, 0, 2, 3)
    r = contract("ijkm,ml->ijkl", rm, m.jet) * RIEMANN_SIGN
    return r, rm


def ricci_scalar(r: Jet, m: MetricEval) -> tuple[Jet, Jet, Jet]:
    """(rho_ij, Ric^i_j, tau)."""
    rho = contract("lm,iljm->ij", m.inv_jet, r)
    ric_op = contract("ik,kj->ij", m.inv_jet, rho)
    tau = contract("ij,ij->", m.inv_jet, rho)
    return rho, ric_op, tau


def schouten(rho: Jet, tau: Jet, m: MetricEval) -> Jet:
    return rho - tau * m.jet * (1.0 / 6.0)


def weyl(r: Jet, s: Jet, m: MetricEval) -> Jet:
    return r - kulkarni_nomizu_jet(s, m.jet) * 0.5


def _nabla(t: Jet, gamma: Jet) -> Jet:
    """Covariant derivative of a covariant tensor jet; new axis first."""
    rank = len(t.shape)
    order = t.order - 1
    dt = t.grad()
    G = gamma.truncate(order)
    tt = t.truncate(order)
    idx = "abcdefgh"[:rank]
    out = dt
    for slot in range(rank):
        src = idx[:slot] + "p" + idx[slot + 1:]
        out = out - contract(f"pz{idx[slot]},{src}->z{idx}", G, tt)
    return out


def cotton(s: Jet, gamma: Jet) -> Jet:
    """C_ijk = (nabla_i S)_jk - (nabla_j S)_ik."""
    if s.order < 1:
        raise OrderExceeded("insufficient jet order: cotton needs K >= 3")
    ns = _nabla(s, gamma)
    return ns - ns.transpose(1, 0, 2)


def nabla_riemann(r: Jet, gamma: Jet) -> Jet:
    """(nabla_m R)_ijkl with axes (m, i, j, k, l)."""
    if r.order < 1:
        raise OrderExceeded("insufficient jet order: nabla_riemann needs K >= 3")
    return _nabla(r, gamma)


def bach(c: Jet, gamma: Jet, w: np.ndarray, rho: np.ndarray, g_inv: np.ndarray, s: Jet | None = None):
    """Bach tensor values and the magnitude of its two constituent terms.

    B_ij = 1/2 { g^{ka} (nabla_a C)_kij + rho_kl g^{ka} g^{lb} W_iajb }.
    """
    if c.order < 1:
        raise OrderExceeded("insufficient jet order: bach needs K >= 4")
    nc = _nabla(c, gamma).truncate(0).coeffs[..., 0]  # (a, k, i, j)
    t1 = np.einsum("ka,akij->ij", g_inv, nc)
    rho_up = g_inv @ rho @ g_inv
    t2 = np.einsum("ab,iajb->ij", rho_up, w)
    # Scale from absolute-value contractions: both terms can vanish separately.
    scale = max(np.max(np.einsum("ka,akij->ij", np.abs(g_inv), np.abs(nc))),
                np.max(np.einsum("ab,iajb->ij", np.abs(rho_up), np.abs(w))))
    if s is not None:
        # The Cotton tensor is itself a difference, so also weigh second derivatives of S.
        mx = lambda a: float(np.max(np.abs(a)))
        ds = s.grad()
        dds, ds0, s0 = ds.grad().truncate(0).coeffs, ds.truncate(0).coeffs, s.truncate(0).coeffs
        g0, dg0 = gamma.truncate(0).coeffs, gamma.grad().truncate(0).coeffs
        raw = max(mx(dds), mx(g0) * mx(ds0), mx(dg0) * mx(s0), mx(g0) ** 2 * mx(s0))
        scale = max(scale, mx(g_inv) * raw)
    return 0.5 * (t1 + t2), scale


def jacobi_operator(r: np.ndarray, g_inv: np.ndarray, x) -> np.ndarray:
    """Matrix J with (J y)^l = J[l, i] y^i for J(x)y = R(y, x)x (see JACOBI_SIGN).

    Pass the Weyl tensor for the conformal Jacobi operator J_W.
    """
    x = np.asarray(x, dtype=float)
    return JACOBI_SIGN * np.einsum("j,k,lm,ijkm->li", x, x, g_inv, r)


def _val(j: Jet | None):
    if j is None:
        return None
    return np.array(j.truncate(0).coeffs[..., 0])


@dataclass
class CurvaturePack:
    """All curvature data at one point; arrays use 0-based axes, lower indices unless noted."""

    metric: MetricEval
    Gamma: np.ndarray  # Gamma[k, i, j] = Gamma^k_ij
    Riemann: np.ndarray
    Ricci: np.ndarray
    RicciOp: np.ndarray  # RicciOp[i, j] = Ric^i_j
    tau: float
    Schouten: np.ndarray
    Weyl: np.ndarray
    Cotton: np.ndarray | None = None
    Bach: np.ndarray | None = None
    NablaR: np.ndarray | None = None
    scales: dict = field(default_factory=dict)
    jets: dict = field(default_factory=dict, repr=False)

    def require(self, name: str) -> np.ndarray:
        val = getattr(self, name)
        if val is None:
            key = {"Cotton": "cotton", "Bach": "bach", "NablaR": "nabla_riemann"}[name]
            raise OrderExceeded(
                f"insufficient jet order: {key} needs K >= {MIN_ORDER[key]}, have K = {self.metric.order}")
        return val

    def jacobi(self, x) -> np.ndarray:
        return jacobi_operator(self.Riemann, self.metric.g_inv, x)

    def conformal_jacobi(self, x) -> np.ndarray:
        return jacobi_operator(self.Weyl, self.metric.g_inv, x)

    @property
    def weyl_up(self) -> np.ndarray:
        """W^i_jkl."""
        return np.einsum("im,mjkl->ijkl", self.metric.g_inv, self.Weyl)


def curvature_pack(m: MetricEval, nabla_r: bool = True, upto: str = "bach") -> CurvaturePack:
    """Run the full pipeline; order-limited pieces are None when K is too small.

    ``upto`` ("weyl", "cotton" or "bach") stops early even if K allows more.
    """
    depth = {"weyl": 0, "cotton": 1, "bach": 2}[upto]
    require_order(m, "riemann")
    gamma = christoffel(m)
    r, _ = riemann(m, gamma)
    rho, ric_op, tau = ricci_scalar(r, m)
    s = schouten(rho, tau, m)
    w = weyl(r, s, m)

    g_inv = m.g_inv
    vals = {k: _val(v) for k, v in dict(gamma=gamma, r=r, rho=rho, ric_op=ric_op, s=s, w=w).items()}
    # Residual scales are the sizes of the terms that cancel, not of the result.
    dG = gamma.grad().truncate(0).coeffs[..., 0]
    r_scale = float(max(np.max(np.abs(dG)), np.max(np.abs(vals["gamma"])) ** 2) * np.max(np.abs(m.g)))
    r_scale *= max(1.0, float(np.max(np.abs(g_inv))) * float(np.max(np.abs(m.g))))
    scales = {"riemann": r_scale, "ricci": r_scale, "weyl": r_scale}
    pack = CurvaturePack(
        metric=m, Gamma=vals["gamma"], Riemann=vals["r"], Ricci=vals["rho"],
        RicciOp=vals["ric_op"], tau=float(_val(tau)), Schouten=vals["s"], Weyl=vals["w"],
        scales=scales, jets=dict(gamma=gamma, r=r, rho=rho, s=s, w=w, tau=tau),
    )
    if m.order >= MIN_ORDER["cotton"] and depth >= 1:
        c = cotton(s, gamma)
        pack.Cotton = _val(c)
        pack.jets["cotton"] = c
        ds = s.grad().truncate(0).coeffs[..., 0]
        pack.scales["cotton"] = float(max(np.max(np.abs(ds)), np.max(np.abs(vals["gamma"]))
                                          * np.max(np.abs(vals["s"]))))
        if nabla_r:
            nr = nabla_riemann(r, gamma)
            pack.NablaR = _val(nr)
            dr = r.grad().truncate(0).coeffs[..., 0]
            pack.scales["nabla_riemann"] = float(max(
                np.max(np.abs(dr)), np.max(np.abs(vals["gamma"])) * np.max(np.abs(vals["r"]))))
    if m.order >= MIN_ORDER["bach"] and depth >= 2:
        b, bscale = bach(pack.jets["cotton"], gamma, vals["w"], vals["rho"], g_inv, s)
        pack.Bach = b
        pack.scales["bach"] = float(bscale)
    return pack
