"""Conformal rescalings: factor families, the conformally Einstein residual and obstruction.

Notation: the rescaled metric is gbar = phi^-2 g with phi > 0, and
sigma = -2 log phi.  phi is conformally Einstein for g when

    E = 2 Hes(phi) + phi rho - 1/4 (2 Lap(phi) + phi tau) g

vanishes; a necessary condition is that the tensor
C_ijk = Cotton_ijk + W_ijlk (grad sigma)^l vanishes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jet as J
from .catalog.families import FamilyId, FamilyParams, PARAM_TOL, check_admissible, check_domain, metric_jet
from .curvature import CurvaturePack, curvature_pack
from .errors import FactorNotPositive, IncompatibleFactor
from .jet import Jet, jet_vars
from .tensor import ABS_FLOOR, MetricEval

KINDS = ("A1_q0", "A1_q34", "A2", "A3plus", "A3minus", "exp_affine", "custom")
KIND_FAMILY = {
    "A1_q0": FamilyId.A1,
    "A1_q34": FamilyId.A1,
    "A2": FamilyId.A2,
    "A3plus": FamilyId.A3plus,
    "A3minus": FamilyId.A3minus,
}
BRANCHES = {
    "A2": ("bq>0", "bq<0"),
    "A3plus": ("b-q=0", "b(q-b)>0", "b(q-b)<0"),
    "A3minus": ("b+q=0", "b(q+b)>0", "b(q+b)<0"),
}


def _sign(v: float) -> int:
    return 0 if abs(v) <= PARAM_TOL else (1 if v > 0 else -1)


def branch_for(kind: str, p: FamilyParams) -> str | None:
    """The branch selected by the exact sign conditions on the parameters."""
    if kind == "A2":
        s = _sign(p.b * p.q)
        return None if s == 0 else BRANCHES["A2"][0 if s > 0 else 1]
    if kind in ("A3plus", "A3minus"):
        eps = 1 if kind == "A3plus" else -1
        lin = p.b - eps * p.q  # b-q or b+q
        if _sign(lin) == 0:
            return BRANCHES[kind][0]
        s = _sign(-eps * p.b * lin)  # b(q-b) or b(q+b)
        return BRANCHES[kind][1 if s > 0 else 2]
    return None


def _pair(kind, branch, k1, k2, t, rate):
    """kappa1 * e^{rate t} + kappa2 (times the damping prefactor), or the trig pair."""
    if branch.endswith(">0"):
        return J.exp(t * (-rate / 2)) * (J.exp(t * rate) * k1 + k2)
    return J.cos(t * rate) * k1 + J.sin(t * rate) * k2


def _a3_factor(eps):
    def build(p, k, xs, branch):
        x1, x2, x3, x4 = xs
        if branch == BRANCHES["A3plus" if eps > 0 else "A3minus"][0]:
            return (x4 * k[0] + k[1]) * J.exp(x3)
        r = (p.q - p.b) / p.b if eps > 0 else (p.q + p.b) / p.b  # (q -+ b)/b
        if branch.endswith(">0"):
            rate = math.sqrt(2 * r)
        else:
            rate = math.sqrt(-r / 2)
        return J.exp(x3) * _pair(None, branch, k[0], k[1], x4, rate)
    return build


def _a2_factor(p, k, xs, branch):
    x1, x2, x3, x4 = xs
    r = p.b / p.q
    rate = math.sqrt(2 * r) if branch == "bq>0" else math.sqrt(-r / 2)
    return J.exp(x4) * _pair(None, branch, k[0], k[1], x3, rate)


def _a1_q0(p, k, xs, branch):
    return J.exp(xs[2] * -0.5) * k[0]


def _a1_q34(p, k, xs, branch):
    x1, x2, x3, x4 = xs
    return J.exp(x3) * k[0] + J.exp(x3 * 0.5 - x1) * k[1] + x2 * J.exp(x3 * 0.5 + x1) * k[2]


_BUILDERS = {
    "A1_q0": _a1_q0,
    "A1_q34": _a1_q34,
    "A2": _a2_factor,
    "A3plus": _a3_factor(1),
    "A3minus": _a3_factor(-1),
}


@dataclass(frozen=True)
class ConformalFactor:
    """A positive function phi, evaluated as a jet at a point.

    ``exp_affine`` is kappa1 * exp(w . x); ``custom`` wraps ``func(xs) -> Jet``
    taking the four coordinate jets.
    """

    kind: str
    kappas: tuple = (1.0, 0.0, 0.0)
    branch: str | None = None
    weights: tuple = (0.0, 0.0, 0.0, 0.0)
    func: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown factor kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.kind == "custom" and self.func is None:
            raise ValueError("custom factor needs func")
        if self.branch is not None and self.branch not in BRANCHES.get(self.kind, ()):
            raise ValueError(f"unknown branch {self.branch!r} for kind {self.kind}")
        object.__setattr__(self, "kappas", tuple(float(k) for k in self.kappas) + (0.0,) * (3 - len(self.kappas)))

    @property
    def family(self) -> FamilyId | None:
        return KIND_FAMILY.get(self.kind)

    def check_compatible(self, family, params: FamilyParams) -> None:
        fam = FamilyId.parse(family)
        if self.family is not None and self.family != fam:
            raise IncompatibleFactor(f"factor kind {self.kind} applies to family {self.family.value}, not {fam.value}")
        if self.branch is not None:
            want = branch_for(self.kind, params)
            if want != self.branch:
                raise IncompatibleFactor(
                    f"branch {self.branch} conflicts with parameters (they select {want or 'no branch'})")

    def resolve_branch(self, params: FamilyParams) -> str | None:
        if self.branch is not None:
            return self.branch
        if self.kind in BRANCHES:
            b = branch_for(self.kind, params)
            if b is None:
                raise IncompatibleFactor(f"no {self.kind} branch for these parameters (bq = 0)")
            return b
        return None

    def jet_of(self, params: FamilyParams, xs) -> Jet:
        if self.kind == "custom":
            return self.func(xs)
        if self.kind == "exp_affine":
            lin = sum((x * w for x, w in zip(xs, self.weights)), xs[0] * 0.0)
            return J.exp(lin) * self.kappas[0]
        return _BUILDERS[self.kind](params, self.kappas, xs, self.resolve_branch(params))

    def at(self, params: FamilyParams, x, order: int = 4) -> Jet:
        """phi as a jet at ``x``; raises FactorNotPositive unless phi(x) > 0."""
        phi = self.jet_of(params, jet_vars(tuple(float(v) for v in x), order))
        if not phi.coeffs[0] > 0:
            raise FactorNotPositive(f"factor not positive at {tuple(x)}: phi = {phi.coeffs[0]:.6g}")
        return phi

    def describe(self) -> str:
        parts = [f"kind={self.kind}"] + [f"kappa{i + 1}={k:g}" for i, k in enumerate(self.kappas)]
        if self.branch:
            parts.append(f"branch={self.branch}")
        if self.kind == "exp_affine":
            parts += [f"w{i + 1}={w:g}" for i, w in enumerate(self.weights)]
        return ",".join(parts)


def parse_factor(text: str) -> ConformalFactor:
    """Parse ``kind=A2,kappa1=1,kappa2=0[,kappa3=0][,branch=bq<0][,w1=..]``."""
    from .catalog.families import parse_number

    fields = {}
    for part in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in part:
            raise ValueError(f"malformed factor field {part!r}")
        key, val = part.split("=", 1)
        key = key.strip()
        if key in fields:
            raise ValueError(f"duplicate factor field {key!r}")
        fields[key] = val.strip()
    if "kind" not in fields:
        raise ValueError("factor needs kind=...")
    kind = fields.pop("kind")
    kappas = [1.0, 0.0, 0.0]
    weights = [0.0] * 4
    branch = fields.pop("branch", None)
    for key, val in fields.items():
        if key in ("kappa1", "kappa2", "kappa3"):
            kappas[int(key[-1]) - 1] = parse_number(val)
        elif key in ("w1", "w2", "w3", "w4") and kind == "exp_affine":
            weights[int(key[-1]) - 1] = parse_number(val)
        else:
            raise ValueError(f"unknown factor field {key!r}")
    if kind == "custom":
        raise ValueError("custom factors cannot be given as text; use kind=exp_affine")
    return ConformalFactor(kind, tuple(kappas), branch, tuple(weights))


@dataclass
class FactorDerivs:
    phi: float
    dphi: np.ndarray  # d_i phi
    grad: np.ndarray  # (grad phi)^i
    hess: np.ndarray
    lap: float
    norm2: float  # g(grad phi, grad phi)


def grad_hess_lap(phi: Jet, m: MetricEval, gamma: np.ndarray) -> FactorDerivs:
    """Gradient, Hessian Hes_ij = d_i d_j phi - Gamma^k_ij d_k phi, Laplacian."""
    if phi.order < 2:
        raise ValueError("factor jet needs order >= 2")
    v = float(phi.coeffs[0])
    if not v > 0:
        raise FactorNotPositive(f"factor not positive: phi = {v:.6g}")
    d1 = phi.grad()
    dphi = np.array(d1.coeffs[:, 0])
    dd = np.array(d1.grad().coeffs[..., 0])
    hess = dd - np.einsum("kij,k->ij", gamma, dphi)
    hess = 0.5 * (hess + hess.T)
    grad = m.g_inv @ dphi
    return FactorDerivs(v, dphi, grad, hess, float(np.einsum("ij,ij->", m.g_inv, hess)), float(dphi @ grad))


def ce_residual(phi: Jet, m: MetricEval, pack: CurvaturePack) -> tuple[np.ndarray, float]:
    """(E, scale) with scale the largest constituent term."""
    d = grad_hess_lap(phi, m, pack.Gamma)
    t1 = 2 * d.hess
    t2 = d.phi * pack.Ricci
    t3 = 0.25 * (2 * d.lap + d.phi * pack.tau) * m.g
    scale = max(np.max(np.abs(t1)), np.max(np.abs(t2)), np.max(np.abs(t3)))
    return t1 + t2 - t3, float(scale)


def ce_obstruction(phi: Jet, m: MetricEval, pack: CurvaturePack) -> tuple[np.ndarray, float]:
    """(C, scale) for C_ijk = Cotton_ijk + W_ijlk (grad sigma)^l, sigma = -2 log phi."""
    d = grad_hess_lap(phi, m, pack.Gamma)
    cot = pack.require("Cotton")
    grad_sigma = -2.0 * d.grad / d.phi
    wt = np.einsum("ijlk,l->ijk", pack.Weyl, grad_sigma)
    scale = max(np.max(np.abs(cot)), np.max(np.abs(wt)))
    return cot + wt, float(scale)


def rescale_jet(gjet: Jet, phi: Jet) -> Jet:
    if phi.order < gjet.order:
        gjet = gjet.truncate(phi.order)
    return gjet * (phi * phi).reciprocal()


def rescale_metric(factor: ConformalFactor, family, params: FamilyParams, x, order: int = 4) -> MetricEval:
    """MetricEval of gbar = phi^-2 g at ``x``."""
    check_admissible(family, params)
    x = tuple(float(v) for v in x)
    check_domain(family, x)
    factor.check_compatible(family, params)
    xs = jet_vars(x, order)
    phi = factor.at(params, x, order)
    return MetricEval(rescale_jet(metric_jet(family, params, xs), phi), x)


def conformal_ricci_law(phi: Jet, m: MetricEval, gamma: np.ndarray) -> np.ndarray:
    """Predicted rho(gbar) - rho(g) for gbar = phi^-2 g in dimension 4."""
    d = grad_hess_lap(phi, m, gamma)
    return (2 * d.phi * d.hess + (d.phi * d.lap - 3 * d.norm2) * m.g) / d.phi**2


def conformal_ricci_check(factor: ConformalFactor, family, params: FamilyParams, points, tol: float = 1e-8) -> dict:
    """Evaluate rho(phi^-2 g) at each point where phi > 0.

    A point passes when max |rho(gbar)| <= tol * scale (or <= 1e-12), where
    scale is the largest term in rho(g) + (conformal correction).
    """
    check_admissible(family, params)
    factor.check_compatible(family, params)
    worst_abs = 0.0
    worst_rel = 0.0
    used, skipped = [], []
    for x in points:
        x = tuple(float(v) for v in x)
        check_domain(family, x)
        xs = jet_vars(x, 2)
        phi = factor.jet_of(params, xs)
        if not phi.coeffs[0] > 0:
            skipped.append(x)
            continue
        m = MetricEval(metric_jet(family, params, xs), x)
        pack = curvature_pack(m, upto="weyl")
        mbar = MetricEval(rescale_jet(m.jet, phi), x)
        rho_bar = curvature_pack(mbar, upto="weyl").Ricci
        d = grad_hess_lap(phi, m, pack.Gamma)
        scale = max(np.max(np.abs(pack.Ricci)), np.max(np.abs(2 * d.hess / d.phi)),
                    np.max(np.abs((d.phi * d.lap - 3 * d.norm2) * m.g)) / d.phi**2)
        a = float(np.max(np.abs(rho_bar)))
        worst_abs = max(worst_abs, a)
        worst_rel = max(worst_rel, a / scale if scale > 0 else 0.0)
        used.append(x)
    if not used:
        raise FactorNotPositive("factor not positive at any sample point")
    ok = worst_abs <= ABS_FLOOR or worst_rel <= tol
    return {"pass": bool(ok), "max_abs_ricci": worst_abs, "max_rel_ricci": worst_rel,
            "points_used": len(used), "points_skipped": len(skipped), "factor": factor.describe()}
