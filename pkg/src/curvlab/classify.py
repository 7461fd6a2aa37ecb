"""Pointwise classification predicates and the theorem-regression sweep.

The catalog metrics are homogeneous, so every flag is evaluated at a handful
of sample points and must come out the same at each of them; a disagreement
between points is an internal error rather than geometry.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .catalog.families import (
    EPSILON, FAMILIES, FamilyId, FamilyParams, PARAM_NAMES, check_admissible, is_zero, metric_at,
    parse_number, sample_points,
)
from .curvature import curvature_pack
from .errors import ConstraintViolated, CurvlabError
from .rng import SplitMix64
from .tensor import negligible, relative

FLAGS = (
    "einstein",
    "ricci_flat",
    "constant_curvature",
    "conformally_flat",
    "bach_flat",
    "locally_symmetric",
    "jacobi_two_step_nilpotent",
    "conformal_jacobi_two_step_nilpotent",
    "weakly_generic",
)
DEFAULT_TOL = 1e-8
K_TOL = 1e-8
# Defaults for parameters a sweep grid leaves out.
GRID_DEFAULTS = {"a": 1.0, "b": 1.0, "c": 0.0, "q": 1.0, "alpha": 1.0}


class InconsistentVerdict(CurvlabError):
    """Flags differ between sample points of a homogeneous metric."""


@dataclass
class Verdict:
    flags: dict  # flag -> bool, or None for "no claim"
    K: float | None = None
    evidence: dict = field(default_factory=dict)  # flag -> relative residual
    nilpotency: dict = field(default_factory=dict)  # "jacobi"/"conformal_jacobi" -> index or None

    def __getitem__(self, name):
        return self.flags[name]

    def implications_hold(self) -> bool:
        f = self.flags
        if f["constant_curvature"] and not f["einstein"]:
            return False
        if (f["einstein"] or f["conformally_flat"]) and not f["bach_flat"]:
            return False
        return True


def _nilpotent(ops, ref: float, tol: float) -> tuple[bool, float]:
    """Two-step nilpotency of the family of operators ``ops`` (J != 0, J^2 = 0)."""
    worst = 0.0
    biggest = 0.0
    for j in ops:
        n = float(np.max(np.abs(j)))
        biggest = max(biggest, n)
        if n > 0:
            worst = max(worst, float(np.max(np.abs(j @ j))) / n**2)
    nonzero = biggest > tol * ref
    return bool(nonzero and worst <= tol), worst if nonzero else float("inf")


def nilpotency_index(ops, ref: float, tol: float, max_index: int = 4) -> int | None:
    """Smallest k with J^k = 0 for every J in ``ops`` (1 if all vanish), None if none <= max_index."""
    if all(float(np.max(np.abs(j))) <= tol * ref for j in ops):
        return 1
    for k in range(2, max_index + 1):
        if all(float(np.max(np.abs(np.linalg.matrix_power(j, k)))) <= tol * max(float(np.max(np.abs(j))), 1e-300) ** k
               for j in ops):
            return k
    return None


def _test_vectors(n: int = 6) -> list[np.ndarray]:
    rng = SplitMix64(0x5EED)
    return [np.array([rng.uniform(-1.0, 1.0) for _ in range(4)]) for _ in range(n)]


def classify_point(family, params: FamilyParams, x, tol: float = DEFAULT_TOL) -> Verdict:
    """Evaluate every flag at one point; each is true iff its residual <= tol * scale."""
    m = metric_at(family, params, x, order=4)
    p = curvature_pack(m)
    g, gi = m.g, m.g_inv
    rs = p.scales["riemann"]
    flags, ev = {}, {}

    einst = p.Ricci - p.tau / 4 * g
    flags["einstein"] = negligible(einst, rs, tol)
    ev["einstein"] = relative(einst, rs)
    flags["ricci_flat"] = negligible(p.Ricci, rs, tol)
    ev["ricci_flat"] = relative(p.Ricci, rs)

    G = np.einsum("ik,jl->ijkl", g, g) - np.einsum("il,jk->ijkl", g, g)
    K = float(np.sum(p.Riemann * G) / np.sum(G * G))
    cc = p.Riemann - K * G
    flags["constant_curvature"] = negligible(cc, rs, tol)
    ev["constant_curvature"] = relative(cc, rs)

    flags["conformally_flat"] = negligible(p.Weyl, rs, tol)
    ev["conformally_flat"] = relative(p.Weyl, rs)
    flags["bach_flat"] = negligible(p.Bach, p.scales["bach"], tol)
    ev["bach_flat"] = relative(p.Bach, p.scales["bach"])
    flags["locally_symmetric"] = negligible(p.NablaR, p.scales["nabla_riemann"], tol)
    ev["locally_symmetric"] = relative(p.NablaR, p.scales["nabla_riemann"])

    vs = _test_vectors()
    ref = rs * float(np.max(np.abs(gi)))
    flags["jacobi_two_step_nilpotent"], ev["jacobi_two_step_nilpotent"] = _nilpotent(
        [p.jacobi(v) for v in vs], ref, tol)
    flags["conformal_jacobi_two_step_nilpotent"], ev["conformal_jacobi_two_step_nilpotent"] = _nilpotent(
        [p.conformal_jacobi(v) for v in vs], ref, tol)

    nil = {"jacobi": nilpotency_index([p.jacobi(v) for v in vs], ref, tol),
           "conformal_jacobi": nilpotency_index([p.conformal_jacobi(v) for v in vs], ref, tol)}

    sv = np.linalg.svd(p.Weyl.reshape(64, 4), compute_uv=False)
    ratio = float(sv[-1] / sv[0]) if sv[0] > tol * rs else 0.0
    flags["weakly_generic"] = ratio > tol
    ev["weakly_generic"] = ratio

    return Verdict(flags, K if flags["constant_curvature"] else None, ev, nil)


def classify_case(family, params: FamilyParams, points, tol: float = DEFAULT_TOL) -> Verdict:
    """Classify at several points and require the flags to agree."""
    verdicts = [classify_point(family, params, x, tol) for x in points]
    first = verdicts[0]
    for v in verdicts[1:]:
        diff = [k for k in FLAGS if v.flags[k] != first.flags[k]]
        diff += [k for k in first.nilpotency if v.nilpotency[k] != first.nilpotency[k]]
        if diff:
            raise InconsistentVerdict(f"flags {diff} differ between sample points")
    ev = {k: max(v.evidence[k] for v in verdicts) for k in FLAGS}
    K = None
    if first.flags["constant_curvature"]:
        K = float(np.mean([v.K for v in verdicts]))
    return Verdict(dict(first.flags), K, ev, dict(first.nilpotency))


def expected_verdict(family, p: FamilyParams) -> Verdict:
    """The flags the classification theorems assert for these parameters.

    ``None`` marks flags on which the theory makes no claim for this family.
    """
    fam = FamilyId.parse(family)
    check_admissible(fam, p)
    z = is_zero
    a, b, c, q, al = p.a, p.b, p.c, p.q, p.alpha
    f = dict.fromkeys(FLAGS, False)
    K = None
    if fam is FamilyId.A1:
        f["conformally_flat"] = f["locally_symmetric"] = z(b)
        f["bach_flat"] = z(b) or z(q) or z(q + 0.75 * a)
        f["conformal_jacobi_two_step_nilpotent"] = (z(q) or z(q + 0.75 * a)) and not z(b)
    elif fam is FamilyId.A2:
        f["einstein"] = z(b) or z(al - 2 / 3)
        f["ricci_flat"] = z(b) and z(al)
        f["constant_curvature"] = f["locally_symmetric"] = z(b)
        f["conformally_flat"] = z(b) or z(al - 2)
        f["bach_flat"] = z(b) or any(z(al - t) for t in (2 / 3, 1.0, 2.0))
        if z(b):
            K = -al * al / q
    elif fam in (FamilyId.A3plus, FamilyId.A3minus):
        eps = EPSILON[fam]
        special = z(b + eps * q)
        for k in ("einstein", "constant_curvature", "conformally_flat", "locally_symmetric"):
            f[k] = special
        f["bach_flat"] = True
        if special:
            K = eps / q
    elif fam in (FamilyId.A4, FamilyId.B2):
        for k in ("einstein", "constant_curvature", "conformally_flat", "bach_flat", "locally_symmetric"):
            f[k] = z(b)
        f["weakly_generic"] = False if z(b) else None
        if z(b):
            K = -1 / a
    elif fam is FamilyId.A5:
        for k in ("einstein", "constant_curvature", "conformally_flat", "bach_flat", "locally_symmetric"):
            f[k] = True
        K = -4 / a
    elif fam is FamilyId.B1:
        ein = z(c * c - b * q)
        f["einstein"] = f["locally_symmetric"] = ein
        f["ricci_flat"] = z(q) and z(c)
        f["constant_curvature"] = f["conformally_flat"] = z(q) and z(b) and z(c)
        f["bach_flat"] = z(q) or ein
        f["jacobi_two_step_nilpotent"] = z(q) and z(c) and not z(b)
        # With q = 0 != c the conformal Jacobi operators are nilpotent of
        # index three, not two; no two-step claim is made there.
        f["conformal_jacobi_two_step_nilpotent"] = (z(q) and z(c) and not z(b)) if z(c) or not z(q) else None
        if z(q):
            f["weakly_generic"] = not z(c)
        else:
            f["weakly_generic"] = None
        if f["constant_curvature"]:
            K = 0.0
    elif fam is FamilyId.B3:
        for k in ("ricci_flat", "einstein", "bach_flat", "locally_symmetric"):
            f[k] = True
        f["constant_curvature"] = f["conformally_flat"] = z(b)
        f["jacobi_two_step_nilpotent"] = f["conformal_jacobi_two_step_nilpotent"] = not z(b)
        if z(b):
            K = 0.0
    return Verdict(f, K)


def compare(computed: Verdict, expected: Verdict) -> list[str]:
    """Names of flags where a claimed value disagrees with the computed one."""
    bad = [k for k in FLAGS if expected.flags[k] is not None and expected.flags[k] != computed.flags[k]]
    if expected.K is not None and computed.K is not None:
        if abs(computed.K - expected.K) > K_TOL * max(1.0, abs(expected.K)):
            bad.append("K")
    return bad


@dataclass
class SweepSpec:
    family: FamilyId
    grid: dict  # param -> list of floats, in PARAM_NAMES order
    points: int = 3
    seed: int = 0
    tol: float = DEFAULT_TOL

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        if not isinstance(d, dict):
            raise ValueError("sweep spec must be a JSON object")
        unknown = set(d) - {"family", "grid", "points", "seed", "tol"}
        if unknown:
            raise ValueError(f"unknown sweep spec keys {sorted(unknown)}")
        if "family" not in d:
            raise ValueError("sweep spec needs 'family'")
        fam = FamilyId.parse(d["family"])
        grid = d.get("grid", {})
        if not isinstance(grid, dict):
            raise ValueError("'grid' must map parameter names to value lists")
        spec = FAMILIES[fam]
        out = {}
        for name in PARAM_NAMES:
            if name not in grid:
                continue
            vals = grid[name]
            if name not in spec.uses:
                raise ValueError(f"family {fam.value} does not use parameter {name!r}")
            if not isinstance(vals, list):
                raise ValueError(f"grid values for {name!r} must be a list")
            out[name] = [parse_number(v) for v in vals]
        extra = set(grid) - set(PARAM_NAMES)
        if extra:
            raise ValueError(f"unknown grid parameters {sorted(extra)}")
        points = d.get("points", 3)
        seed = d.get("seed", 0)
        tol = d.get("tol", DEFAULT_TOL)
        if not isinstance(points, int) or isinstance(points, bool) or points < 1:
            raise ValueError("'points' must be a positive integer")
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise ValueError("'seed' must be a non-negative integer")
        if not isinstance(tol, (int, float)) or isinstance(tol, bool) or not tol > 0:
            raise ValueError("'tol' must be a positive number")
        return cls(fam, out, points, seed, float(tol))

    def cases(self) -> list[FamilyParams]:
        """Grid cases in grid order (last listed parameter varies fastest)."""
        if any(len(v) == 0 for v in self.grid.values()):
            return []
        uses = FAMILIES[self.family].uses
        names = list(self.grid)
        base = {k: GRID_DEFAULTS[k] for k in uses if k not in self.grid}
        return [FamilyParams(**base, **dict(zip(names, combo)))
                for combo in itertools.product(*(self.grid[n] for n in names))]


def sweep(spec: SweepSpec) -> list[dict]:
    """One row per grid case; errors are recorded per row and the sweep continues."""
    rows = []
    points = sample_points(spec.family, spec.points, spec.seed)
    for params in spec.cases():
        row = {"family": spec.family.value, "params": {k: getattr(params, k) for k in FAMILIES[spec.family].uses}}
        try:
            expected = expected_verdict(spec.family, params)
            computed = classify_case(spec.family, params, points, spec.tol)
        except ConstraintViolated as exc:
            row.update(status="inadmissible", error=str(exc))
            rows.append(row)
            continue
        except CurvlabError as exc:
            row.update(status="error", error=f"{type(exc).__name__}: {exc}")
            rows.append(row)
            continue
        bad = compare(computed, expected)
        if not computed.implications_hold():
            bad.append("implications")
        row.update(
            status="agree" if not bad else "disagree",
            computed=computed.flags, expected=expected.flags,
            K=computed.K, K_expected=expected.K,
            disagreements=bad, evidence=computed.evidence,
        )
        rows.append(row)
    return rows
