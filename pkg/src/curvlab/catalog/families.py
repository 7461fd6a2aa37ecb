"""The nine metric charts (eight families, A.3 in two charts) as jet-evaluable metrics."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from enum import Enum
from fractions import Fraction
from typing import Callable

import numpy as np

from .. import jet as J
from ..errors import ConstraintViolated, DomainViolation
from ..jet import Jet, jet_vars
from ..rng import SplitMix64
from ..tensor import MetricEval

PARAM_TOL = 1e-12


class FamilyId(str, Enum):
    A1 = "A1"
    A2 = "A2"
    A3plus = "A3plus"
    A3minus = "A3minus"
    A4 = "A4"
    A5 = "A5"
    B1 = "B1"
    B2 = "B2"
    B3 = "B3"

    @classmethod
    def parse(cls, name) -> "FamilyId":
        if isinstance(name, cls):
            return name
        key = str(name).replace(".", "").replace("+", "plus").replace("-", "minus")
        for f in cls:
            if f.value.lower() == key.lower():
                return f
        raise ValueError(f"unknown family {name!r}; expected one of {[f.value for f in cls]}")


@dataclass(frozen=True)
class FamilyParams:
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    q: float = 0.0
    alpha: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)


PARAM_NAMES = tuple(f.name for f in fields(FamilyParams))


def parse_number(text) -> float:
    """Reals given as decimals or exact ratios such as ``-3/4``."""
    if isinstance(text, (int, float)):
        return float(text)
    return float(Fraction(str(text).strip()))


def parse_params(text: str | dict, family: FamilyId | str | None = None) -> FamilyParams:
    """Parse ``a=1,b=1,c=0,q=1,alpha=1``; unknown keys are rejected."""
    if isinstance(text, dict):
        items = list(text.items())
    else:
        items = []
        for part in filter(None, (p.strip() for p in text.split(","))):
            if "=" not in part:
                raise ValueError(f"malformed parameter {part!r}; expected key=value")
            k, v = part.split("=", 1)
            items.append((k.strip(), v))
    values = {}
    for k, v in items:
        if k not in PARAM_NAMES:
            raise ValueError(f"unknown parameter {k!r}; expected a subset of {PARAM_NAMES}")
        if k in values:
            raise ValueError(f"duplicate parameter {k!r}")
        values[k] = parse_number(v)
    if family is not None:
        spec = FAMILIES[FamilyId.parse(family)]
        extra = [k for k, v in values.items() if k not in spec.uses and v != 0.0]
        if extra:
            raise ValueError(f"family {spec.id.value} does not use parameter(s) {extra}")
    return FamilyParams(**values)


def is_zero(x: float) -> bool:
    return abs(x) <= PARAM_TOL


# -- metric displays ---------------------------------------------------------
# Each builder returns the classical (unsymmetrised) display: a list of
# ((i, j), coefficient) for the term coefficient * dx_i dx_j, 1-based.

def _a1(p, x1, x2, x3, x4):
    a, b, c, q = p.a, p.b, p.c, p.q
    return [
        ((1, 1), 4 * b * x2 * x2 + a),
        ((1, 2), 4 * b * x2),
        ((1, 3), -(4 * a * x2 * x4 - 4 * c * x2 + a)),
        ((1, 4), 4 * a * x2),
        ((2, 2), b),
        ((2, 3), -2 * (a * x4 - c)),
        ((2, 4), 2 * a),
        ((3, 3), q),
    ]


def _a2(p, x1, x2, x3, x4):
    a, b, c, q, al = p.a, p.b, p.c, p.q, p.alpha
    e2a = J.exp(2 * al * x4)
    return [
        ((1, 3), -2 * a * e2a),
        ((2, 2), a * e2a),
        ((3, 3), b * J.exp(2 * (al - 1) * x4)),
        ((3, 4), 2 * c * J.exp((al - 1) * x4)),
        ((4, 4), q),
    ]


def _a3(warp):
    def build(p, x1, x2, x3, x4):
        a, b, c, q = p.a, p.b, p.c, p.q
        e = J.exp(2 * x3)
        w = warp(x4)
        return [
            ((1, 4), 2 * a * e),
            ((2, 2), a * e * w * w),
            ((3, 3), b),
            ((3, 4), 2 * c),
            ((4, 4), q),
        ]
    return build


def _a4(p, x1, x2, x3, x4):
    a, b = p.a, p.b
    return [
        ((1, 1), a / 2 * x4 * x4 + 4 * b * x2 * x2 + a),
        ((1, 2), 4 * b * x2),
        ((1, 3), a * x2 * (4 + x4 * x4)),
        ((1, 4), a * (1 + 2 * x2 * x3) * x4),
        ((2, 2), b),
        ((2, 3), a / 2 * (4 + x4 * x4)),
        ((2, 4), a * x3 * x4),
        ((4, 4), a / 2),
    ]


def _a5(p, x1, x2, x3, x4):
    a = p.a
    inv = 1.0 / x2
    return [
        ((1, 2), -a / 4 * x4 * inv),
        ((1, 4), a / 4),
        ((2, 2), a / 8 * (2 + 2 * x1 * x4 + x3 * x3) * inv * inv),
        ((2, 3), -a / 4 * x3 * inv),
        ((2, 4), -a / 4 * x1 * inv),
        ((3, 3), a / 8),
    ]


def _b1(p, x1, x2, x3, x4):
    a, b, c, q = p.a, p.b, p.c, p.q
    return [
        ((1, 1), q * (x3 * x3 + 4 * x2 * x3 * x4 + 4 * x2 * x2 * x4 * x4)
         + 4 * c * x2 * x3 + 8 * c * x2 * x2 * x4 + 2 * a * x3 + 4 * b * x2 * x2),
        ((1, 2), 2 * (q * (x3 * x4 + 2 * x2 * x4 * x4) + 4 * c * x2 * x4 + c * x3 + 2 * b * x2)),
        ((1, 3), 2 * (q * (x3 + 2 * x2 * x4) + 2 * c * x2 + a)),
        ((1, 4), 4 * a * x2),
        ((2, 2), q * x4 * x4 + 2 * c * x4 + b),
        ((2, 3), 2 * (q * x4 + c)),
        ((2, 4), 2 * a),
        ((3, 3), q),
    ]


def _b2(p, x1, x2, x3, x4):
    a, b = p.a, p.b
    return [
        ((1, 1), a - a / 2 * x4 * x4 + 4 * b * x2 * x2),
        ((1, 2), 4 * b * x2),
        ((1, 3), -a * x2 * (x4 * x4 - 4)),
        ((1, 4), -a * (1 + 2 * x2 * x3) * x4),
        ((2, 2), b),
        ((2, 3), -a / 2 * (x4 * x4 - 4)),
        ((2, 4), -a * x3 * x4),
        ((4, 4), -a / 2),
    ]


def _b3(p, x1, x2, x3, x4):
    a, b = p.a, p.b
    em = J.exp(-x2)
    return [
        ((1, 2), -2 * a * em * x3),
        ((1, 3), 2 * a * em),
        ((2, 2), 2 * (2 * b * x3 * x3 - a * x4)),
        ((2, 3), -4 * b * x3),
        ((2, 4), 2 * a),
        ((3, 3), b),
    ]


# -- per-family records --------------------------------------------------------

@dataclass(frozen=True)
class FamilySpec:
    id: FamilyId
    uses: tuple[str, ...]
    clause: str
    admissible: Callable[[FamilyParams], float]  # must be non-zero
    display: Callable
    det: Callable  # (params, point) -> closed-form det(g)
    lorentzian: Callable[[FamilyParams], bool]
    sample_box: dict  # coordinate index (0-based) -> transform of u in [-1, 1]
    domain: Callable[[tuple], str | None]  # violated restriction, or None


def _no_domain(x):
    return None


def _a3plus_domain(x):
    return "cos(x4) != 0" if abs(math.cos(x[3])) < 1e-12 else None


def _a5_domain(x):
    return "x2 != 0" if abs(x[1]) < 1e-12 else None


def _b2_domain(x):
    return "x4 != +-2" if abs(abs(x[3]) - 2.0) < 1e-12 else None


def _away_from_zero(u):
    # |x2| >= 0.3
    return math.copysign(0.3 + 0.7 * abs(u), u if u != 0 else 1.0)


FAMILIES: dict[FamilyId, FamilySpec] = {
    FamilyId.A1: FamilySpec(
        FamilyId.A1, ("a", "b", "c", "q"), "a(a-4q) != 0",
        lambda p: p.a * (p.a - 4 * p.q), _a1,
        lambda p, x: 0.25 * p.a**3 * (p.a - 4 * p.q),
        lambda p: p.a * (p.a - 4 * p.q) < 0, {}, _no_domain),
    FamilyId.A2: FamilySpec(
        FamilyId.A2, ("a", "b", "c", "q", "alpha"), "aq != 0",
        lambda p: p.a * p.q, _a2,
        lambda p, x: -p.a**3 * p.q * math.exp(6 * p.alpha * x[3]),
        lambda p: p.a * p.q > 0, {}, _no_domain),
    FamilyId.A3plus: FamilySpec(
        FamilyId.A3plus, ("a", "b", "c", "q"), "ab != 0",
        lambda p: p.a * p.b, _a3(J.cos),
        lambda p, x: -p.a**3 * p.b * math.cos(x[3]) ** 2 * math.exp(6 * x[2]),
        lambda p: p.a * p.b > 0, {3: lambda u: 1.2 * u}, _a3plus_domain),
    FamilyId.A3minus: FamilySpec(
        FamilyId.A3minus, ("a", "b", "c", "q"), "ab != 0",
        lambda p: p.a * p.b, _a3(J.cosh),
        lambda p, x: -p.a**3 * p.b * math.cosh(x[3]) ** 2 * math.exp(6 * x[2]),
        lambda p: p.a * p.b > 0, {}, _no_domain),
    FamilyId.A4: FamilySpec(
        FamilyId.A4, ("a", "b"), "a != 0", lambda p: p.a, _a4,
        lambda p, x: -(1 / 32) * p.a**4 * (4 + x[3] ** 2) ** 2,
        lambda p: True, {}, _no_domain),
    FamilyId.A5: FamilySpec(
        FamilyId.A5, ("a",), "a != 0", lambda p: p.a, _a5,
        lambda p, x: -p.a**4 / (2048 * x[1] ** 2),
        lambda p: True, {1: _away_from_zero}, _a5_domain),
    FamilyId.B1: FamilySpec(
        FamilyId.B1, ("a", "b", "c", "q"), "a != 0", lambda p: p.a, _b1,
        lambda p, x: p.a**4, lambda p: False, {}, _no_domain),
    FamilyId.B2: FamilySpec(
        FamilyId.B2, ("a", "b"), "a != 0", lambda p: p.a, _b2,
        lambda p, x: (1 / 32) * p.a**4 * (x[3] ** 2 - 4) ** 2,
        lambda p: False, {3: lambda u: 1.5 * u}, _b2_domain),
    FamilyId.B3: FamilySpec(
        FamilyId.B3, ("a", "b"), "a != 0", lambda p: p.a, _b3,
        lambda p, x: p.a**4 * math.exp(-2 * x[1]), lambda p: False, {}, _no_domain),
}

# A.3: epsilon = +1 is the cos chart, -1 the cosh chart
EPSILON = {FamilyId.A3plus: 1, FamilyId.A3minus: -1}


def spec_of(family) -> FamilySpec:
    return FAMILIES[FamilyId.parse(family)]


def check_admissible(family, params: FamilyParams) -> None:
    spec = spec_of(family)
    if is_zero(spec.admissible(params)):
        raise ConstraintViolated(spec.clause)


def check_domain(family, x) -> None:
    bad = spec_of(family).domain(tuple(x))
    if bad:
        raise DomainViolation(bad)


def metric_jet(family, params: FamilyParams, xs) -> Jet:
    """Assemble g_ij from jets of the coordinates; cross terms split evenly."""
    spec = spec_of(family)
    order = xs[0].order
    point = xs[0].point
    entries = [[0.0] * 4 for _ in range(4)]
    for (i, j), coef in spec.display(params, *xs):
        i, j = i - 1, j - 1
        if i == j:
            entries[i][i] = entries[i][i] + coef
        else:
            entries[i][j] = entries[i][j] + 0.5 * coef
            entries[j][i] = entries[j][i] + 0.5 * coef
    return J.from_array(entries, order, point)


def metric_at(family, params: FamilyParams, x, order: int = 4) -> MetricEval:
    """Metric of ``family`` at point ``x`` as order-``order`` jets."""
    check_admissible(family, params)
    x = tuple(float(v) for v in x)
    check_domain(family, x)
    return MetricEval(metric_jet(family, params, jet_vars(x, order)), x)


def det_oracle(family, params: FamilyParams, x) -> float:
    check_admissible(family, params)
    return float(spec_of(family).det(params, tuple(x)))


def expected_signature(family, params: FamilyParams) -> str:
    return "lorentzian" if spec_of(family).lorentzian(params) else "neutral"


def sample_points(family, n: int, seed: int) -> list[tuple[float, float, float, float]]:
    """Deterministic points in [-1, 1]^4 pushed into the family's chart.

    A3plus uses |x4| <= 1.2, A5 forces |x2| >= 0.3, B2 uses |x4| <= 1.5.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    spec = spec_of(family)
    rng = SplitMix64(seed)
    out = []
    for _ in range(n):
        u = [rng.uniform(-1.0, 1.0) for _ in range(4)]
        for k, f in spec.sample_box.items():
            u[k] = f(u[k])
        out.append(tuple(u))
    return out


def random_params(family, rng: SplitMix64) -> FamilyParams:
    """Admissible parameters kept away from the degenerate locus.

    a is drawn from +-[0.5, 2], b, c, q from [-2, 2] and alpha from [-1, 2.5];
    draws with |clause value| < 0.25 are rejected.
    """
    spec = spec_of(family)
    while True:
        a = rng.uniform(0.5, 2.0) * (1 if rng.uniform() < 0.5 else -1)
        b, c, q = (rng.uniform(-2.0, 2.0) for _ in range(3))
        alpha = rng.uniform(-1.0, 2.5)
        vals = dict(a=a, b=b, c=c, q=q, alpha=alpha)
        p = FamilyParams(**{k: vals[k] for k in spec.uses})
        if abs(spec.admissible(p)) >= 0.25:
            return p
