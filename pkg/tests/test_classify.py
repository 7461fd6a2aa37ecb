import json
from importlib import resources

import numpy as np
import pytest

import curvlab.classify as C
from curvlab.catalog import metric_at, parse_params, sample_points
from curvlab.classify import (
    FLAGS, InconsistentVerdict, SweepSpec, Verdict, classify_case, classify_point, compare, expected_verdict, sweep,
)
from curvlab.curvature import curvature_pack
from curvlab.errors import ConstraintViolated
from curvlab.rng import SplitMix64

X0 = (0.1, -0.4, 0.3, 0.2)


def shipped_specs():
    text = resources.files("curvlab").joinpath("data/theorems.json").read_text()
    return [SweepSpec.from_dict(d) for d in json.loads(text)]


def test_a5_constant_curvature():
    v = classify_point("A5", parse_params("a=1", "A5"), (0.2, 0.5, 0.1, -0.3))
    assert v["constant_curvature"] and v["einstein"] and not v["ricci_flat"]
    assert v.K == pytest.approx(-4, rel=1e-12)


def test_a2_einstein_scalar_curvature():
    p = parse_params("a=1,b=1,q=1,c=0,alpha=2/3", "A2")
    v = classify_point("A2", p, X0)
    assert v["einstein"] and not v["constant_curvature"]
    assert curvature_pack(metric_at("A2", p, X0)).tau == pytest.approx(-16 / 3, rel=1e-12)


def test_b1_half_conformally_flat_case():
    v = classify_case("B1", parse_params("a=1,b=0,c=1,q=0", "B1"), sample_points("B1", 3, 0))
    assert v["bach_flat"] and not v["conformally_flat"] and v["weakly_generic"]
    # the conformal Jacobi operators are nilpotent, of index three rather than two
    assert v.nilpotency["conformal_jacobi"] == 3
    assert not v["conformal_jacobi_two_step_nilpotent"]


@pytest.mark.parametrize("params", ["a=1,b=0,c=0,q=1", "a=-1.5,b=0,c=0,q=2"])
def test_b1_jacobi_not_nilpotent_when_osserman_diagonalizable(params):
    v = classify_point("B1", parse_params(params, "B1"), X0)
    assert v.nilpotency["jacobi"] is None


def test_expected_examples():
    e = expected_verdict("A1", parse_params("a=1,b=1,c=0,q=-3/4"))
    assert e["bach_flat"] and not e["conformally_flat"]
    e = expected_verdict("A3plus", parse_params("a=1,b=1,c=0,q=-1"))
    assert e["einstein"] and e["constant_curvature"] and e.K == -1
    e = expected_verdict("B3", parse_params("a=1,b=0"))
    assert e["constant_curvature"] and e["ricci_flat"] and e.K == 0
    e = expected_verdict("A2", parse_params("a=1,b=1,c=0,q=1,alpha=2"))
    assert e["conformally_flat"] and e["bach_flat"] and not e["einstein"]
    e = expected_verdict("B1", parse_params("a=1,b=2,c=1,q=0.5"))
    assert e["einstein"] and e["bach_flat"] and e["weakly_generic"] is None
    with pytest.raises(ConstraintViolated):
        expected_verdict("A1", parse_params("a=4,b=1,c=0,q=1"))


def test_compare():
    base = expected_verdict("A5", parse_params("a=1", "A5"))
    assert compare(base, base) == []
    other = Verdict(dict(base.flags, einstein=False), -4.0)
    assert compare(other, base) == ["einstein"]
    assert compare(Verdict(dict(base.flags), -3.0), base) == ["K"]
    unclaimed = Verdict(dict(base.flags, weakly_generic=None), -4.0)
    assert compare(Verdict(dict(base.flags, weakly_generic=True), -4.0), unclaimed) == []


def test_a2_bach_grid():
    spec = SweepSpec.from_dict({"family": "A2", "grid": {
        "alpha": [0, "1/3", "2/3", 1, "3/2", 2], "b": [-1, 0, 1], "a": [1], "q": [1], "c": [0]}})
    rows = sweep(spec)
    assert len(rows) == 18
    for r in rows:
        assert r["status"] == "agree"
        al, b = r["params"]["alpha"], r["params"]["b"]
        want = b == 0 or any(abs(al - t) < 1e-12 for t in (2 / 3, 1, 2))
        assert r["computed"]["bach_flat"] == want


def test_b1_einstein_grid():
    spec = SweepSpec.from_dict({"family": "B1", "grid": {
        "q": [-1, 0, 1], "b": [-1, 0, 1], "c": [0, 1], "a": [1]}})
    rows = sweep(spec)
    assert len(rows) == 18
    for r in rows:
        p = r["params"]
        assert r["computed"]["einstein"] == (p["c"] ** 2 - p["b"] * p["q"] == 0)
        assert r["status"] == "agree"


def test_empty_grid():
    assert sweep(SweepSpec.from_dict({"family": "A4", "grid": {"a": [], "b": [0]}})) == []


def test_grid_order_and_defaults():
    spec = SweepSpec.from_dict({"family": "A1", "grid": {"q": [0, 1], "b": [2, 3]}})
    cases = spec.cases()
    # parameters vary in canonical order (a, b, c, q, alpha), the last fastest
    assert [(p.b, p.q) for p in cases] == [(2, 0), (2, 1), (3, 0), (3, 1)]
    assert all(p.a == 1 and p.c == 0 for p in cases)


def test_inadmissible_row_recorded():
    rows = sweep(SweepSpec.from_dict({"family": "A1", "grid": {"a": [4], "q": [1], "b": [1]}}))
    assert rows[0]["status"] == "inadmissible"
    assert "a(a-4q)" in rows[0]["error"]


@pytest.mark.parametrize("bad", [
    [], {"grid": {}}, {"family": "Z9"}, {"family": "A4", "grid": {"q": [1]}}, {"family": "A4", "grid": {"a": 1}},
    {"family": "A4", "points": 0}, {"family": "A4", "seed": -1}, {"family": "A4", "tol": "x"},
    {"family": "A4", "extra": 1}, {"family": "A4", "grid": {"zeta": [1]}},
])
def test_malformed_specs(bad):
    with pytest.raises(ValueError):
        SweepSpec.from_dict(bad)


def test_inconsistent_points_detected(monkeypatch):
    calls = []
    real = C.classify_point

    def flaky(*args, **kw):
        v = real(*args, **kw)
        calls.append(1)
        if len(calls) == 2:
            v.flags["einstein"] = not v.flags["einstein"]
        return v
    monkeypatch.setattr(C, "classify_point", flaky)
    with pytest.raises(InconsistentVerdict):
        classify_case("A4", parse_params("a=1,b=1", "A4"), sample_points("A4", 3, 0))
    calls.clear()
    rows = sweep(SweepSpec.from_dict({"family": "A4", "grid": {"a": [1], "b": [1]}}))
    assert rows[0]["status"] == "error"


def test_theorem_regression():
    specs = shipped_specs()
    rows = [r for s in specs for r in sweep(s)]
    assert len(rows) >= 200
    bad = [r for r in rows if r["status"] != "agree"]
    assert not bad, bad[:3]
    for r in rows:
        f = r["computed"]
        assert not f["einstein"] or f["bach_flat"]
        assert not f["conformally_flat"] or f["bach_flat"]
    assert {s.family.value for s in specs} == {
        "A1", "A2", "A3plus", "A3minus", "A4", "A5", "B1", "B2", "B3"}


def test_a4_single_case():
    rows = sweep(SweepSpec.from_dict({"family": "A4", "grid": {"a": [2], "b": [0]}}))
    assert rows[0]["computed"]["constant_curvature"]
    assert rows[0]["K"] == pytest.approx(-0.5, rel=1e-12)


@pytest.mark.parametrize("a,q,c", [(1, 1, 0), (1.5, -0.7, 0.4), (-2, 0.5, -1)])
def test_osserman_spectrum(a, q, c):
    p = parse_params(f"a={a},b={c * c / q},c={c},q={q}", "B1")
    pk = curvature_pack(metric_at("B1", p, X0))
    g = pk.metric.g
    rng = SplitMix64(99)
    done = 0
    while done < 20:
        x = np.array([rng.uniform(-1, 1) for _ in range(4)])
        n = x @ g @ x
        if abs(n) < 0.05:
            continue
        x /= np.sqrt(abs(n))
        eps = np.sign(n)
        ev = np.sort(np.linalg.eigvals(pk.jacobi(x)).real)
        want = np.sort(eps * np.array([0, q / a**2, q / (4 * a**2), q / (4 * a**2)]))
        np.testing.assert_allclose(ev, want, atol=1e-7)
        done += 1


def test_flags_cover_verdict():
    v = classify_point("B3", parse_params("a=1,b=1", "B3"), X0)
    assert set(v.flags) == set(FLAGS) == set(v.evidence)
    assert v["jacobi_two_step_nilpotent"] and v.nilpotency["jacobi"] == 2
