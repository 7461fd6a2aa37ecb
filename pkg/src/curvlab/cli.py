"""Command-line interface: ``curvlab {eval,verify-oracle,conformal,classify,sweep}``.

Exit codes: 0 success; 1 oracle mismatch, failed conformal check or sweep
disagreement; 2 constraint violation, malformed input or incompatible factor;
3 point outside the chart (or factor not positive there).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import __version__
from .catalog import FAMILIES, FamilyId, metric_at, parse_params, random_params, sample_points
from .catalog.families import PARAM_NAMES, parse_number
from .classify import FLAGS, SweepSpec, classify_case, compare, expected_verdict, sweep
from .conformal import ConformalFactor, ce_obstruction, ce_residual, parse_factor, rescale_jet
from .curvature import curvature_pack
from .errors import ConstraintViolated, CurvlabError, DomainViolation, FactorNotPositive, IncompatibleFactor
from .jet import jet_vars
from .rng import SplitMix64
from .tensor import ABS_FLOOR, MetricEval
from .verify import oracle_check

TENSORS = ("christoffel", "riemann", "ricci", "ricci-op", "scalar", "schouten", "weyl", "cotton", "bach", "nabla-r")
_FIELD = {
    "christoffel": "Gamma", "riemann": "Riemann", "ricci": "Ricci", "ricci-op": "RicciOp", "scalar": "tau",
    "schouten": "Schouten", "weyl": "Weyl", "cotton": "Cotton", "bach": "Bach", "nabla-r": "NablaR",
}
_ORDER = {"cotton": 3, "nabla-r": 3, "bach": 4}


class UsageError(ValueError):
    """Malformed or inconsistent command-line input (exit 2)."""


@dataclass
class RunConfig:
    command: str
    family: str | None = None
    params: str | dict | None = None
    point: str | list | None = None
    points: int | None = None
    tensor: str = "ricci"
    factor: str | None = None
    spec: str | None = None
    seed: int = 0
    tol: float | None = None
    format: str = "json"
    out: str | None = None
    extra: dict = field(default_factory=dict)


# -- output ------------------------------------------------------------------------

def _clean(obj):
    """Make a report JSON-safe and deterministic (numpy scalars, non-finite floats)."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps(obj) -> str:
    """Sorted keys; floats as shortest round-trip repr (at most 17 significant digits)."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_csv_cell(v) for v in r])
    return buf.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


# -- parsing -----------------------------------------------------------------------

def _family(cfg: RunConfig) -> FamilyId:
    if not cfg.family:
        raise UsageError("--family is required")
    try:
        return FamilyId.parse(cfg.family)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _params(cfg: RunConfig, fam: FamilyId):
    if cfg.params is None:
        raise UsageError("--params is required")
    try:
        p = parse_params(cfg.params, fam)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    missing = [k for k in FAMILIES[fam].uses if k not in _given_keys(cfg.params)]
    if missing:
        raise UsageError(f"missing parameter(s) {missing} for family {fam.value}")
    return p


def _given_keys(params) -> set:
    if isinstance(params, dict):
        return set(params)
    return {part.split("=", 1)[0].strip() for part in str(params).split(",") if "=" in part}


def _point(cfg: RunConfig) -> tuple:
    if cfg.point is None:
        raise UsageError("--point is required")
    raw = cfg.point if isinstance(cfg.point, list) else str(cfg.point).split(",")
    try:
        x = tuple(parse_number(v) for v in raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"malformed point: {exc}") from None
    if len(x) != 4 or not all(math.isfinite(v) for v in x):
        raise UsageError("--point needs four finite coordinates")
    return x


def _key(idx) -> str:
    return "(" + ",".join(str(i + 1) for i in idx) + ")"


# -- commands ----------------------------------------------------------------------

def cmd_eval(cfg: RunConfig) -> int:
    fam = _family(cfg)
    p = _params(cfg, fam)
    x = _point(cfg)
    if cfg.tensor not in TENSORS:
        raise UsageError(f"unknown tensor {cfg.tensor!r}")
    tol = 1e-10 if cfg.tol is None else cfg.tol
    m = metric_at(fam, p, x, order=_ORDER.get(cfg.tensor, 2))
    pack = curvature_pack(m, nabla_r=cfg.tensor == "nabla-r",
                          upto={"bach": "bach", "cotton": "cotton", "nabla-r": "cotton"}.get(cfg.tensor, "weyl"))
    arr = np.asarray(getattr(pack, _FIELD[cfg.tensor]), dtype=float)
    cut = tol * max(1.0, float(np.max(np.abs(arr))) if arr.size else 0.0)
    comps = {_key(idx): float(v) for idx, v in np.ndenumerate(arr) if abs(v) > cut}
    if cfg.format == "csv":
        _emit(_csv(["index", "value"], sorted(comps.items())), cfg.out)
    else:
        _emit(dumps(comps), cfg.out)
    return 0


def cmd_verify_oracle(cfg: RunConfig) -> int:
    fam = _family(cfg)
    trials = cfg.points or 8
    tol = 1e-9 if cfg.tol is None else cfg.tol
    rng = SplitMix64(cfg.seed)
    pts = sample_points(fam, trials, cfg.seed)
    if cfg.params is not None:
        p = _params(cfg, fam)
        cases = [(p, x) for x in pts]
    else:
        cases = [(random_params(fam, rng), x) for x in pts]
    from .catalog import has_oracle, ORACLE_TENSORS

    if not any(has_oracle(fam, t) for t in ORACLE_TENSORS):
        raise UsageError(f"family {fam.value} has no closed-form tables")
    report = oracle_check(fam, cases, tol)
    ok = all(r["pass"] for r in report.values())
    summary = {"family": fam.value, "trials": trials, "seed": cfg.seed, "tol": tol, "pass": ok, "tensors": report}
    if cfg.format == "csv":
        rows = [(t, r["max_rel_err"], r["pass"], r["worst"]["component"] if r["worst"] else "")
                for t, r in sorted(report.items())]
        _emit(_csv(["tensor", "max_rel_err", "pass", "worst_component"], rows), cfg.out)
    else:
        _emit(dumps(summary), cfg.out)
    if not ok:
        for t, r in sorted(report.items()):
            if not r["pass"]:
                w = r["worst"]
                print(f"oracle mismatch: {t} {w['component']} computed={w['computed']!r} "
                      f"oracle={w['oracle']!r} rel_err={r['max_rel_err']:.3e} params={w['params']} "
                      f"point={w['point']}", file=sys.stderr)
        return 1
    return 0


def _positive_points(factor: ConformalFactor, fam, p, n: int, seed: int) -> list:
    cand = sample_points(fam, 50 * n, seed)
    out = []
    for x in cand:
        phi = factor.jet_of(p, jet_vars(x, 1))
        if phi.coeffs[0] > 0:
            out.append(x)
            if len(out) == n:
                break
    if not out:
        raise FactorNotPositive("factor not positive at any sample point")
    return out


def cmd_conformal(cfg: RunConfig) -> int:
    fam = _family(cfg)
    p = _params(cfg, fam)
    if not cfg.factor:
        raise UsageError("conformal needs --factor")
    try:
        factor = parse_factor(cfg.factor)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    from .catalog import check_admissible

    check_admissible(fam, p)
    factor.check_compatible(fam, p)
    factor.resolve_branch(p)
    tol = 1e-8 if cfg.tol is None else cfg.tol
    n = cfg.points or 8
    points = [_point(cfg)] if cfg.point is not None else _positive_points(factor, fam, p, n, cfg.seed)
    worst = {"E": [0.0, 0.0], "C": [0.0, 0.0], "ricci_bar": [0.0, 0.0]}
    for x in points:
        m = metric_at(fam, p, x, order=3)
        phi = factor.at(p, x, order=3)
        pack = curvature_pack(m, nabla_r=False, upto="cotton")
        E, es = ce_residual(phi, m, pack)
        C, cs = ce_obstruction(phi, m, pack)
        mbar = MetricEval(rescale_jet(m.jet.truncate(2), phi.truncate(2)), x)
        rb = curvature_pack(mbar, upto="weyl")
        for name, arr, scale in (("E", E, es), ("C", C, cs), ("ricci_bar", rb.Ricci, pack.scales["ricci"])):
            a = float(np.max(np.abs(arr)))
            worst[name][0] = max(worst[name][0], a)
            worst[name][1] = max(worst[name][1], 0.0 if a <= ABS_FLOOR else a / scale)
    ok = all(v[1] <= tol for v in worst.values())
    verdict = "conformally Ricci-flat: " + ("PASS" if ok else "FAIL")
    report = {
        "family": fam.value, "params": {k: getattr(p, k) for k in FAMILIES[fam].uses},
        "factor": factor.describe(), "branch": factor.resolve_branch(p), "points": len(points), "tol": tol,
        "max_abs": {k: v[0] for k, v in worst.items()}, "max_rel": {k: v[1] for k, v in worst.items()},
        "pass": ok, "verdict": verdict,
    }
    if cfg.format == "csv":
        rows = [(k, worst[k][0], worst[k][1], worst[k][1] <= tol) for k in ("E", "C", "ricci_bar")]
        _emit(_csv(["residual", "max_abs", "max_rel", "pass"], rows) + verdict + "\n", cfg.out)
    else:
        _emit(dumps(report), cfg.out)
    print(verdict, file=sys.stderr)
    return 0 if ok else 1


def cmd_classify(cfg: RunConfig) -> int:
    fam = _family(cfg)
    p = _params(cfg, fam)
    tol = 1e-8 if cfg.tol is None else cfg.tol
    points = [_point(cfg)] if cfg.point is not None else sample_points(fam, cfg.points or 3, cfg.seed)
    computed = classify_case(fam, p, points, tol)
    expected = expected_verdict(fam, p)
    bad = compare(computed, expected)
    report = {
        "family": fam.value, "params": {k: getattr(p, k) for k in FAMILIES[fam].uses},
        "computed": computed.flags, "expected": expected.flags, "K": computed.K, "K_expected": expected.K,
        "nilpotency": computed.nilpotency, "evidence": computed.evidence, "disagreements": bad,
    }
    if cfg.format == "csv":
        rows = [(k, computed.flags[k], expected.flags[k], k not in bad) for k in FLAGS]
        _emit(_csv(["flag", "computed", "expected", "agree"], rows), cfg.out)
    else:
        _emit(dumps(report), cfg.out)
    return 1 if bad else 0


def load_sweep_specs(path: str | None) -> list[SweepSpec]:
    if path is None:
        text = resources.files("curvlab").joinpath("data/theorems.json").read_text(encoding="utf-8")
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read sweep spec: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed sweep spec: {exc}") from None
    items = raw if isinstance(raw, list) else [raw]
    try:
        return [SweepSpec.from_dict(d) for d in items]
    except ValueError as exc:
        raise UsageError(f"malformed sweep spec: {exc}") from None


def cmd_sweep(cfg: RunConfig) -> int:
    specs = load_sweep_specs(cfg.spec)
    rows = []
    for s in specs:
        if cfg.points is not None:
            s.points = cfg.points
        if cfg.tol is not None:
            s.tol = cfg.tol
        if "seed" in cfg.extra:
            s.seed = cfg.seed
        rows.extend(sweep(s))
    bad = [r for r in rows if r["status"] in ("disagree", "error")]
    summary = {"cases": len(rows), "disagreements": sum(r["status"] == "disagree" for r in rows),
               "errors": sum(r["status"] == "error" for r in rows),
               "inadmissible": sum(r["status"] == "inadmissible" for r in rows)}
    if cfg.format == "csv":
        header = ["family", *PARAM_NAMES, "status"]
        for f in FLAGS:
            header += [f"{f}_computed", f"{f}_expected", f"{f}_agree"]
        header += ["K", "K_expected", "disagreements"]
        table = []
        for r in rows:
            line = [r["family"], *(r["params"].get(k) for k in PARAM_NAMES), r["status"]]
            for f in FLAGS:
                if "computed" in r:
                    exp = r["expected"][f]
                    line += [r["computed"][f], exp, "n/a" if exp is None else f not in r["disagreements"]]
                else:
                    line += [None, None, None]
            line += [r.get("K"), r.get("K_expected"), ";".join(r.get("disagreements", [])) or r.get("error")]
            table.append(line)
        _emit(_csv(header, table), cfg.out)
    else:
        _emit(dumps({"summary": summary, "rows": rows}), cfg.out)
    print(f"sweep: {summary['cases']} cases, {summary['disagreements']} disagreements, "
          f"{summary['errors']} errors", file=sys.stderr)
    for r in bad:
        print(f"  {r['status']}: {r['family']} {r['params']} {r.get('disagreements') or r.get('error')}",
              file=sys.stderr)
    return 1 if bad else 0


COMMANDS = {
    "eval": cmd_eval,
    "verify-oracle": cmd_verify_oracle,
    "conformal": cmd_conformal,
    "classify": cmd_classify,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="curvlab", description="Curvature laboratory for homogeneous 4-metrics.")
    ap.add_argument("--version", action="version", version=f"curvlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        if name == "sweep":
            sp.add_argument("spec", nargs="?", help="sweep spec JSON (default: shipped theorem grids)")
        sp.add_argument("--family")
        sp.add_argument("--params", help="k=v,... (values may be ratios like -3/4)")
        sp.add_argument("--point", help="x1,x2,x3,x4")
        sp.add_argument("--points", type=int, help="number of sample points / trials")
        sp.add_argument("--tensor", choices=TENSORS)
        sp.add_argument("--factor", help="kind=...,kappa1=...,kappa2=...[,kappa3=...][,branch=...]")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--format", choices=("json", "csv"))
        sp.add_argument("--out")
        sp.add_argument("--config", help="JSON file of option defaults (keys as the long flags)")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    opts = {}
    if ns.config:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                opts = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(opts, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(opts) - {"family", "params", "point", "points", "tensor", "factor", "spec", "seed", "tol",
                               "format", "out"}
        if unknown:
            raise UsageError(f"unknown config keys {sorted(unknown)}")
    given = {k: v for k, v in vars(ns).items() if v is not None and k not in ("command", "config")}
    opts.update(given)
    extra = {"seed": True} if "seed" in opts else {}
    cfg = RunConfig(command=ns.command, extra=extra)
    for k, v in opts.items():
        setattr(cfg, k, v)
    if cfg.seed is None:
        cfg.seed = 0
    if not isinstance(cfg.seed, int) or cfg.seed < 0:
        raise UsageError("--seed must be a non-negative integer")
    if cfg.points is not None and (not isinstance(cfg.points, int) or cfg.points < 1):
        raise UsageError("--points must be a positive integer")
    if cfg.tol is not None and not (isinstance(cfg.tol, (int, float)) and cfg.tol > 0):
        raise UsageError("--tol must be positive")
    if cfg.format not in ("json", "csv"):
        raise UsageError("--format must be json or csv")
    return cfg


def main(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (ConstraintViolated, IncompatibleFactor, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainViolation, FactorNotPositive) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except CurvlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
