"""Pipeline-versus-closed-form comparison shared by the CLI and the test suite."""
from __future__ import annotations

import numpy as np

from .catalog import FAMILIES, ORACLE_TENSORS, FamilyId, has_oracle, metric_at, oracle_components
from .curvature import curvature_pack

PACK_FIELD = {"ricci_op": "RicciOp", "ricci": "Ricci", "cotton": "Cotton", "weyl": "Weyl", "bach": "Bach"}


def rel_error(computed: np.ndarray, oracle: np.ndarray) -> float:
    """max|diff| / max(max|oracle|, 1)."""
    return float(np.max(np.abs(computed - oracle)) / max(float(np.max(np.abs(oracle))), 1.0))


def oracle_check(family, cases, tol: float = 1e-9) -> dict:
    """Compare every tabled tensor at each (params, point) in ``cases``.

    Returns {tensor: {"max_rel_err", "pass", "worst"}} where ``worst`` names
    the component, parameters and point of the largest error.
    """
    fam = FamilyId.parse(family)
    tensors = [t for t in ORACLE_TENSORS if has_oracle(fam, t)]
    out = {t: {"max_rel_err": 0.0, "pass": True, "worst": None} for t in tensors}
    for params, x in cases:
        pack = curvature_pack(metric_at(fam, params, x), nabla_r=False)
        for t in tensors:
            oracle = oracle_components(fam, params, x, t).components
            computed = getattr(pack, PACK_FIELD[t])
            err = rel_error(computed, oracle)
            rec = out[t]
            if err >= rec["max_rel_err"] and (rec["worst"] is None or err > rec["max_rel_err"]):
                idx = np.unravel_index(int(np.argmax(np.abs(computed - oracle))), oracle.shape)
                rec["max_rel_err"] = err
                rec["worst"] = {
                    "component": "(" + ",".join(str(i + 1) for i in idx) + ")",
                    "computed": float(computed[idx]),
                    "oracle": float(oracle[idx]),
                    "params": {k: getattr(params, k) for k in FAMILIES[fam].uses},
                    "point": list(x),
                }
    for rec in out.values():
        rec["pass"] = rec["max_rel_err"] <= tol
    return out
