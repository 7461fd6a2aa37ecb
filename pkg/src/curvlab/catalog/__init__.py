from .families import (
    FAMILIES,
    FamilyId,
    FamilyParams,
    check_admissible,
    det_oracle,
    expected_signature,
    metric_at,
    metric_jet,
    parse_params,
    random_params,
    sample_points,
    spec_of,
)
from .oracles import ORACLE_TENSORS, has_oracle, oracle_components

__all__ = [
    "FAMILIES",
    "FamilyId",
    "FamilyParams",
    "ORACLE_TENSORS",
    "check_admissible",
    "det_oracle",
    "expected_signature",
    "has_oracle",
    "metric_at",
    "metric_jet",
    "oracle_components",
    "parse_params",
    "random_params",
    "sample_points",
    "spec_of",
]
