"""Exception types shared across the package."""


class CurvlabError(Exception):
    pass


class OrderExceeded(CurvlabError, ValueError):
    """A derivative beyond the jet truncation order was requested."""


class SingularDivisor(CurvlabError, ZeroDivisionError):
    pass


class DegenerateMetric(CurvlabError, ValueError):
    pass


class ConstraintViolated(CurvlabError, ValueError):
    """Family parameters violate the admissibility clause."""

    def __init__(self, clause: str):
        self.clause = clause
        super().__init__(f"constraint violated: {clause}")


class DomainViolation(CurvlabError, ValueError):
    def __init__(self, detail: str = ""):
        self.detail = detail
        super().__init__("point outside chart" + (f": {detail}" if detail else ""))


class NoOracle(CurvlabError, KeyError):
    def __str__(self):
        return self.args[0] if self.args else "no oracle"


class FactorNotPositive(CurvlabError, ValueError):
    pass


class IncompatibleFactor(CurvlabError, ValueError):
    pass
