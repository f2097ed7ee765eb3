class CollarMassError(Exception):
    """Base class for all domain errors raised by the package."""


class InvalidMetric(CollarMassError, ValueError):
    def __init__(self, message, indices=()):
        self.indices = tuple(int(i) for i in indices)
        if self.indices:
            shown = ", ".join(map(str, self.indices[:10]))
            more = "" if len(self.indices) <= 10 else f", ... ({len(self.indices)} total)"
            message = f"{message} at grid indices [{shown}{more}]"
        super().__init__(message)


class DegenerateGrid(CollarMassError, ValueError):
    pass


class GridMismatch(CollarMassError, ValueError):
    pass


class UnequalArea(CollarMassError, ValueError):
    pass


class PositiveCurvatureLost(CollarMassError):
    def __init__(self, s, theta, value):
        self.s, self.theta, self.value = float(s), float(theta), float(value)
        super().__init__(
            f"Gaussian curvature {value:.3e} <= 0 along path at s={s:.4f}, theta={theta:.4f}"
        )


class ConditionViolated(CollarMassError):
    pass


class NonPositiveMass(CollarMassError):
    pass


class BracketViolation(CollarMassError):
    pass


class HorizonError(CollarMassError, ValueError):
    pass


class PreconditionFailed(CollarMassError):
    pass


class SearchExhausted(CollarMassError):
    pass


class NoDeltaFound(CollarMassError):
    pass


class NotAsymptoticallyFlat(CollarMassError):
    pass


class CollarInfeasible(CollarMassError):
    pass


class CornerInequalityFailed(CollarMassError):
    def __init__(self, message, where=None):
        self.where = where
        super().__init__(message)
