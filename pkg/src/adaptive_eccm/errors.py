"""Exception hierarchy shared by all modules."""


class EccmError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(EccmError, ValueError):
    """An argument is non-finite, has the wrong shape, or violates a domain invariant."""


class InvalidParamsError(InvalidInputError):
    """Jammer parameters that make the utility non-concave (negative theta)."""


class BudgetExceededError(EccmError):
    """A brute-force oracle would need more grid cells than allowed."""


class SolverError(EccmError):
    """A numerical solver failed (LP cycling, iteration cap, singular matrix).

    ``diagnostics`` carries whatever the solver knew when it gave up.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class NumericalError(SolverError):
    """Singular innovation covariance or similar linear-algebra breakdown."""


class InvalidModelError(InvalidInputError):
    """Kinematic or noise model with non-PSD covariances."""


class ConfigError(EccmError):
    """Bad configuration: unknown key, malformed value, out-of-box theta."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.key = key
        self.line = line


class EngagementError(EccmError):
    """A module error raised during an engagement, tagged with the slow step."""

    def __init__(self, step: int, cause: Exception):
        super().__init__(f"step {step}: {type(cause).__name__}: {cause}")
        self.step = step
        self.cause = cause
