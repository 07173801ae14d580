"""Exception hierarchy shared by all modules."""


class DensityLabError(Exception):
    """Base class for every error raised by densitylab."""


class InputDomainError(DensityLabError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class CapacityError(DensityLabError):
    """A resource limit (sum length, grid size, sieve size) was exceeded."""

    def __init__(self, limit_name, limit, requested):
        self.limit_name = limit_name
        self.limit = limit
        self.requested = requested
        super().__init__(f"{limit_name} exceeded: requested {requested}, limit {limit}")


class PoleError(InputDomainError):
    """Evaluation requested at a pole."""


class ConditioningError(DensityLabError):
    """The result would be numerically meaningless (e.g. division by a tiny zeta value)."""

    def __init__(self, message, magnitude=None):
        self.magnitude = magnitude
        super().__init__(message)


class NumericalError(DensityLabError):
    """A quadrature or iteration failed to reach its tolerance."""

    def __init__(self, message, achieved=None):
        self.achieved = achieved
        super().__init__(message)


class HorizonError(DensityLabError):
    """A zero-table query reaches beyond the table's completeness horizon."""


class IncompletenessError(DensityLabError):
    """A zero table disagrees with the Riemann-von Mangoldt main term."""

    def __init__(self, message, interval=None, deficit=None):
        self.interval = interval
        self.deficit = deficit
        super().__init__(message)


class ZeroTableFormatError(DensityLabError, ValueError):
    """A zero-table file could not be parsed or is not ascending."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class HypothesisError(DensityLabError):
    """The hypothesis of a reduction does not hold for the given input."""

    def __init__(self, message, value=None, threshold=None):
        self.value = value
        self.threshold = threshold
        super().__init__(message)


class BranchFailure(DensityLabError):
    """Neither branch of a dichotomy numerically cleared its threshold."""

    def __init__(self, message, details=None):
        self.details = dict(details or {})
        super().__init__(message)


class DetectionFailure(DensityLabError):
    """A stage of the zero-detection pipeline did not meet its inequality.

    ``stage`` names the failing stage and ``details`` keeps every intermediate
    value computed up to that point.
    """

    def __init__(self, stage, message, details=None):
        self.stage = stage
        self.details = dict(details or {})
        super().__init__(f"[{stage}] {message}")


class ProfileError(DensityLabError, ValueError):
    """A density-exponent profile is malformed or does not cover the requested range."""


class StepFailure(DensityLabError):
    """An exponent-level inequality in a replayed proof step failed."""

    def __init__(self, message, trace=None):
        self.trace = trace
        super().__init__(message)
