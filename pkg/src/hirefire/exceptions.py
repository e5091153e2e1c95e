"""Exception hierarchy shared by the hirefire modules."""


class ValidationError(ValueError):
    """Base class for rejected inputs (CLI maps these to exit code 2)."""


class OrderingViolation(ValidationError):
    """The salary/drift ordering ``0 < c0 <= mu0 < c1 < mu1`` does not hold."""

    def __init__(self, inequality, message=None):
        self.inequality = inequality
        super().__init__(message or f"parameter ordering violated: {inequality} fails "
                                    "(need 0 < c0 <= mu0 < c1 < mu1)")


class DomainViolation(ValidationError):
    """A parameter lies outside its admissible interval."""

    def __init__(self, name, message):
        self.name = name
        super().__init__(message)


class AssumptionViolation(ValidationError):
    """A simplifying assumption of an extension model is not satisfied."""


class ConfigViolation(ValidationError):
    """Simulation or grid configuration is unusable."""


class MissingObservations(ValueError):
    """A path without observation values was passed where ``x`` is required."""


class RegimeMismatch(ValueError):
    """An operation that needs the semi-separating regime was called in another one."""


class NoConvergence(RuntimeError):
    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super().__init__(f"no convergence after {iterations} iterations "
                         f"(last update {residual:.3e})")


class SingularSystem(RuntimeError):
    pass
