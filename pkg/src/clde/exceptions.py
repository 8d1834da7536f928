"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """Raised when an argument breaks an operation's precondition."""


class NoGroundTruth(LookupError):
    """Raised when known optima are requested for a problem that has none."""


class UnknownProblem(KeyError):
    """Raised when a problem id is not in the registry."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown problem"
