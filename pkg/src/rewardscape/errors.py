"""Exception types shared across the package."""


class ValidationError(ValueError):
    """A precondition or spec-level constraint was violated."""


class UnsupportedError(ValidationError):
    """Operation is not defined for this environment or configuration."""


class NumericError(ArithmeticError):
    """A computation produced non-finite values."""


class GridRejectedError(NumericError):
    """A loss landscape grid contained a non-finite cell."""

    def __init__(self, alpha, beta, value):
        super().__init__(f"non-finite loss {value!r} at (alpha={alpha}, beta={beta})")
        self.alpha = alpha
        self.beta = beta
        self.value = value


class ConfigError(ValidationError):
    """Experiment config failed validation; carries one message per offending path."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid config:\n" + "\n".join(f"  - {p}" for p in self.problems))
