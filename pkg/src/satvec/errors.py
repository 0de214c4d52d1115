"""Exception types shared across the package."""


class InfeasibleProblem(Exception):
    """A subproblem or scenario admits no solution within its constraints."""


class DegenerateRateError(RuntimeError):
    """A link rate collapsed to zero while bits were still assigned to it."""


class ConfigError(Exception):
    """Invalid experiment configuration.

    ``line`` is the 1-based line number in the config file when the error
    can be attributed to one, else 0.
    """

    def __init__(self, message: str, line: int = 0):
        self.line = line
        if line:
            message = f"line {line}: {message}"
        super().__init__(message)
