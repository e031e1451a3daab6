"""Error kinds raised across sqc-lab."""


class SqcLabError(Exception):
    """Base class for all sqc-lab errors."""


class InvalidArgumentError(SqcLabError, ValueError):
    """An argument violates an operation's precondition."""


class UnsupportedCombinationError(SqcLabError, ValueError):
    """A (set, norm) pair has no supported distance or projection."""


class PreconditionFailure(SqcLabError, ValueError):
    """A sampled precondition of a check does not hold."""


class NumericFailureError(SqcLabError, RuntimeError):
    """An iterative scheme did not reach its residual target."""

    def __init__(self, message: str, residual: float, iterations: int) -> None:
        super().__init__(f"{message} (residual={residual:.3e} after {iterations} iterations)")
        self.residual = residual
        self.iterations = iterations
